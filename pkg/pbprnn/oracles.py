# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent numeric checks of the Bayesian training machinery.

Each suite compares a production routine with a reference computed in a
different way (closed form, finite differences, sampling, quadrature)
and returns an :class:`OracleResult`.
"""

import collections
import logging

import numpy as np
from scipy import integrate
from scipy import stats

from pbprnn.core.gaussian import GammaPosterior
from pbprnn.core.gaussian import GaussianMatrix
from pbprnn.core.gaussian import PartitionTriple
from pbprnn.core.updates import log_marginal_gradients
from pbprnn.core.updates import pbp_update_weight
from pbprnn.core.updates import update_noise_posterior
from pbprnn.recurrent.network import ObservationSequence
from pbprnn.recurrent.network import RecurrentBayesNet
from pbprnn.recurrent.network import forward_sequence
from pbprnn.recurrent.training import sequence_gradients
from pbprnn.recurrent.training import step_log_partitions
from pbprnn.seeding import SeedBank


_LOGGER = logging.getLogger(__name__)

FD_STEP = 1e-6
FD_RTOL = 1e-5
FD_ATOL = 1e-8
MC_SAMPLES = 100000
MC_STANDARD_ERRORS = 3.0
QUADRATURE_RTOL = 1e-3


_OracleResultTuple = collections.namedtuple(
    'OracleResult', ['name', 'passed', 'detail', 'cases'])


class OracleResult(_OracleResultTuple):
    """Outcome of one suite.

    :type detail: str
    :param detail: the worst deviation found, or the first failure.
    """
    __slots__ = ()


def conjugate_suite(bank, cases=100):
    """The Gaussian update against the closed-form Gaussian posterior.

    With a Gaussian likelihood ``N(y | w, s)`` the moment-matched update is
    exact: ``m' = (m s + y v) / (v + s)`` and ``v' = v s / (v + s)``.
    """
    rng = bank.generator('oracle-conjugate')
    worst = 0.0
    problems = []
    # prior N(0, 1), likelihood N(1 | w, 1) -> N(0.5, 0.5)
    inputs = [(0.0, 1.0, 1.0, 1.0)]
    inputs.extend(zip(rng.normal(size=cases - 1),
                      rng.uniform(0.05, 2.0, cases - 1),
                      rng.normal(size=cases - 1),
                      rng.uniform(0.05, 2.0, cases - 1)))
    for m, v, y, s in inputs:
        grad_m, grad_v = log_marginal_gradients(y, m, v, s)
        new_m, new_v = pbp_update_weight(m, v, grad_m, grad_v)
        expected_m = (m * s + y * v) / (v + s)
        expected_v = v * s / (v + s)
        error = max(abs(new_m - expected_m), abs(new_v - expected_v))
        worst = max(worst, error)
        if error > 1e-10:
            problems.append('m=%r v=%r y=%r s=%r: off by %.3g' % (
                m, v, y, s, error))
    detail = problems[0] if problems else 'max error %.3g' % worst
    return OracleResult('conjugate', not problems, detail, len(inputs))


def random_net(rng, input_dim, hidden_dim, zero_recurrent_means=False):
    """A network with random means and strictly positive variances."""
    def layer(rows, cols, zero_means=False):
        means = rng.normal(0.0, 0.7, size=(rows, cols))
        if zero_means:
            means[:, :-1] = 0.0
        return GaussianMatrix(means, rng.uniform(0.05, 0.5, size=(rows, cols)))

    return RecurrentBayesNet(
        layer(hidden_dim, input_dim + 1),
        layer(hidden_dim, hidden_dim + 1, zero_recurrent_means),
        layer(1, hidden_dim + 1),
        noise=GammaPosterior(rng.uniform(2.0, 10.0), rng.uniform(0.5, 5.0)))


def _perturbed(net, name, field, index, delta):
    layer = getattr(net, name)
    array = np.array(getattr(layer, field))
    array[index] += delta
    return net.replace(**{name: layer.replace(**{field: array})})


def finite_difference_suite(bank, nets=100, hidden_dim=3, length=4,
                            input_dim=2):
    """Reverse-sweep gradients against central differences of ``logZ_t``."""
    worst = 0.0
    problems = []
    for case in range(nets):
        rng = bank.generator('oracle-fd', case)
        net = random_net(rng, input_dim, hidden_dim)
        seq = ObservationSequence(rng.normal(size=(length, input_dim)))
        label = float(rng.integers(2))
        grads = sequence_gradients(net, seq, label)
        for name in net.LAYERS:
            for field, analytic in (('means', grads.means[name]),
                                    ('variances', grads.variances[name])):
                for index in np.ndindex(getattr(net, name).means.shape):
                    upper = step_log_partitions(
                        _perturbed(net, name, field, index, FD_STEP), seq,
                        label)
                    lower = step_log_partitions(
                        _perturbed(net, name, field, index, -FD_STEP), seq,
                        label)
                    numeric = (upper - lower) / (2.0 * FD_STEP)
                    exact = analytic[(slice(None),) + index]
                    scale = np.maximum(np.abs(exact), np.abs(numeric))
                    excess = np.abs(exact - numeric) - (FD_RTOL * scale +
                                                        FD_ATOL)
                    worst = max(worst, float(np.max(
                        np.abs(exact - numeric) / (scale + FD_ATOL))))
                    if np.any(excess > 0.0) and len(problems) < 5:
                        problems.append('net %d %s.%s%s' % (
                            case, name, field, index))
    detail = ('mismatch at ' + ', '.join(problems) if problems
              else 'max relative error %.3g' % worst)
    return OracleResult('finite-differences', not problems, detail, nets)


def sample_outputs(net, seq, rng, samples=MC_SAMPLES):
    """Final-step outputs of networks whose weights are redrawn every step.

    :rtype: :class:`numpy.ndarray`, ``(samples,)``
    """
    def draw(layer):
        return rng.normal(layer.means, np.sqrt(layer.variances),
                          size=(samples,) + layer.means.shape)

    hidden = np.zeros((samples, net.hidden_dim))
    ones = np.ones((samples, 1))
    inputs = np.append(seq.steps, np.ones((seq.length, 1)), axis=1)
    for t in range(seq.length):
        w_in = draw(net.recurrent_input)
        w_rec = draw(net.recurrent_hidden)
        previous = np.concatenate([hidden, ones], axis=1)
        hidden = (net.recurrent_input.scale *
                  np.einsum('shd,d->sh', w_in, inputs[t]) +
                  net.recurrent_hidden.scale *
                  np.einsum('shk,sk->sh', w_rec, previous))
    w_out = draw(net.readout)[:, 0, :]
    extended = np.concatenate([hidden, ones], axis=1)
    return net.readout.scale * np.einsum('sk,sk->s', w_out, extended)


def monte_carlo_suite(bank, nets=20, hidden_dim=3, length=3, input_dim=2,
                      samples=MC_SAMPLES):
    """Propagated moments against sampled weight rollouts.

    The recurrent transition means are zero, so hidden units stay
    uncorrelated and the propagated moments are exact.
    """
    worst = 0.0
    problems = []
    for case in range(nets):
        rng = bank.generator('oracle-mc', case)
        net = random_net(rng, input_dim, hidden_dim,
                         zero_recurrent_means=True)
        seq = ObservationSequence(rng.normal(size=(length, input_dim)))
        prediction = forward_sequence(net, seq)[1]
        outputs = sample_outputs(net, seq, rng, samples)
        mean = outputs.mean()
        squares = (outputs - mean) ** 2
        variance = squares.mean()
        mean_error = abs(mean - prediction.mean) / np.sqrt(
            variance / samples)
        variance_error = abs(variance - prediction.variance) / (
            squares.std() / np.sqrt(samples))
        worst = max(worst, mean_error, variance_error)
        if max(mean_error, variance_error) > MC_STANDARD_ERRORS:
            problems.append('net %d: %.2f / %.2f standard errors' % (
                case, mean_error, variance_error))
    detail = problems[0] if problems else (
        'max deviation %.2f standard errors' % worst)
    return OracleResult('monte-carlo', not problems, detail, nets)


def _tilted_integral(y, m, v, alpha, beta, power):
    def integrand(precision):
        return (precision ** power *
                stats.gamma.pdf(precision, alpha, scale=1.0 / beta) *
                stats.norm.pdf(y, m, np.sqrt(v + 1.0 / precision)))
    return integrate.quad(integrand, 0.0, np.inf, limit=200,
                          epsabs=0.0, epsrel=1e-10)[0]


def quadrature_suite(bank, cases=20):
    """The noise-posterior update against tilted moments by quadrature.

    The partition values are themselves integrated numerically, then the
    matched Gamma ``(E[g]^2 / Var[g], E[g] / Var[g])`` of the tilted
    precision distribution is compared with the update.
    """
    rng = bank.generator('oracle-quadrature')
    worst = 0.0
    problems = []
    # alpha = beta = 6, y = 0.3, m = 0, v = 0.2
    inputs = [(6.0, 6.0, 0.3, 0.0, 0.2)]
    inputs.extend(zip(rng.uniform(2.0, 10.0, cases - 1),
                      rng.uniform(0.5, 10.0, cases - 1),
                      rng.uniform(-1.0, 2.0, cases - 1),
                      rng.uniform(-0.5, 1.5, cases - 1),
                      rng.uniform(0.01, 1.0, cases - 1)))
    for alpha, beta, y, m, v in inputs:
        partition = PartitionTriple(*(
            np.log(_tilted_integral(y, m, v, alpha + shift, beta, 0))
            for shift in (0.0, 1.0, 2.0)))
        updated = update_noise_posterior(GammaPosterior(alpha, beta),
                                         partition)
        mass = _tilted_integral(y, m, v, alpha, beta, 0)
        first = _tilted_integral(y, m, v, alpha, beta, 1) / mass
        second = _tilted_integral(y, m, v, alpha, beta, 2) / mass
        spread = second - first * first
        expected = (first * first / spread, first / spread)
        error = max(abs(updated.alpha - expected[0]) / expected[0],
                    abs(updated.beta - expected[1]) / expected[1])
        worst = max(worst, error)
        if error > QUADRATURE_RTOL:
            problems.append('alpha=%.3f beta=%.3f: relative error %.3g' % (
                alpha, beta, error))
    detail = problems[0] if problems else 'max relative error %.3g' % worst
    return OracleResult('quadrature', not problems, detail, len(inputs))


SUITES = collections.OrderedDict([
    ('conjugate', conjugate_suite),
    ('finite-differences', finite_difference_suite),
    ('monte-carlo', monte_carlo_suite),
    ('quadrature', quadrature_suite),
])


def run_selftest(seed=0, suites=None):
    """Run the oracle suites.

    :type seed: int
    :param seed: master seed of the random cases.

    :type suites: list of str
    :param suites: (Optional) names from :data:`SUITES`; all by default.

    :rtype: list of :class:`OracleResult`
    """
    bank = SeedBank(seed)
    results = []
    for name in (suites or list(SUITES)):
        result = SUITES[name](bank)
        log = _LOGGER.info if result.passed else _LOGGER.error
        log('Oracle %s %s over %d cases: %s', name,
            'passed' if result.passed else 'FAILED', result.cases,
            result.detail)
        results.append(result)
    return results
