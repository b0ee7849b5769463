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

"""The recurrent Bayesian network and its forward moment propagation.

The hidden state is a vector of Gaussian moments. At every step the
contribution of the input (``recurrent_input``) and of the previous hidden
state (``recurrent_hidden``) are propagated independently and summed under
a linear activation; a non-recurrent scalar readout turns the hidden
moments into the collision prediction.
"""

import collections

import numpy as np

from pbprnn.core.gaussian import GammaPosterior
from pbprnn.core.gaussian import GaussianMatrix
from pbprnn.core.gaussian import GaussianMoments
from pbprnn.core.gaussian import PriorSpec
from pbprnn.core.propagation import linear_moments
from pbprnn.core.updates import gaussian_log_density
from pbprnn.exceptions import ContractError
from pbprnn.exceptions import NumericError


DEFAULT_HIDDEN_DIM = 16
DEFAULT_SEQUENCE_LENGTH = 8

LOG_LIKELIHOOD_VARIANCE_FLOOR = 1e-12
"""Smallest total variance used when scoring a label."""


_ObservationSequenceTuple = collections.namedtuple(
    'ObservationSequence', ['steps', 'pad_count'])


class ObservationSequence(_ObservationSequenceTuple):
    """A fixed-length window of observations, oldest first.

    :type steps: array-like, shape ``(T, features)``
    :param steps: the observation rows.

    :type pad_count: int
    :param pad_count: number of leading rows that are zero padding.
    """
    __slots__ = ()

    def __new__(cls, steps, pad_count=0):
        steps = np.array(steps, dtype=np.float64)
        if steps.ndim != 2 or steps.shape[0] < 1:
            raise ContractError(
                'sequence needs a non-empty 2-D array, got shape %s' % (
                    steps.shape,))
        pad_count = int(pad_count)
        if not 0 <= pad_count <= steps.shape[0]:
            raise ContractError('pad_count %d outside [0, %d]' % (
                pad_count, steps.shape[0]))
        steps.setflags(write=False)
        return super(ObservationSequence, cls).__new__(cls, steps, pad_count)

    @property
    def length(self):
        """Number of time steps ``T``."""
        return self.steps.shape[0]

    @property
    def features(self):
        """Number of features per step."""
        return self.steps.shape[1]

    def with_steps(self, steps):
        """Same padding bookkeeping, new rows."""
        return ObservationSequence(steps, self.pad_count)


def zero_pad(steps, length=DEFAULT_SEQUENCE_LENGTH):
    """Left-pad a list of observation rows with zeros up to ``length``.

    :type steps: sequence of array-like
    :param steps: between 1 and ``length`` observation rows, oldest first.

    :type length: int
    :param length: the window length ``T``.

    :rtype: :class:`ObservationSequence`
    :returns: the padded window.

    :raises: :class:`~pbprnn.exceptions.ContractError` for an empty list or
             more than ``length`` rows.
    """
    rows = np.atleast_2d(np.asarray(steps, dtype=np.float64))
    if len(steps) == 0 or rows.shape[0] == 0:
        raise ContractError('cannot pad an empty observation list')
    if rows.shape[0] > length:
        raise ContractError('%d observations exceed the window of %d' % (
            rows.shape[0], length))
    pad_count = length - rows.shape[0]
    padded = np.zeros((length, rows.shape[1]))
    padded[pad_count:] = rows
    return ObservationSequence(padded, pad_count)


_PredictiveTuple = collections.namedtuple(
    'PredictiveDistribution', ['mean', 'variance', 'total_variance'])


class PredictiveDistribution(_PredictiveTuple):
    """Collision score with its epistemic and total variance."""
    __slots__ = ()

    def __new__(cls, mean, variance, total_variance=None):
        mean = float(mean)
        variance = float(variance)
        total_variance = (variance if total_variance is None
                          else float(total_variance))
        if not all(np.isfinite(value)
                   for value in (mean, variance, total_variance)):
            raise NumericError('predictive moments must be finite')
        if variance < 0.0 or total_variance < variance:
            raise ContractError(
                'need total_variance >= variance >= 0, got %r, %r' % (
                    total_variance, variance))
        return super(PredictiveDistribution, cls).__new__(
            cls, mean, variance, total_variance)

    def log_likelihood(self, label):
        """Gaussian log density of ``label`` under the total variance."""
        return gaussian_log_density(
            label, self.mean,
            max(self.total_variance, LOG_LIKELIHOOD_VARIANCE_FLOOR))


class RecurrentBayesNet(object):
    """Recurrent network with Gaussian weights and a Gaussian readout.

    :type recurrent_input: :class:`~pbprnn.core.gaussian.GaussianMatrix`
    :param recurrent_input: ``hidden x (input + 1)`` input weights.

    :type recurrent_hidden: :class:`~pbprnn.core.gaussian.GaussianMatrix`
    :param recurrent_hidden: ``hidden x (hidden + 1)`` transition weights.

    :type readout: :class:`~pbprnn.core.gaussian.GaussianMatrix`
    :param readout: ``1 x (hidden + 1)`` output weights.

    :type noise: :class:`~pbprnn.core.gaussian.GammaPosterior`
    :param noise: posterior over the label noise precision.

    :type prior: :class:`~pbprnn.core.gaussian.PriorSpec`
    :param prior: hyper-prior over the weight prior precision.
    """

    LAYERS = ('recurrent_input', 'recurrent_hidden', 'readout')

    def __init__(self, recurrent_input, recurrent_hidden, readout,
                 noise=None, prior=None):
        hidden_dim = recurrent_input.rows
        if hidden_dim < 1:
            raise ContractError('hidden_dim must be at least 1')
        if recurrent_hidden.rows != hidden_dim or (
                recurrent_hidden.fan_in != hidden_dim):
            raise ContractError(
                'recurrent_hidden must be %dx%d, got %dx%d' % (
                    hidden_dim, hidden_dim + 1, recurrent_hidden.rows,
                    recurrent_hidden.cols))
        if readout.rows != 1 or readout.fan_in != hidden_dim:
            raise ContractError('readout must be 1x%d, got %dx%d' % (
                hidden_dim + 1, readout.rows, readout.cols))
        self.recurrent_input = recurrent_input
        self.recurrent_hidden = recurrent_hidden
        self.readout = readout
        self.noise = GammaPosterior() if noise is None else noise
        self.prior = PriorSpec() if prior is None else prior

    def __repr__(self):
        return '<RecurrentBayesNet input=%d hidden=%d noise=%r>' % (
            self.input_dim, self.hidden_dim, tuple(self.noise))

    def __eq__(self, other):
        if not isinstance(other, RecurrentBayesNet):
            return NotImplemented
        return (self.layers() == other.layers() and
                tuple(self.noise) == tuple(other.noise) and
                tuple(self.prior) == tuple(other.prior))

    __hash__ = None

    @property
    def input_dim(self):
        return self.recurrent_input.fan_in

    @property
    def hidden_dim(self):
        return self.recurrent_input.rows

    @classmethod
    def initialize(cls, input_dim, hidden_dim=DEFAULT_HIDDEN_DIM, rng=None,
                   noise=None, prior=None):
        """Draw a fresh network belief.

        :type rng: :class:`numpy.random.Generator`
        :param rng: source of the initial weight means.

        :rtype: :class:`RecurrentBayesNet`
        :returns: the network.
        """
        if rng is None:
            rng = np.random.default_rng()
        return cls(
            GaussianMatrix.initialize(hidden_dim, input_dim, rng),
            GaussianMatrix.initialize(hidden_dim, hidden_dim, rng),
            GaussianMatrix.initialize(1, hidden_dim, rng),
            noise=noise, prior=prior)

    def layers(self):
        """The three layer beliefs in checkpoint order."""
        return (self.recurrent_input, self.recurrent_hidden, self.readout)

    def replace(self, **changes):
        """Return a copy with some components swapped."""
        fields = {
            'recurrent_input': self.recurrent_input,
            'recurrent_hidden': self.recurrent_hidden,
            'readout': self.readout,
            'noise': self.noise,
            'prior': self.prior,
        }
        unknown = set(changes) - set(fields)
        if unknown:
            raise ContractError('unknown components: %s' % sorted(unknown))
        fields.update(changes)
        return RecurrentBayesNet(**fields)

    def parameter_count(self):
        """Number of stored scalars (means and variances)."""
        return sum(2 * layer.means.size for layer in self.layers())


class ForwardTrace(object):
    """Everything the reverse sweep needs from a forward pass.

    Row ``t`` of each array belongs to time step ``t`` (0-based).
    """

    def __init__(self, length, input_dim, hidden_dim):
        self.input_means = np.zeros((length, input_dim + 1))
        self.input_variances = np.zeros((length, input_dim + 1))
        self.previous_means = np.zeros((length, hidden_dim + 1))
        self.previous_variances = np.zeros((length, hidden_dim + 1))
        self.hidden_means = np.zeros((length, hidden_dim + 1))
        self.hidden_variances = np.zeros((length, hidden_dim + 1))
        self.output_means = np.zeros(length)
        self.output_variances = np.zeros(length)

    @property
    def length(self):
        return self.output_means.shape[0]


def _check_sequence(net, seq):
    if seq.features != net.input_dim:
        raise ContractError('network expects %d features, got %d' % (
            net.input_dim, seq.features))
    if not np.all(np.isfinite(seq.steps)):
        raise NumericError('sequence contains non-finite entries')


def trace_sequence(net, seq):
    """Run the forward recursion and keep the intermediate moments.

    :rtype: :class:`ForwardTrace`
    :returns: per-step bias-extended layer inputs and outputs.
    """
    _check_sequence(net, seq)
    trace = ForwardTrace(seq.length, net.input_dim, net.hidden_dim)
    hidden_means = np.zeros(net.hidden_dim)
    hidden_variances = np.zeros(net.hidden_dim)
    inp = net.recurrent_input
    rec = net.recurrent_hidden
    out = net.readout
    for t in range(seq.length):
        trace.input_means[t, :-1] = seq.steps[t]
        trace.input_means[t, -1] = 1.0
        trace.previous_means[t, :-1] = hidden_means
        trace.previous_means[t, -1] = 1.0
        trace.previous_variances[t, :-1] = hidden_variances
        from_input = linear_moments(
            inp.means, inp.variances,
            trace.input_means[t], trace.input_variances[t])
        from_hidden = linear_moments(
            rec.means, rec.variances,
            trace.previous_means[t], trace.previous_variances[t])
        hidden_means = from_input[0] + from_hidden[0]
        hidden_variances = from_input[1] + from_hidden[1]
        trace.hidden_means[t, :-1] = hidden_means
        trace.hidden_means[t, -1] = 1.0
        trace.hidden_variances[t, :-1] = hidden_variances
        output = linear_moments(
            out.means, out.variances,
            trace.hidden_means[t], trace.hidden_variances[t])
        trace.output_means[t] = output[0][0]
        trace.output_variances[t] = output[1][0]
    if not (np.all(np.isfinite(trace.output_means)) and
            np.all(np.isfinite(trace.output_variances))):
        raise NumericError('forward pass overflowed')
    return trace


def forward_sequence(net, seq):
    """Propagate a window through the network.

    :type net: :class:`RecurrentBayesNet`
    :param net: the network belief.

    :type seq: :class:`ObservationSequence`
    :param seq: the input window.

    :rtype: tuple
    :returns: the list of per-step output moments and the
              :class:`PredictiveDistribution` at the final step.
    """
    trace = trace_sequence(net, seq)
    outputs = [
        GaussianMoments(trace.output_means[t:t + 1],
                        np.maximum(trace.output_variances[t:t + 1], 0.0))
        for t in range(trace.length)]
    variance = max(float(trace.output_variances[-1]), 0.0)
    prediction = PredictiveDistribution(
        trace.output_means[-1], variance,
        variance + net.noise.noise_variance)
    return outputs, prediction
