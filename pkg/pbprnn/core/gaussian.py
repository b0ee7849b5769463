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

"""Value types holding factorized Gaussian beliefs.

Every weight of a network is an independent one dimensional Gaussian. A
layer is stored as a pair of matrices (means, variances); the last column
of each layer holds the bias, whose input is the constant 1.
"""

import collections

import numpy as np

from pbprnn.exceptions import ContractError
from pbprnn.exceptions import NumericError


DEFAULT_NOISE_ALPHA = 6.0
DEFAULT_NOISE_BETA = 6.0
DEFAULT_PRIOR_ALPHA = 6.0
DEFAULT_PRIOR_BETA = 6.0


def _as_float_array(value, name):
    array = np.array(value, dtype=np.float64)
    if not np.all(np.isfinite(array)):
        raise NumericError('%s contains non-finite entries' % name)
    return array


class GaussianMatrix(object):
    """A weight matrix whose entries are independent Gaussians.

    Arrays are copied on construction and marked read-only; updates return
    new instances.

    :type means: array-like, shape ``(rows, cols)``
    :param means: the weight means, bias column last.

    :type variances: array-like, shape ``(rows, cols)``
    :param variances: the weight variances, non-negative.
    """
    def __init__(self, means, variances):
        means = _as_float_array(means, 'means')
        variances = _as_float_array(variances, 'variances')
        if means.ndim != 2:
            raise ContractError(
                'GaussianMatrix needs 2-D arrays, got %d-D' % means.ndim)
        if means.shape != variances.shape:
            raise ContractError(
                'means %s and variances %s differ in shape' % (
                    means.shape, variances.shape))
        if means.shape[1] < 1:
            raise ContractError('GaussianMatrix needs a bias column')
        if np.any(variances < 0.0):
            raise ContractError('variances must be non-negative')
        means.setflags(write=False)
        variances.setflags(write=False)
        self._means = means
        self._variances = variances

    def __repr__(self):
        return '<GaussianMatrix %dx%d>' % (self.rows, self.cols)

    def __eq__(self, other):
        if not isinstance(other, GaussianMatrix):
            return NotImplemented
        return (np.array_equal(self._means, other._means) and
                np.array_equal(self._variances, other._variances))

    __hash__ = None

    @property
    def means(self):
        """Mean matrix (read-only view).

        :rtype: :class:`numpy.ndarray`
        :returns: the weight means.
        """
        return self._means

    @property
    def variances(self):
        """Variance matrix (read-only view).

        :rtype: :class:`numpy.ndarray`
        :returns: the weight variances.
        """
        return self._variances

    @property
    def rows(self):
        """Number of output units."""
        return self._means.shape[0]

    @property
    def cols(self):
        """Number of inputs, bias column included."""
        return self._means.shape[1]

    @property
    def fan_in(self):
        """Number of inputs, bias column excluded."""
        return self.cols - 1

    @property
    def scale(self):
        """Pre-activation scale factor ``1 / sqrt(cols)``."""
        return 1.0 / np.sqrt(self.cols)

    @classmethod
    def initialize(cls, rows, fan_in, rng):
        """Draw an initial belief for a layer.

        Means are sampled from ``N(0, 1 / (fan_in + 1))`` and every variance
        starts at ``1 / (fan_in + 1)``.

        :type rows: int
        :param rows: number of output units.

        :type fan_in: int
        :param fan_in: number of inputs, bias excluded.

        :type rng: :class:`numpy.random.Generator`
        :param rng: source of randomness.

        :rtype: :class:`GaussianMatrix`
        :returns: a fresh layer belief.
        """
        if rows < 1 or fan_in < 0:
            raise ContractError(
                'invalid layer dimensions %r x %r' % (rows, fan_in))
        cols = fan_in + 1
        spread = 1.0 / cols
        means = rng.normal(0.0, np.sqrt(spread), size=(rows, cols))
        variances = np.full((rows, cols), spread)
        return cls(means, variances)

    @classmethod
    def zeros(cls, rows, fan_in):
        """A layer of point masses at zero."""
        shape = (rows, fan_in + 1)
        return cls(np.zeros(shape), np.zeros(shape))

    def replace(self, means=None, variances=None):
        """Return a copy with the given arrays swapped in."""
        return GaussianMatrix(
            self._means if means is None else means,
            self._variances if variances is None else variances)


_GaussianMomentsTuple = collections.namedtuple(
    'GaussianMoments', ['means', 'variances'])


class GaussianMoments(_GaussianMomentsTuple):
    """Per-unit Gaussian activation moments (means and variances)."""
    __slots__ = ()

    def __new__(cls, means, variances):
        means = np.atleast_1d(np.asarray(means, dtype=np.float64))
        variances = np.atleast_1d(np.asarray(variances, dtype=np.float64))
        if means.shape != variances.shape or means.ndim != 1:
            raise ContractError(
                'moments need equal-length vectors, got %s and %s' % (
                    means.shape, variances.shape))
        if np.any(variances < 0.0):
            raise ContractError('moment variances must be non-negative')
        return super(GaussianMoments, cls).__new__(cls, means, variances)

    @classmethod
    def deterministic(cls, values):
        """Moments of a point mass at ``values``."""
        values = np.atleast_1d(np.asarray(values, dtype=np.float64))
        return cls(values, np.zeros_like(values))

    @property
    def size(self):
        return self.means.shape[0]


_PriorSpecTuple = collections.namedtuple(
    'PriorSpec', ['alpha_lambda', 'beta_lambda'])


class PriorSpec(_PriorSpecTuple):
    """Gamma hyper-prior over the prior precision of every weight."""
    __slots__ = ()

    def __new__(cls, alpha_lambda=DEFAULT_PRIOR_ALPHA,
                beta_lambda=DEFAULT_PRIOR_BETA):
        alpha_lambda = float(alpha_lambda)
        beta_lambda = float(beta_lambda)
        if not (alpha_lambda > 0.0 and beta_lambda > 0.0):
            raise ContractError(
                'prior hyper-parameters must be positive, got (%r, %r)' % (
                    alpha_lambda, beta_lambda))
        return super(PriorSpec, cls).__new__(cls, alpha_lambda, beta_lambda)

    @property
    def expected_precision(self):
        """``E[lambda] = alpha_lambda / beta_lambda``."""
        return self.alpha_lambda / self.beta_lambda


_GammaPosteriorTuple = collections.namedtuple(
    'GammaPosterior', ['alpha', 'beta'])


class GammaPosterior(_GammaPosteriorTuple):
    """Gamma posterior over the observation noise precision."""
    __slots__ = ()

    def __new__(cls, alpha=DEFAULT_NOISE_ALPHA, beta=DEFAULT_NOISE_BETA):
        alpha = float(alpha)
        beta = float(beta)
        if not (np.isfinite(alpha) and np.isfinite(beta)):
            raise NumericError('noise posterior must be finite')
        if not (alpha > 1.0 and beta > 0.0):
            raise ContractError(
                'noise posterior needs alpha > 1 and beta > 0, got (%r, %r)'
                % (alpha, beta))
        return super(GammaPosterior, cls).__new__(cls, alpha, beta)

    @property
    def noise_variance(self):
        """Expected inverse precision ``beta / (alpha - 1)``."""
        return self.beta / (self.alpha - 1.0)

    def shifted(self, offset):
        """The same posterior with ``alpha`` raised by ``offset``.

        Used to evaluate the marginal likelihood at ``alpha + 1`` and
        ``alpha + 2``.
        """
        return GammaPosterior(self.alpha + offset, self.beta)


_PartitionTripleTuple = collections.namedtuple(
    'PartitionTriple', ['logZ', 'logZ1', 'logZ2'])


class PartitionTriple(_PartitionTripleTuple):
    """Log marginal likelihood at ``alpha``, ``alpha + 1``, ``alpha + 2``."""
    __slots__ = ()

    def __new__(cls, logZ, logZ1, logZ2):
        values = (float(logZ), float(logZ1), float(logZ2))
        if not all(np.isfinite(value) for value in values):
            raise NumericError('partition values must be finite: %r' % (
                values,))
        return super(PartitionTriple, cls).__new__(cls, *values)

    @classmethod
    def mean_of(cls, triples):
        """Average a non-empty collection of triples component-wise."""
        triples = list(triples)
        if not triples:
            raise ContractError('cannot average an empty list of partitions')
        stacked = np.array(triples, dtype=np.float64)
        return cls(*stacked.mean(axis=0))
