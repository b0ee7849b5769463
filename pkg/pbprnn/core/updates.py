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

"""Marginal likelihoods and moment-matching updates of Gaussian beliefs."""

import logging

import numpy as np

from pbprnn.core.gaussian import GammaPosterior
from pbprnn.core.gaussian import PartitionTriple
from pbprnn.exceptions import ContractError
from pbprnn.exceptions import NumericError


_LOGGER = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-10
"""Smallest variance a weight with a non-zero variance may reach."""

_LOG_2PI = np.log(2.0 * np.pi)


class UpdateCounters(object):
    """Counts of the numeric failure modes absorbed during training."""

    def __init__(self):
        self.clamp_events = 0
        self.rejected_noise_updates = 0
        self.skipped_sequences = 0

    def __repr__(self):
        return ('<UpdateCounters clamps=%d rejected=%d skipped=%d>' % (
            self.clamp_events, self.rejected_noise_updates,
            self.skipped_sequences))

    def merge(self, other):
        self.clamp_events += other.clamp_events
        self.rejected_noise_updates += other.rejected_noise_updates
        self.skipped_sequences += other.skipped_sequences

    def as_dict(self):
        return {
            'clamp_events': self.clamp_events,
            'rejected_noise_updates': self.rejected_noise_updates,
            'skipped_sequences': self.skipped_sequences,
        }


def gaussian_log_density(y, mean, variance):
    """Log density of ``N(y | mean, variance)``.

    :raises: :class:`~pbprnn.exceptions.NumericError` if ``variance <= 0``.
    """
    if not variance > 0.0:
        raise NumericError('total variance must be positive, got %r' % (
            variance,))
    residual = y - mean
    return -0.5 * (_LOG_2PI + np.log(variance)) - (
        residual * residual / (2.0 * variance))


def _scalar_prediction(prediction):
    if prediction.size != 1:
        raise ContractError(
            'marginal likelihood needs a scalar prediction, got %d units'
            % prediction.size)
    return float(prediction.means[0]), float(prediction.variances[0])


def log_marginal(y, prediction, noise):
    """Log marginal likelihood of a label under a propagated prediction.

    :type y: float
    :param y: the label.

    :type prediction: :class:`~pbprnn.core.gaussian.GaussianMoments`
    :param prediction: scalar output moments of a network.

    :type noise: :class:`~pbprnn.core.gaussian.GammaPosterior`
    :param noise: posterior over the noise precision.

    :rtype: float
    :returns: ``log N(y | m, v + beta / (alpha - 1))``.
    """
    mean, variance = _scalar_prediction(prediction)
    return gaussian_log_density(y, mean, variance + noise.noise_variance)


def log_marginal_gradients(y, mean, variance, noise_variance):
    """Derivatives of :func:`log_marginal` with respect to ``m`` and ``v``.

    Works element-wise on arrays.

    :rtype: tuple
    :returns: ``(dlogZ/dm, dlogZ/dv)``.
    """
    total = variance + noise_variance
    residual = y - mean
    grad_mean = residual / total
    grad_variance = 0.5 * (residual * residual / (total * total) - 1.0 / total)
    return grad_mean, grad_variance


def partition_triple(y, prediction, noise):
    """Evaluate :func:`log_marginal` at ``alpha``, ``alpha + 1``, ``alpha + 2``.

    :rtype: :class:`~pbprnn.core.gaussian.PartitionTriple`
    :returns: the three log partition values.
    """
    return PartitionTriple(
        log_marginal(y, prediction, noise),
        log_marginal(y, prediction, noise.shifted(1.0)),
        log_marginal(y, prediction, noise.shifted(2.0)))


def pbp_update_arrays(means, variances, grad_means, grad_variances,
                      v_min=VARIANCE_FLOOR):
    """Apply the moment-matching update to whole arrays of weights.

    Point masses (variance 0) are left untouched. Entries whose new variance
    falls below ``v_min`` are floored there.

    :rtype: tuple
    :returns: ``(new_means, new_variances, clamp_count)``.
    """
    new_means = means + variances * grad_means
    new_variances = variances - variances * variances * (
        grad_means * grad_means - 2.0 * grad_variances)
    live = variances > 0.0
    clamped = live & (new_variances < v_min)
    new_variances = np.where(clamped, v_min, new_variances)
    new_variances = np.where(live, new_variances, variances)
    return new_means, new_variances, int(np.count_nonzero(clamped))


def pbp_update_weight(m, v, dlogZ_dm, dlogZ_dv, v_min=VARIANCE_FLOOR,
                      counters=None):
    """Moment-matched update of a single Gaussian weight.

    ::

        m_new = m + v * dlogZ/dm
        v_new = v - v**2 * ((dlogZ/dm)**2 - 2 * dlogZ/dv)

    :type counters: :class:`UpdateCounters`
    :param counters: (Optional) receives a clamp event when the raw variance
                     update had to be floored.

    :rtype: tuple of two floats
    :returns: the new mean and variance.
    """
    if v < 0.0:
        raise ContractError('variance must be non-negative, got %r' % v)
    if not (np.isfinite(dlogZ_dm) and np.isfinite(dlogZ_dv)):
        raise NumericError('gradients must be finite')
    new_m, new_v, clamps = pbp_update_arrays(
        np.float64(m), np.float64(v), np.float64(dlogZ_dm),
        np.float64(dlogZ_dv), v_min=v_min)
    if counters is not None:
        counters.clamp_events += clamps
    return float(new_m), float(new_v)


def update_layer(layer, grad_means, grad_variances, v_min=VARIANCE_FLOOR,
                 counters=None):
    """Apply :func:`pbp_update_arrays` to a whole layer belief.

    :rtype: :class:`~pbprnn.core.gaussian.GaussianMatrix`
    :returns: the updated layer.
    """
    means, variances, clamps = pbp_update_arrays(
        layer.means, layer.variances, grad_means, grad_variances,
        v_min=v_min)
    if counters is not None:
        counters.clamp_events += clamps
    return layer.replace(means=means, variances=variances)


def update_noise_posterior(noise, partition, counters=None):
    """Moment-match the Gamma posterior over the noise precision.

    With ``r1 = exp(logZ2 - logZ1)`` and ``r0 = exp(logZ1 - logZ)``::

        alpha_new = 1 / (r1 / r0 * (alpha + 1) / alpha - 1)
        beta_new = 1 / (r1 * (alpha + 1) / beta - r0 * alpha / beta)

    An update that leaves the valid region (``alpha <= 1``, ``beta <= 0``,
    non-finite) is rejected: the old posterior is returned and the rejection
    is counted.

    :type noise: :class:`~pbprnn.core.gaussian.GammaPosterior`
    :param noise: the current posterior.

    :type partition: :class:`~pbprnn.core.gaussian.PartitionTriple`
    :param partition: log partition values at ``alpha``, ``+1``, ``+2``.

    :type counters: :class:`UpdateCounters`
    :param counters: (Optional) receives rejections.

    :rtype: :class:`~pbprnn.core.gaussian.GammaPosterior`
    :returns: the updated (or unchanged) posterior.
    """
    alpha, beta = noise
    with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
        r1 = np.exp(partition.logZ2 - partition.logZ1)
        r0 = np.exp(partition.logZ1 - partition.logZ)
        alpha_new = 1.0 / (r1 / r0 * (alpha + 1.0) / alpha - 1.0)
        beta_new = 1.0 / (r1 * (alpha + 1.0) / beta - r0 * alpha / beta)
    if (np.isfinite(alpha_new) and np.isfinite(beta_new) and
            alpha_new > 1.0 and beta_new > 0.0):
        return GammaPosterior(alpha_new, beta_new)
    _LOGGER.warning(
        'Rejected noise posterior update (alpha=%r, beta=%r) -> (%r, %r)',
        alpha, beta, float(alpha_new), float(beta_new))
    if counters is not None:
        counters.rejected_noise_updates += 1
    return noise


def prior_gradients(means, variances, prior):
    """Gradients of the prior factor's log partition ``log N(0 | m, v + 1/l)``.

    :rtype: tuple of two :class:`numpy.ndarray`
    :returns: ``(dlogZ/dm, dlogZ/dv)`` for every weight.
    """
    return log_marginal_gradients(
        0.0, means, variances, 1.0 / prior.expected_precision)


def incorporate_prior(layer, prior, v_min=VARIANCE_FLOOR, counters=None):
    """Multiply every weight belief by the zero-mean prior factor.

    The prior precision is ``E[lambda] = alpha_lambda / beta_lambda``; the
    update uses the same moment-matching rule as :func:`pbp_update_weight`,
    so the result is the exact product of the two Gaussians and variances
    never grow.

    :type layer: :class:`~pbprnn.core.gaussian.GaussianMatrix`
    :param layer: the layer belief.

    :type prior: :class:`~pbprnn.core.gaussian.PriorSpec`
    :param prior: the hyper-prior.

    :rtype: :class:`~pbprnn.core.gaussian.GaussianMatrix`
    :returns: the updated layer.
    """
    grad_means, grad_variances = prior_gradients(
        layer.means, layer.variances, prior)
    updated = update_layer(layer, grad_means, grad_variances, v_min=v_min,
                           counters=counters)
    # the product of two Gaussians never widens the belief
    return updated.replace(
        variances=np.minimum(updated.variances, layer.variances))
