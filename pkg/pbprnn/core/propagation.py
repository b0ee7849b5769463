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

"""Forward moment propagation through Gaussian-weight layers.

For a layer with mean matrix ``M``, variance matrix ``V`` and the
bias-extended input moments ``(a_m, a_v)`` the pre-activation moments are::

    out_m = k * M @ a_m
    out_v = k**2 * ((M * M) @ a_v + V @ (a_m * a_m + a_v))

with ``k = 1 / sqrt(cols)``. The reverse-mode helpers below return the
gradients of a scalar objective through that map; they accept a leading
batch axis on the upstream gradients so one sweep can carry the gradients
of several objectives at once.
"""

import numpy as np
from scipy import special

from pbprnn.core.gaussian import GaussianMoments
from pbprnn.exceptions import ContractError
from pbprnn.exceptions import NumericError


_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def extend_with_bias(moments):
    """Append the bias unit (mean 1, variance 0) to input moments.

    :type moments: :class:`~pbprnn.core.gaussian.GaussianMoments`
    :param moments: the layer input.

    :rtype: tuple of two :class:`numpy.ndarray`
    :returns: the extended means and variances.
    """
    means = np.append(moments.means, 1.0)
    variances = np.append(moments.variances, 0.0)
    return means, variances


def _check_input(layer, moments):
    if moments.size != layer.fan_in:
        raise ContractError(
            'layer expects %d inputs, got %d' % (layer.fan_in, moments.size))
    if not (np.all(np.isfinite(moments.means)) and
            np.all(np.isfinite(moments.variances))):
        raise NumericError('input moments contain non-finite entries')


def linear_moments(means, variances, in_means, in_variances):
    """Moment map on raw arrays, bias already appended to the inputs."""
    scale = 1.0 / np.sqrt(means.shape[1])
    out_means = scale * means.dot(in_means)
    out_variances = scale * scale * (
        (means * means).dot(in_variances) +
        variances.dot(in_means * in_means + in_variances))
    return out_means, out_variances


def propagate_linear_gaussian(layer, moments):
    """Propagate activation moments through a Gaussian-weight layer.

    :type layer: :class:`~pbprnn.core.gaussian.GaussianMatrix`
    :param layer: the layer belief.

    :type moments: :class:`~pbprnn.core.gaussian.GaussianMoments`
    :param moments: moments of the layer input, bias excluded.

    :rtype: :class:`~pbprnn.core.gaussian.GaussianMoments`
    :returns: the moments of the (linear) layer output.

    :raises: :class:`~pbprnn.exceptions.ContractError` on a dimension
             mismatch, :class:`~pbprnn.exceptions.NumericError` on
             non-finite inputs.
    """
    _check_input(layer, moments)
    in_means, in_variances = extend_with_bias(moments)
    out_means, out_variances = linear_moments(
        layer.means, layer.variances, in_means, in_variances)
    return GaussianMoments(out_means, np.maximum(out_variances, 0.0))


def linear_moments_backward(means, variances, in_means, in_variances,
                            grad_out_means, grad_out_variances):
    """Reverse-mode step through :func:`linear_moments`.

    ``grad_out_means`` and ``grad_out_variances`` have shape ``(rows,)`` or
    ``(batch, rows)``; every returned gradient carries the same leading
    batch axis.

    :rtype: tuple
    :returns: ``(grad_means, grad_variances, grad_in_means,
              grad_in_variances)``; the input gradients include the bias
              entry.
    """
    scale = 1.0 / np.sqrt(means.shape[1])
    scale2 = scale * scale
    in_second = in_means * in_means + in_variances
    grad_means = (
        scale * grad_out_means[..., :, None] * in_means +
        2.0 * scale2 * means * (grad_out_variances[..., :, None] *
                                in_variances))
    grad_variances = scale2 * grad_out_variances[..., :, None] * in_second
    grad_in_means = (
        scale * grad_out_means.dot(means) +
        2.0 * scale2 * in_means * grad_out_variances.dot(variances))
    grad_in_variances = scale2 * grad_out_variances.dot(
        means * means + variances)
    return grad_means, grad_variances, grad_in_means, grad_in_variances


def propagate_relu_moments(moments):
    """Moments of ``max(0, z)`` for ``z ~ N(mean, var)`` per unit.

    Deterministic units (variance 0) are rectified exactly.

    :type moments: :class:`~pbprnn.core.gaussian.GaussianMoments`
    :param moments: the pre-activation moments.

    :rtype: :class:`~pbprnn.core.gaussian.GaussianMoments`
    :returns: the rectified moments.
    """
    means = moments.means
    variances = moments.variances
    if not (np.all(np.isfinite(means)) and np.all(np.isfinite(variances))):
        raise NumericError('input moments contain non-finite entries')
    out_means = np.maximum(means, 0.0)
    out_variances = np.zeros_like(variances)
    random = variances > 0.0
    if np.any(random):
        mu = means[random]
        sigma = np.sqrt(variances[random])
        alpha = mu / sigma
        cdf = special.ndtr(alpha)
        pdf = _INV_SQRT_2PI * np.exp(-0.5 * alpha * alpha)
        first = mu * cdf + sigma * pdf
        second = (mu * mu + sigma * sigma) * cdf + mu * sigma * pdf
        out_means[random] = first
        out_variances[random] = np.maximum(second - first * first, 0.0)
    return GaussianMoments(out_means, out_variances)
