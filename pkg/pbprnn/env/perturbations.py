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

"""Input corruptions used by the robustness scenarios."""

import numpy as np

from pbprnn.exceptions import ContractError
from pbprnn.recurrent.network import ObservationSequence


def apply_noise(features, lambda_xi, rng):
    """Add scaled standard normal noise to every element.

    Noise is drawn even for ``lambda_xi == 0`` so the generator advances
    the same way at every level.

    :type features: :class:`numpy.ndarray` or
                    :class:`~pbprnn.recurrent.network.ObservationSequence`
    :param features: the observation matrix.

    :type lambda_xi: float
    :param lambda_xi: the noise scale, non-negative.

    :type rng: :class:`numpy.random.Generator`
    :param rng: the noise source.

    :rtype: same type as ``features``
    :returns: ``features + xi * lambda_xi``.
    """
    if not lambda_xi >= 0.0:
        raise ContractError('lambda_xi must be non-negative, got %r' % (
            lambda_xi,))
    if isinstance(features, ObservationSequence):
        return features.with_steps(apply_noise(features.steps, lambda_xi, rng))
    features = np.asarray(features, dtype=np.float64)
    return features + rng.standard_normal(features.shape) * lambda_xi


def drop_observations(seq, n_dropped, rng):
    """Zero ``n_dropped`` distinct rows chosen uniformly at random.

    :type seq: :class:`~pbprnn.recurrent.network.ObservationSequence`
    :param seq: the window.

    :type n_dropped: int
    :param n_dropped: number of rows to zero, at most ``seq.length``.

    :rtype: :class:`~pbprnn.recurrent.network.ObservationSequence`
    :returns: the corrupted window with the same padding bookkeeping.
    """
    if not 0 <= n_dropped <= seq.length:
        raise ContractError('cannot drop %r of %d observations' % (
            n_dropped, seq.length))
    rows = rng.choice(seq.length, size=int(n_dropped), replace=False)
    steps = np.array(seq.steps)
    steps[rows] = 0.0
    return seq.with_steps(steps)
