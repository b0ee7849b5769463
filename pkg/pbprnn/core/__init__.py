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

"""Gaussian-weight layer primitives shared by the Bayesian networks.

The main concepts are:

- :class:`~pbprnn.core.gaussian.GaussianMatrix`, a layer whose weights are
  independent Gaussians;

- :func:`~pbprnn.core.propagation.propagate_linear_gaussian`, which pushes
  activation moments through such a layer;

- :func:`~pbprnn.core.updates.pbp_update_weight` and friends, which fold a
  likelihood or prior factor back into the weight beliefs.
"""

from pbprnn.core.gaussian import GammaPosterior
from pbprnn.core.gaussian import GaussianMatrix
from pbprnn.core.gaussian import GaussianMoments
from pbprnn.core.gaussian import PartitionTriple
from pbprnn.core.gaussian import PriorSpec
from pbprnn.core.propagation import propagate_linear_gaussian
from pbprnn.core.propagation import propagate_relu_moments
from pbprnn.core.updates import UpdateCounters
from pbprnn.core.updates import VARIANCE_FLOOR
from pbprnn.core.updates import gaussian_log_density
from pbprnn.core.updates import incorporate_prior
from pbprnn.core.updates import log_marginal
from pbprnn.core.updates import partition_triple
from pbprnn.core.updates import pbp_update_weight
from pbprnn.core.updates import update_noise_posterior


__all__ = [
    'GammaPosterior', 'GaussianMatrix', 'GaussianMoments', 'PartitionTriple',
    'PriorSpec', 'UpdateCounters', 'VARIANCE_FLOOR', 'gaussian_log_density',
    'incorporate_prior', 'log_marginal', 'partition_triple',
    'pbp_update_weight', 'propagate_linear_gaussian',
    'propagate_relu_moments', 'update_noise_posterior',
]
