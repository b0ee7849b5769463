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

"""Motion primitives and the uncertainty-penalized controller."""

from pbprnn.agent.mpc import CostWeights
from pbprnn.agent.mpc import EpsilonSchedule
from pbprnn.agent.mpc import decay_epsilon
from pbprnn.agent.mpc import evaluate_costs
from pbprnn.agent.mpc import select_action
from pbprnn.agent.primitives import MotionPrimitive
from pbprnn.agent.primitives import MotionPrimitiveSet
from pbprnn.agent.primitives import build_primitives


__all__ = [
    'CostWeights',
    'EpsilonSchedule',
    'MotionPrimitive',
    'MotionPrimitiveSet',
    'build_primitives',
    'decay_epsilon',
    'evaluate_costs',
    'select_action',
]
