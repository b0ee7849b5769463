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

"""Deterministic two-body collision world and its input perturbations."""

from pbprnn.env.perturbations import apply_noise
from pbprnn.env.perturbations import drop_observations
from pbprnn.env.world import AgentState
from pbprnn.env.world import EpisodeResult
from pbprnn.env.world import Observation
from pbprnn.env.world import World
from pbprnn.env.world import WorldConfig
from pbprnn.env.world import collaborative_policy_step
from pbprnn.env.world import reset
from pbprnn.env.world import step


__all__ = [
    'AgentState',
    'EpisodeResult',
    'Observation',
    'World',
    'WorldConfig',
    'apply_noise',
    'collaborative_policy_step',
    'drop_observations',
    'reset',
    'step',
]
