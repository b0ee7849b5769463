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

import pytest

from pbprnn.experiments.config import RunConfig


@pytest.fixture(scope='session')
def tiny_config():
    return RunConfig.default()._replace(
        seed=3,
        seed_episodes=4,
        max_steps=6,
        batch_size=8,
        hidden_dim=3,
        initial_epochs=1,
        subsequent_epochs=1,
        eval_episodes=2,
        repetitions=2,
        sweep_episodes=1,
        noise_levels=(0.0, 0.01),
        drop_levels=(0, 4),
        ensemble_size=2,
        passes_per_member=3,
        timing_queries=10,
    )
