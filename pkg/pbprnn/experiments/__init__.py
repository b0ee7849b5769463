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

"""Training protocol, evaluation battery and timing comparison.

The main concepts are:

- :class:`~pbprnn.experiments.config.RunConfig`, every knob of a run;

- :func:`~pbprnn.experiments.training.run_training` and
  :func:`~pbprnn.experiments.evaluation.run_scenario`, the two halves of an
  experiment;

- :class:`~pbprnn.experiments.runner.ExperimentRunner`, which repeats them
  and writes the result files.
"""

from pbprnn.experiments.config import RunConfig
from pbprnn.experiments.config import parse_config
from pbprnn.experiments.evaluation import MetricsRecord
from pbprnn.experiments.evaluation import Scenario
from pbprnn.experiments.evaluation import run_scenario
from pbprnn.experiments.runner import ExperimentRunner
from pbprnn.experiments.timing import timing_benchmark
from pbprnn.experiments.training import run_training


__all__ = [
    'ExperimentRunner', 'MetricsRecord', 'RunConfig', 'Scenario',
    'parse_config', 'run_scenario', 'run_training', 'timing_benchmark',
]
