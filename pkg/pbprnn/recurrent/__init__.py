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

"""The recurrent Bayesian collision predictor."""

from pbprnn.recurrent.network import ObservationSequence
from pbprnn.recurrent.network import PredictiveDistribution
from pbprnn.recurrent.network import RecurrentBayesNet
from pbprnn.recurrent.network import forward_sequence
from pbprnn.recurrent.network import zero_pad
from pbprnn.recurrent.training import TrainingStats
from pbprnn.recurrent.training import sequence_gradients
from pbprnn.recurrent.training import tbptt_update_sequence
from pbprnn.recurrent.training import train_epochs


__all__ = [
    'ObservationSequence', 'PredictiveDistribution', 'RecurrentBayesNet',
    'TrainingStats', 'forward_sequence', 'sequence_gradients',
    'tbptt_update_sequence', 'train_epochs', 'zero_pad',
]
