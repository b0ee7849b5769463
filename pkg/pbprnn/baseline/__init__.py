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

"""LSTM ensemble baseline with Monte-Carlo dropout."""

from pbprnn.baseline.adam import AdamState
from pbprnn.baseline.ensemble import Ensemble
from pbprnn.baseline.ensemble import MdeTrainingStats
from pbprnn.baseline.ensemble import mc_predict
from pbprnn.baseline.ensemble import summarize_predictions
from pbprnn.baseline.ensemble import train_mde
from pbprnn.baseline.lstm import LstmNet
from pbprnn.baseline.lstm import lstm_forward


__all__ = [
    'AdamState',
    'Ensemble',
    'LstmNet',
    'MdeTrainingStats',
    'lstm_forward',
    'mc_predict',
    'summarize_predictions',
    'train_mde',
]
