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

from pbprnn.recurrent.network import PredictiveDistribution


class ConstantModel(object):
    """A trained-looking model that always predicts the same thing."""

    trained = True

    def __init__(self, mean=0.2, variance=0.01, noise=0.1):
        self.prediction = PredictiveDistribution(mean, variance,
                                                 variance + noise)
        self.queries = 0

    def fork(self, rng):
        return self

    def predict(self, seq):
        self.queries += 1
        return self.prediction
