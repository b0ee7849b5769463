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

import numpy as np
import pytest

from pbprnn.baseline.ensemble import Ensemble
from pbprnn.baseline.ensemble import MdeTrainingStats
from pbprnn.baseline.ensemble import draw_masks
from pbprnn.baseline.ensemble import mc_predict
from pbprnn.baseline.ensemble import summarize_predictions
from pbprnn.baseline.ensemble import train_mde
from pbprnn.baseline.lstm import LstmNet
from pbprnn.baseline.lstm import lstm_forward
from pbprnn.exceptions import ContractError
from pbprnn.exceptions import EmptyDatasetError
from pbprnn.recurrent.network import ObservationSequence


class TestEnsemble(object):

    def test_initialize(self, rng):
        ensemble = Ensemble.initialize(9, rng)
        assert len(ensemble.members) == 5
        assert ensemble.prediction_count == 100
        assert ensemble.dropout_rate == 0.7
        assert ensemble.parameter_count() == 5 * 1681
        assert not np.array_equal(ensemble.members[0].input_weights,
                                  ensemble.members[1].input_weights)

    def test_validation(self, rng):
        with pytest.raises(ContractError):
            Ensemble([])
        with pytest.raises(ContractError):
            Ensemble([LstmNet.zeros(2, 3), LstmNet.zeros(2, 4)])
        with pytest.raises(ContractError):
            Ensemble([LstmNet.zeros(2, 3)], dropout_rate=1.0)
        with pytest.raises(ContractError):
            Ensemble([LstmNet.zeros(2, 3)], passes_per_member=0)

    def test_replace_keeps_settings(self):
        ensemble = Ensemble([LstmNet.zeros(2, 3)], dropout_rate=0.5,
                            passes_per_member=4, learning_rate=0.01)
        changed = ensemble.replace([LstmNet.zeros(2, 3)] * 2)
        assert changed.passes_per_member == 4
        assert changed.learning_rate == 0.01
        assert len(changed.members) == 2


class TestPrediction(object):

    def test_masks(self, rng):
        ensemble = Ensemble.initialize(2, rng, size=3, hidden_dim=50)
        masks = draw_masks(ensemble, rng)
        assert masks.shape == (3, 20, 50)
        assert set(np.unique(masks)) <= {0.0, 1.0}
        assert 0.2 < masks.mean() < 0.4

    def test_summarize(self):
        prediction = summarize_predictions([1.0, 2.0, 3.0])
        assert prediction.mean == 2.0
        assert prediction.variance == 1.0
        assert prediction.total_variance == 1.0
        assert summarize_predictions([0.4]).variance == 0.0
        with pytest.raises(ContractError):
            summarize_predictions([])

    def test_constant_members_have_no_spread(self, rng):
        ensemble = Ensemble([LstmNet.zeros(2, 3, readout_bias=0.5)] * 2)
        prediction = mc_predict(ensemble,
                                ObservationSequence(np.ones((8, 2))), rng)
        assert prediction.mean == pytest.approx(0.5)
        assert prediction.variance == pytest.approx(0.0, abs=1e-20)

    def test_serial_matches_batched(self, rng):
        ensemble = Ensemble.initialize(2, rng, size=2, hidden_dim=4)
        seq = ObservationSequence(rng.normal(size=(8, 2)))
        batched = mc_predict(ensemble, seq, np.random.default_rng(3))
        serial = mc_predict(ensemble, seq, np.random.default_rng(3),
                            serial=True)
        assert batched.mean == pytest.approx(serial.mean, rel=1e-12)
        assert batched.variance == pytest.approx(serial.variance, rel=1e-9,
                                                 abs=1e-15)

    def test_rejects_wrong_features(self, rng):
        ensemble = Ensemble.initialize(2, rng, size=1, hidden_dim=3)
        with pytest.raises(ContractError):
            mc_predict(ensemble, ObservationSequence(np.ones((8, 3))), rng)


class TestTraining(object):

    def test_overfits_single_example(self, rng):
        members = []
        for _ in range(2):
            member = LstmNet.initialize(2, hidden_dim=4, rng=rng)
            member.readout_weights[:] = 0.0
            member.readout_bias = np.array(0.5)
            members.append(member)
        ensemble = Ensemble(members, learning_rate=0.01)
        seq = ObservationSequence(rng.normal(size=(8, 2)))
        stats = MdeTrainingStats()
        trained = train_mde(ensemble, [(seq, 1.0)], 300, rng, stats=stats)
        assert stats.epochs == 300
        assert len(stats.epoch_loss[0]) == 2
        assert max(stats.epoch_loss[-1]) < 1e-3
        for member in trained.members:
            assert lstm_forward(member, seq) == pytest.approx(1.0, abs=0.05)
        # the input ensemble is left untouched
        assert float(ensemble.members[0].readout_bias) == 0.5

    def test_zero_epochs(self, rng):
        ensemble = Ensemble.initialize(2, rng, size=1, hidden_dim=3)
        seq = ObservationSequence(np.ones((8, 2)))
        assert train_mde(ensemble, [(seq, 1.0)], 0, rng) is ensemble

    def test_empty_dataset(self, rng):
        ensemble = Ensemble.initialize(2, rng, size=1, hidden_dim=3)
        with pytest.raises(EmptyDatasetError):
            train_mde(ensemble, [], 3, rng)
