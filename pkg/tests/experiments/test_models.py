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

import math

import numpy as np
import pytest

from pbprnn.env.world import EpisodeResult
from pbprnn.env.world import Observation
from pbprnn.exceptions import UntrainedModelError
from pbprnn.experience import ExperiencePool
from pbprnn.experience import FeatureScaler
from pbprnn.experiments.config import MDE
from pbprnn.experiments.models import MdeModel
from pbprnn.experiments.models import PbpModel
from pbprnn.experiments.models import build_model
from pbprnn.experiments.models import load_model
from pbprnn.recurrent.network import ObservationSequence
from pbprnn.recurrent.network import forward_sequence
from pbprnn.recurrent.network import zero_pad
from pbprnn.seeding import SeedBank


@pytest.fixture
def batch(rng):
    pool = ExperiencePool()
    for collided in (True, False, False):
        rows = rng.normal(size=(5, 9))
        observations = tuple(Observation.from_features(row) for row in rows)
        pool.append_episode(EpisodeResult(observations, collided, False, 0.3,
                                          len(rows), ()))
    return pool.sample_balanced(6, rng)


@pytest.fixture
def window(rng):
    return ObservationSequence(rng.normal(size=(8, 9)))


@pytest.mark.parametrize('kind, cls', [('pbp_rnn', PbpModel),
                                       ('mde', MdeModel)])
def test_build_model(tiny_config, kind, cls, window):
    model = build_model(tiny_config.for_model(kind), 9, SeedBank(1))
    assert isinstance(model, cls)
    assert model.kind == kind
    assert not model.trained
    assert model.epochs_trained == 0
    with pytest.raises(UntrainedModelError):
        model.predict(window)


def test_build_model_is_seeded(tiny_config):
    first = build_model(tiny_config, 9, SeedBank(1))
    second = build_model(tiny_config, 9, SeedBank(1))
    assert first.net == second.net
    assert first.parameter_count() == 2 * (3 * 10 + 3 * 4 + 4)


class TestPbpModel(object):

    def test_fit_and_predict(self, tiny_config, batch, window, rng):
        model = build_model(tiny_config, 9, SeedBank(1))
        score = model.fit(batch, 2, rng)
        assert math.isfinite(score)
        assert model.trained
        assert model.epochs_trained == 2
        assert model.scaler is batch.scaler
        prediction = model.predict(window)
        assert math.isfinite(prediction.mean)
        assert prediction.total_variance >= prediction.variance >= 0.0
        assert model.training_summary()

    def test_padding_reaches_the_net_as_zeros(self, tiny_config, rng):
        model = build_model(tiny_config, 9, SeedBank(1))
        model.scaler = FeatureScaler(rng.normal(size=9),
                                     rng.uniform(0.5, 2.0, size=9))
        window = zero_pad(rng.normal(size=(3, 9)))
        expected = np.zeros((8, 9))
        expected[5:] = model.scaler.transform(window.steps[5:])
        assert model.predict(window) == forward_sequence(
            model.net, ObservationSequence(expected, 5))[1]

    def test_fit_without_epochs(self, tiny_config, batch, rng):
        model = build_model(tiny_config, 9, SeedBank(1))
        assert math.isnan(model.fit(batch, 0, rng))
        assert model.trained

    def test_save_and_load(self, tiny_config, batch, window, rng, tmp_path):
        model = build_model(tiny_config, 9, SeedBank(1))
        model.fit(batch, 1, rng)
        path = str(tmp_path / 'model.bin')
        model.save(path)
        loaded = load_model(path, SeedBank(2), 'pbp_rnn')
        assert isinstance(loaded, PbpModel)
        assert loaded.predict(window) == model.predict(window)

    def test_load_without_scaler(self, tiny_config, tmp_path):
        model = build_model(tiny_config, 9, SeedBank(1))
        path = str(tmp_path / 'model.bin')
        model.save(path)
        with pytest.raises(UntrainedModelError):
            load_model(path, SeedBank(2))


class TestMdeModel(object):

    def test_fit_and_predict(self, tiny_config, batch, window, rng):
        model = build_model(tiny_config.for_model(MDE), 9, SeedBank(1))
        loss = model.fit(batch, 2, rng)
        assert math.isfinite(loss) and loss >= 0.0
        assert model.epochs_trained == 2
        prediction = model.predict(window)
        assert math.isfinite(prediction.mean)
        assert prediction.variance >= 0.0

    def test_fork_shares_weights(self, tiny_config, batch, window, rng):
        model = build_model(tiny_config.for_model(MDE), 9, SeedBank(1))
        model.fit(batch, 1, rng)
        first = model.fork(np.random.default_rng(5))
        second = model.fork(np.random.default_rng(5))
        assert first.ensemble is model.ensemble
        assert first.epochs_trained == 1
        assert first.predict(window) == second.predict(window)

    def test_save_and_load(self, tiny_config, batch, window, rng, tmp_path):
        model = build_model(tiny_config.for_model(MDE), 9, SeedBank(1))
        model.fit(batch, 1, rng)
        path = str(tmp_path / 'mde.bin')
        model.save(path)
        loaded = load_model(path, SeedBank(2), MDE)
        assert isinstance(loaded, MdeModel)
        reference = model.fork(np.random.default_rng(8)).predict(window)
        restored = loaded.fork(np.random.default_rng(8)).predict(window)
        np.testing.assert_allclose(restored.mean, reference.mean)
        np.testing.assert_allclose(restored.variance, reference.variance)
