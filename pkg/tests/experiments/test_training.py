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

from pbprnn.experiments.config import MDE
from pbprnn.experiments.episodes import history_window
from pbprnn.experiments.training import run_training
from pbprnn.seeding import SeedBank


def _without_scores(curves):
    return [{key: value for key, value in point.items() if key != 'score'}
            for point in curves]


@pytest.fixture(scope='module')
def outcome(tiny_config):
    return run_training(tiny_config, SeedBank(tiny_config.seed))


class TestProtocol(object):

    def test_runs_until_exploration_ends(self, outcome):
        assert outcome.episodes == 114
        assert outcome.schedule.terminal
        assert outcome.schedule.epsilon == 0.0

    def test_retrains_every_interval(self, outcome):
        curves = outcome.curves
        assert len(curves) == 12
        episodes = [point['episodes'] for point in curves]
        assert episodes == list(range(0, 111, 10))
        assert [point['round'] for point in curves] == list(range(12))
        assert curves[0]['epsilon'] == 1.0
        assert curves[-1]['cumulative_epochs'] == 12
        assert outcome.model.epochs_trained == 12
        assert outcome.model.trained

    def test_pool_holds_every_step(self, outcome):
        pool = outcome.pool
        assert len(pool) >= 4 + 114
        assert pool.feature_stats.count == len(pool)
        assert outcome.curves[-1]['positives'] + \
            outcome.curves[-1]['negatives'] <= len(pool)

    def test_reproducible(self, tiny_config, outcome):
        again = run_training(tiny_config, SeedBank(tiny_config.seed))
        assert _without_scores(again.curves) == _without_scores(outcome.curves)
        np.testing.assert_array_equal(
            [point['score'] for point in again.curves],
            [point['score'] for point in outcome.curves])
        assert again.model.net == outcome.model.net


def test_reports_controlled_episodes(tiny_config):
    config = tiny_config._replace(seed_episodes=2)
    seen = []
    run_training(config, SeedBank(5),
                 on_episode=lambda number, result, decisions: seen.append(
                     (number, result.steps_taken, decisions)))
    assert [number for number, _, _ in seen] == list(range(1, 115))
    for _, steps, decisions in seen:
        assert [step for step, _, _ in decisions] == list(range(steps))
        assert all(len(costs) == 11 for _, costs, _ in decisions)


def test_baseline_protocol(tiny_config):
    outcome = run_training(tiny_config.for_model(MDE), SeedBank(6))
    assert outcome.episodes == 114
    assert outcome.model.kind == MDE
    assert outcome.model.epochs_trained == 12
    assert np.isfinite(outcome.curves[-1]['score'])


def test_history_window():
    rows = [np.full(9, float(value)) for value in range(1, 11)]
    current = np.full(9, 99.0)
    window = history_window(rows, current, 8)
    assert window.length == 8
    assert window.pad_count == 0
    np.testing.assert_array_equal(window.steps[:, 0],
                                  [4, 5, 6, 7, 8, 9, 10, 99])
    short = history_window(rows[:2], current, 8)
    assert short.pad_count == 5
    np.testing.assert_array_equal(short.steps[5:, 0], [1, 2, 99])
    np.testing.assert_array_equal(short.steps[:5], np.zeros((5, 9)))
