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

from pbprnn.agent.mpc import COST_TRACE_HEADER
from pbprnn.agent.mpc import CostWeights
from pbprnn.agent.mpc import EpsilonSchedule
from pbprnn.agent.mpc import HEADING_FEATURE
from pbprnn.agent.mpc import candidate_sequence
from pbprnn.agent.mpc import cost_trace_rows
from pbprnn.agent.mpc import decay_epsilon
from pbprnn.agent.mpc import evaluate_costs
from pbprnn.agent.mpc import mpc_cost
from pbprnn.agent.mpc import random_primitive
from pbprnn.agent.mpc import select_action
from pbprnn.agent.primitives import build_primitives
from pbprnn.exceptions import ContractError
from pbprnn.exceptions import NumericError
from pbprnn.recurrent.network import PredictiveDistribution
from pbprnn.recurrent.network import zero_pad


class HeadingModel(object):
    """Predicts a collision score that grows with the final heading."""

    def __init__(self, slope=1.0, variance=0.01):
        self.slope = slope
        self.variance = variance
        self.queries = []

    def predict(self, seq):
        heading = seq.steps[-1, HEADING_FEATURE]
        self.queries.append(seq)
        return PredictiveDistribution(self.slope * heading, self.variance,
                                      2.0 * self.variance)


class MirrorModel(object):
    """Scores that do not change when the scene is mirrored about x = 0."""

    def predict(self, seq):
        row = seq.steps[-1]
        lean = row[HEADING_FEATURE] - 0.3 * row[0]
        spread = 0.01 * (1.0 + (row[HEADING_FEATURE] + 0.5 * row[6]) ** 2)
        return PredictiveDistribution(0.2 * lean ** 2, spread, 0.05 + spread)


MIRRORED_FEATURES = [0, 2, 4, 6, HEADING_FEATURE]


def _history(rng):
    return zero_pad(rng.normal(size=(3, 9)))


class TestEpsilon(object):

    def test_decay(self):
        schedule = decay_epsilon(EpsilonSchedule())
        assert schedule.epsilon == pytest.approx(0.98)
        assert schedule.decays == 1
        assert not schedule.terminal

    def test_terminal_after_114_decays(self):
        schedule = EpsilonSchedule()
        for count in range(1, 200):
            schedule = decay_epsilon(schedule)
            if schedule.terminal:
                break
        assert count == 114
        assert schedule.epsilon == 0.0
        assert schedule.decays == 114
        assert decay_epsilon(schedule) == schedule

    def test_validation(self):
        with pytest.raises(ContractError):
            EpsilonSchedule(1.5)


class TestCosts(object):

    def test_mpc_cost(self):
        weights = CostWeights()
        assert mpc_cost(0.5, 0.1, 0.2, weights, 0.0) == pytest.approx(
            200.0 * 0.1 + 25.0 * 0.5 + 3.0 * 0.2)
        assert mpc_cost(0.5, 0.1, 0.2, weights, 1.0) == pytest.approx(
            25.0 * 0.5 + 3.0 * 0.2)

    def test_weights_validation(self):
        with pytest.raises(ContractError):
            CostWeights(lambda_c=-1.0)
        assert CostWeights().scaled(2.0) == (50.0, 400.0, 6.0)

    def test_argmin_ignores_positive_weight_scaling(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            p_coll, v_coll, d_goal = rng.uniform(0.0, 1.0, size=(3, 11))
            weights = CostWeights(*rng.uniform(0.0, 300.0, size=3))
            epsilon = rng.uniform(0.0, 1.0)
            factor = rng.uniform(0.01, 100.0)
            base = mpc_cost(p_coll, v_coll, d_goal, weights, epsilon)
            scaled = mpc_cost(p_coll, v_coll, d_goal, weights.scaled(factor),
                              epsilon)
            assert np.argmin(scaled) == np.argmin(base)

    def test_cost_never_falls_as_variance_grows(self):
        rng = np.random.default_rng(2025)
        for _ in range(1000):
            weights = CostWeights(*rng.uniform(0.0, 300.0, size=3))
            p_coll, d_goal, epsilon = rng.uniform(0.0, 1.0, size=3)
            low, high = np.sort(rng.uniform(0.0, 1.0, size=2))
            assert (mpc_cost(p_coll, high, d_goal, weights, epsilon) >=
                    mpc_cost(p_coll, low, d_goal, weights, epsilon))

    def test_costs_use_total_variance(self, rng):
        costs = evaluate_costs(HeadingModel(variance=0.03), _history(rng),
                               build_primitives(), CostWeights(0.0, 1.0, 0.0),
                               0.0, (0.0, -0.25), (0.0, 0.25))
        assert all(item.v_coll == 0.06 for item in costs)
        assert all(item.cost == pytest.approx(0.06) for item in costs)

    def test_mirrored_scene_mirrors_the_choice(self):
        rng = np.random.default_rng(2026)
        primitives = build_primitives()
        flip = np.ones(9)
        flip[MIRRORED_FEATURES] = -1.0
        model = MirrorModel()
        for _ in range(1000):
            history = zero_pad(rng.normal(size=(int(rng.integers(1, 9)), 9)))
            mirrored = history.with_steps(history.steps * flip)
            position = rng.uniform(-0.3, 0.3, size=2)
            goal = rng.uniform(-0.3, 0.3, size=2)
            weights = CostWeights(*rng.uniform(0.0, 300.0, size=3))
            epsilon = rng.uniform(0.0, 1.0)
            costs = [item.cost for item in evaluate_costs(
                model, history, primitives, weights, epsilon, position, goal)]
            mirror_costs = [item.cost for item in evaluate_costs(
                model, mirrored, primitives, weights, epsilon,
                position * [-1.0, 1.0], goal * [-1.0, 1.0])]
            np.testing.assert_allclose(mirror_costs[::-1], costs,
                                       rtol=1e-9, atol=1e-12)
            chosen = select_action(costs, EpsilonSchedule(0.0), rng)
            assert select_action(mirror_costs, EpsilonSchedule(0.0),
                                 rng) == primitives.mirror_index(chosen)

    def test_candidate_sequence_replaces_final_heading(self, rng):
        history = _history(rng)
        candidate = candidate_sequence(history, 0.4)
        assert candidate.steps[-1, HEADING_FEATURE] == 0.4
        np.testing.assert_array_equal(candidate.steps[:-1],
                                      history.steps[:-1])
        assert candidate.pad_count == history.pad_count

    def test_evaluate_costs_matches_brute_force(self, rng):
        primitives = build_primitives()
        weights = CostWeights()
        model = HeadingModel(slope=-0.3)
        position = np.array([0.0, -0.25])
        goal = np.array([0.0, 0.25])
        for epsilon in (0.0, 0.5):
            costs = evaluate_costs(model, _history(rng), primitives, weights,
                                   epsilon, position, goal)
            assert len(costs) == len(primitives)
            expected = []
            for primitive in primitives:
                end = position + primitive.displacement(position, goal)
                expected.append(
                    (1.0 - epsilon) * 200.0 * 0.02 +
                    25.0 * (-0.3 * primitive.heading_offset) +
                    3.0 * np.hypot(*(goal - end)))
            np.testing.assert_allclose([item.cost for item in costs],
                                       expected)
            assert all(item.v_coll == 0.02 for item in costs)
            chosen = select_action(costs, EpsilonSchedule(0.0), rng)
            assert chosen == int(np.argmin(expected))
        assert len(model.queries) == 2 * len(primitives)

    def test_history_without_heading(self, rng):
        with pytest.raises(ContractError):
            evaluate_costs(HeadingModel(), zero_pad(np.ones((2, 4))),
                           build_primitives(), CostWeights(), 0.0,
                           (0.0, 0.0), (1.0, 0.0))


class TestSelection(object):

    def test_greedy_takes_smallest_index_on_ties(self, rng):
        assert select_action([3.0, 1.0, 1.0, 2.0], EpsilonSchedule(0.0),
                             rng) == 1

    def test_full_exploration_is_uniform(self, rng):
        counts = np.zeros(4)
        for _ in range(4000):
            counts[select_action([0.0, 1.0, 2.0, 3.0],
                                 EpsilonSchedule(1.0), rng)] += 1
        assert np.all(np.abs(counts / 4000.0 - 0.25) < 0.03)

    def test_rejects_non_finite(self, rng):
        with pytest.raises(NumericError):
            select_action([0.0, np.nan], EpsilonSchedule(0.0), rng)
        with pytest.raises(ContractError):
            select_action([], EpsilonSchedule(0.0), rng)

    def test_random_primitive(self, rng):
        primitives = build_primitives()
        index, primitive = random_primitive(primitives, rng)
        assert primitives[index] == primitive


def test_cost_trace_rows(rng):
    costs = evaluate_costs(HeadingModel(), _history(rng), build_primitives(),
                           CostWeights(), 0.0, (0.0, -0.25), (0.0, 0.25))
    rows = cost_trace_rows(3, 7, costs, 2)
    assert len(rows) == 11
    assert all(len(row) == len(COST_TRACE_HEADER) for row in rows)
    assert [row[-1] for row in rows].count(1) == 1
    assert rows[2][:3] == (3, 7, 2)
    assert rows[2][-1] == 1
