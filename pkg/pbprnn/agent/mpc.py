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

"""One-step model-predictive control over the primitive set.

Every primitive is scored by

::

    cost = (1 - epsilon) * lambda_v * V + lambda_c * P + lambda_d * d

where ``P`` and ``V`` are the predicted collision mean and total variance
of the window ending in that primitive and ``d`` is the distance from the
primitive's end point to the goal.
"""

import collections

import numpy as np

from pbprnn.env.trace import format_float
from pbprnn.exceptions import ContractError
from pbprnn.exceptions import NumericError
from pbprnn.recurrent.network import ObservationSequence


HEADING_FEATURE = 8
EPSILON_DECAY = 49.0 / 50.0
EPSILON_FLOOR = 0.1


_CostWeightsTuple = collections.namedtuple(
    'CostWeights', ['lambda_c', 'lambda_v_base', 'lambda_d'])


class CostWeights(_CostWeightsTuple):
    """Coefficients of the collision, variance and goal terms."""
    __slots__ = ()

    def __new__(cls, lambda_c=25.0, lambda_v_base=200.0, lambda_d=3.0):
        values = tuple(float(value)
                       for value in (lambda_c, lambda_v_base, lambda_d))
        if any(value < 0.0 for value in values):
            raise ContractError('cost weights must be non-negative, got %r' % (
                values,))
        return super(CostWeights, cls).__new__(cls, *values)

    def scaled(self, factor):
        return CostWeights(*[value * factor for value in self])


_EpsilonScheduleTuple = collections.namedtuple(
    'EpsilonSchedule', ['epsilon', 'floor', 'terminal', 'decays'])


class EpsilonSchedule(_EpsilonScheduleTuple):
    """Exploration rate, multiplied by 49/50 after every episode.

    Once it reaches ``floor`` it drops to zero and the schedule is terminal.
    """
    __slots__ = ()

    def __new__(cls, epsilon=1.0, floor=EPSILON_FLOOR, terminal=False,
                decays=0):
        epsilon = float(epsilon)
        if not 0.0 <= epsilon <= 1.0:
            raise ContractError('epsilon must lie in [0, 1], got %r' % epsilon)
        return super(EpsilonSchedule, cls).__new__(
            cls, epsilon, float(floor), bool(terminal), int(decays))


def decay_epsilon(schedule):
    """Apply one episode's decay.

    :type schedule: :class:`EpsilonSchedule`
    :rtype: :class:`EpsilonSchedule`
    """
    if schedule.epsilon == 0.0:
        return schedule._replace(terminal=True)
    epsilon = schedule.epsilon * EPSILON_DECAY
    if epsilon <= schedule.floor:
        return EpsilonSchedule(0.0, schedule.floor, True, schedule.decays + 1)
    return EpsilonSchedule(epsilon, schedule.floor, False,
                           schedule.decays + 1)


_CandidateCostTuple = collections.namedtuple(
    'CandidateCost', ['cost', 'p_coll', 'v_coll', 'd_goal'])


class CandidateCost(_CandidateCostTuple):
    """Score of one primitive and the terms behind it."""
    __slots__ = ()


def mpc_cost(p_coll, v_coll, d_goal, weights, epsilon):
    """The scalar cost of one candidate; works element-wise on arrays."""
    return ((1.0 - epsilon) * weights.lambda_v_base * v_coll +
            weights.lambda_c * p_coll + weights.lambda_d * d_goal)


def candidate_sequence(history, heading_offset):
    """The history window with its final heading replaced."""
    steps = np.array(history.steps)
    steps[-1, HEADING_FEATURE] = heading_offset
    return ObservationSequence(steps, history.pad_count)


def evaluate_costs(model, history, primitives, weights, epsilon,
                   agent_position, goal):
    """Score every primitive.

    :type model: object with ``predict(seq)``
    :param model: returns a
                  :class:`~pbprnn.recurrent.network.PredictiveDistribution`
                  for a raw observation window.

    :type history: :class:`~pbprnn.recurrent.network.ObservationSequence`
    :param history: the window whose final row is the current state.

    :type primitives: :class:`~pbprnn.agent.primitives.MotionPrimitiveSet`
    :param primitives: the candidates.

    :type weights: :class:`CostWeights`
    :param weights: cost coefficients.

    :type epsilon: float
    :param epsilon: current exploration rate; scales the variance term by
                    ``1 - epsilon``.

    :type agent_position: array-like
    :param agent_position: where the primitives start.

    :type goal: array-like
    :param goal: the agent's goal.

    :rtype: list of :class:`CandidateCost`
    :returns: one entry per primitive, in primitive order.
    """
    if history.features <= HEADING_FEATURE:
        raise ContractError('history rows have no heading feature')
    agent_position = np.asarray(agent_position, dtype=np.float64)
    goal = np.asarray(goal, dtype=np.float64)
    costs = []
    for primitive in primitives:
        prediction = model.predict(
            candidate_sequence(history, primitive.heading_offset))
        end = agent_position + primitive.displacement(agent_position, goal)
        d_goal = float(np.hypot(*(goal - end)))
        cost = mpc_cost(prediction.mean, prediction.total_variance, d_goal,
                        weights, epsilon)
        costs.append(CandidateCost(float(cost), prediction.mean,
                                   prediction.total_variance, d_goal))
    return costs


def select_action(costs, schedule, rng):
    """Epsilon-greedy choice of a primitive index.

    A uniform draw below ``epsilon`` picks a random index; otherwise the
    cheapest index wins, ties going to the smaller index.

    :type costs: sequence of float or :class:`CandidateCost`
    :param costs: one cost per primitive.

    :type schedule: :class:`EpsilonSchedule`
    :param schedule: the exploration rate.

    :type rng: :class:`numpy.random.Generator`
    :param rng: the exploration source.

    :rtype: int
    :raises: :class:`~pbprnn.exceptions.NumericError` on non-finite costs.
    """
    values = np.array([getattr(item, 'cost', item) for item in costs],
                      dtype=np.float64)
    if values.size == 0:
        raise ContractError('no costs to choose from')
    if not np.all(np.isfinite(values)):
        raise NumericError('costs must be finite: %r' % (values,))
    if rng.random() < schedule.epsilon:
        return int(rng.integers(values.size))
    return int(np.argmin(values))


COST_TRACE_HEADER = ('episode', 'step', 'index', 'p_coll', 'v_coll',
                     'd_goal', 'cost', 'chosen')


def cost_trace_rows(episode, step, costs, chosen):
    """Rows of :data:`COST_TRACE_HEADER` for one decision."""
    return [(episode, step, index, format_float(item.p_coll),
             format_float(item.v_coll), format_float(item.d_goal),
             format_float(item.cost), int(index == chosen))
            for index, item in enumerate(costs)]


def random_primitive(primitives, rng):
    """A uniformly drawn primitive (seed-phase exploration)."""
    index = int(rng.integers(len(primitives)))
    return index, primitives[index]
