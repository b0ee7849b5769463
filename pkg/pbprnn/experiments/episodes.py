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

"""Episode loops: random exploration and model-predictive control."""

import logging

from pbprnn.agent.mpc import evaluate_costs
from pbprnn.agent.mpc import random_primitive
from pbprnn.agent.mpc import select_action
from pbprnn.env.world import WorldConfig
from pbprnn.env.world import step
from pbprnn.recurrent.network import zero_pad


_LOGGER = logging.getLogger(__name__)


def world_config_for(config):
    """The world geometry of a :class:`~pbprnn.experiments.config.RunConfig`."""
    return WorldConfig(max_steps=config.max_steps)


def history_window(rows, current_row, length):
    """Window of the last executed rows followed by the current state row."""
    previous = rows[max(0, len(rows) - (length - 1)):] if length > 1 else []
    return zero_pad(list(previous) + [current_row], length)


class _RecordingModel(object):
    """Keeps every prediction made during one cost evaluation."""

    def __init__(self, model):
        self._model = model
        self.predictions = []

    def predict(self, seq):
        prediction = self._model.predict(seq)
        self.predictions.append(prediction)
        return prediction


def run_random_episode(world, primitives, rng):
    """Play an episode with uniformly random primitives.

    :rtype: :class:`~pbprnn.env.world.EpisodeResult`
    """
    while not world.terminal:
        _, primitive = random_primitive(primitives, rng)
        step(world, primitive)
    return world.result()


def run_mpc_episode(world, model, primitives, weights, schedule, rng,
                    length, perturb=None, on_decision=None):
    """Play an episode under the epsilon-greedy controller.

    :type world: :class:`~pbprnn.env.world.World`
    :param world: a freshly reset world.

    :type model: adapter with ``predict(seq)``
    :param model: the collision model.

    :type schedule: :class:`~pbprnn.agent.mpc.EpsilonSchedule`
    :param schedule: exploration rate for the whole episode.

    :type rng: :class:`numpy.random.Generator`
    :param rng: drives exploration.

    :type length: int
    :param length: window length fed to the model.

    :type perturb: callable
    :param perturb: (Optional) maps the raw history window to the window the
                    model sees, before candidate headings are written.

    :type on_decision: callable
    :param on_decision: (Optional) called as ``on_decision(step, costs,
                        chosen)`` after every choice.

    :rtype: tuple
    :returns: the :class:`~pbprnn.env.world.EpisodeResult` and the
              predictive distribution of every executed primitive.
    """
    rows = []
    executed = []
    while not world.terminal:
        current = world.observation_for(0.0).features()
        history = history_window(rows, current, length)
        if perturb is not None:
            history = perturb(history)
        recorder = _RecordingModel(model)
        costs = evaluate_costs(recorder, history, primitives, weights,
                               schedule.epsilon, world.agent.position,
                               world.agent.goal)
        chosen = select_action(costs, schedule, rng)
        if on_decision is not None:
            on_decision(world.steps, costs, chosen)
        executed.append(recorder.predictions[chosen])
        observation, _ = step(world, primitives[chosen])
        rows.append(observation.features())
    return world.result(), executed
