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

"""The observe-act-train protocol."""

import collections
import logging

from pbprnn.agent.mpc import EpsilonSchedule
from pbprnn.agent.mpc import decay_epsilon
from pbprnn.agent.primitives import build_primitives
from pbprnn.env.world import OBSERVATION_FEATURES
from pbprnn.env.world import TRAIN
from pbprnn.env.world import reset
from pbprnn.experience import ExperiencePool
from pbprnn.experiments.episodes import run_mpc_episode
from pbprnn.experiments.episodes import run_random_episode
from pbprnn.experiments.episodes import world_config_for
from pbprnn.experiments.models import build_model


_LOGGER = logging.getLogger(__name__)


TrainingOutcome = collections.namedtuple(
    'TrainingOutcome', ['model', 'curves', 'pool', 'schedule', 'episodes'])


def _train_round(model, pool, config, epochs, sampling_rng, training_rng):
    batch = pool.sample_balanced(config.batch_size, sampling_rng)
    score = model.fit(batch, epochs, training_rng)
    return batch, score


def _curve_point(number, episodes, schedule, collisions, pool, batch, epochs,
                 model, score):
    return {
        'round': number,
        'episodes': episodes,
        'epsilon': schedule.epsilon,
        'collisions': collisions,
        'positives': len(pool.positives),
        'negatives': len(pool.negatives),
        'fallback': batch.fallback,
        'epochs': epochs,
        'cumulative_epochs': model.epochs_trained,
        'score': score,
    }


def run_training(config, bank, on_episode=None):
    """Seed the pool at random, then alternate MPC episodes and retraining.

    Phase one plays ``seed_episodes`` episodes of uniformly random
    primitives against the collaborative obstacle. The model is then fitted
    for ``initial_epochs`` on a balanced batch, and every block of
    ``retrain_interval`` epsilon-greedy episodes is followed by
    ``subsequent_epochs`` on a fresh batch, until the exploration schedule
    is exhausted.

    :type config: :class:`~pbprnn.experiments.config.RunConfig`
    :param config: the run.

    :type bank: :class:`~pbprnn.seeding.SeedBank`
    :param bank: the run's random streams.

    :type on_episode: callable
    :param on_episode: (Optional) called as ``on_episode(number, result,
                       decisions)`` for every controlled episode, where
                       ``decisions`` lists ``(step, costs, chosen)``.

    :rtype: :class:`TrainingOutcome`
    """
    world_config = world_config_for(config)
    primitives = build_primitives()
    policy_rng = bank.generator('policy')
    sampling_rng = bank.generator('sampling')
    training_rng = bank.generator('training')
    pool = ExperiencePool(config.sequence_length, OBSERVATION_FEATURES)
    model = build_model(config, OBSERVATION_FEATURES, bank)
    initial_epochs, subsequent_epochs = config.epochs

    seed_collisions = 0
    for _ in range(config.seed_episodes):
        result = run_random_episode(reset(world_config, TRAIN), primitives,
                                    policy_rng)
        pool.append_episode(result)
        seed_collisions += result.label
    _LOGGER.info('Seeded pool with %d episodes (%d collisions): %r',
                 config.seed_episodes, seed_collisions, pool)

    schedule = EpsilonSchedule()
    batch, score = _train_round(model, pool, config, initial_epochs,
                                sampling_rng, training_rng)
    curves = [_curve_point(0, 0, schedule, seed_collisions, pool, batch,
                           initial_epochs, model, score)]

    episode = 0
    block_collisions = 0
    while not schedule.terminal:
        world = reset(world_config, TRAIN)
        decisions = []
        record = None if on_episode is None else (
            lambda step, costs, chosen: decisions.append((step, costs, chosen)))
        result, _ = run_mpc_episode(world, model, primitives, config.weights,
                                    schedule, policy_rng,
                                    config.sequence_length, on_decision=record)
        episode += 1
        if on_episode is not None:
            on_episode(episode, result, decisions)
        _LOGGER.debug('Episode %d (epsilon %.4f) ended by %s', episode,
                      schedule.epsilon, result.cause)
        pool.append_episode(result)
        block_collisions += result.label
        schedule = decay_epsilon(schedule)
        if episode % config.retrain_interval == 0:
            batch, score = _train_round(model, pool, config,
                                        subsequent_epochs, sampling_rng,
                                        training_rng)
            curves.append(_curve_point(len(curves), episode, schedule,
                                       block_collisions, pool, batch,
                                       subsequent_epochs, model, score))
            _LOGGER.info('Round %d after episode %d: epsilon %.4f, '
                         '%d collisions, score %.4f', len(curves) - 1,
                         episode, schedule.epsilon, block_collisions, score)
            block_collisions = 0
    _LOGGER.info('Training finished after %d episodes and %d epochs',
                 episode, model.epochs_trained)
    return TrainingOutcome(model, curves, pool, schedule, episode)
