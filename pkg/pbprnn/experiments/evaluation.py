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

"""Greedy evaluation episodes and their aggregate metrics."""

import collections
import logging
import math

from pbprnn.agent.mpc import EpsilonSchedule
from pbprnn.agent.primitives import build_primitives
from pbprnn.env.perturbations import apply_noise
from pbprnn.env.perturbations import drop_observations
from pbprnn.env.world import NOVEL
from pbprnn.env.world import TRAIN
from pbprnn.env.world import reset
from pbprnn.exceptions import ContractError
from pbprnn.exceptions import UntrainedModelError
from pbprnn.experiments.episodes import run_mpc_episode
from pbprnn.experiments.episodes import world_config_for


_LOGGER = logging.getLogger(__name__)

COLLISION_THRESHOLD = 0.5

SCENARIO_TRAIN = 'train'
SCENARIO_NOVEL = 'novel'
SCENARIO_NOISE = 'novel_noise'
SCENARIO_DROPPED = 'novel_dropped'
SCENARIOS = (SCENARIO_TRAIN, SCENARIO_NOVEL, SCENARIO_NOISE, SCENARIO_DROPPED)


_ScenarioTuple = collections.namedtuple('Scenario', ['name', 'param'])


class Scenario(_ScenarioTuple):
    """An evaluation condition.

    :type name: str
    :param name: one of :data:`SCENARIOS`.

    :type param: float or int
    :param param: the noise scale of ``novel_noise``, the dropped row count
                  of ``novel_dropped``; ``None`` otherwise.
    """
    __slots__ = ()

    def __new__(cls, name, param=None):
        if name not in SCENARIOS:
            raise ContractError('unknown scenario %r' % (name,))
        if name == SCENARIO_NOISE:
            param = float(param)
            if not param >= 0.0:
                raise ContractError('noise scale must be non-negative')
        elif name == SCENARIO_DROPPED:
            param = int(param)
            if param < 0:
                raise ContractError('dropped count must be non-negative')
        else:
            param = None
        return super(Scenario, cls).__new__(cls, name, param)

    @property
    def mode(self):
        return TRAIN if self.name == SCENARIO_TRAIN else NOVEL

    @property
    def label(self):
        """Stable text key, also used to name the scenario's streams."""
        if self.param is None:
            return self.name
        return '%s:%s' % (self.name, self.param)

    def perturbation(self, rng):
        """The window corruption of this scenario, or ``None``."""
        if self.name == SCENARIO_NOISE:
            return lambda seq: apply_noise(seq, self.param, rng)
        if self.name == SCENARIO_DROPPED:
            return lambda seq: drop_observations(seq, self.param, rng)
        return None


def standard_scenarios(config):
    """The four conditions of the evaluation battery."""
    return [Scenario(SCENARIO_TRAIN), Scenario(SCENARIO_NOVEL),
            Scenario(SCENARIO_NOISE, config.eval_noise),
            Scenario(SCENARIO_DROPPED, config.eval_dropped)]


_EpisodeOutcomeTuple = collections.namedtuple(
    'EpisodeOutcome', ['collided', 'min_separation', 'means', 'variances',
                       'logliks'])


class EpisodeOutcome(_EpisodeOutcomeTuple):
    """What one evaluation episode contributes to the metrics.

    ``means``, ``variances`` and ``logliks`` hold one entry per executed
    step: the predictive mean, the epistemic variance and the
    log-likelihood of the episode's label.
    """
    __slots__ = ()

    @classmethod
    def from_episode(cls, result, predictions):
        label = float(result.label)
        return cls(result.collided, result.min_separation,
                   tuple(item.mean for item in predictions),
                   tuple(item.variance for item in predictions),
                   tuple(item.log_likelihood(label) for item in predictions))

    def alarmed(self, threshold=COLLISION_THRESHOLD):
        """Whether some executed prediction exceeded ``threshold``."""
        return any(mean > threshold for mean in self.means)


_MetricsRecordTuple = collections.namedtuple('MetricsRecord', [
    'scenario', 'param', 'fpr', 'fnr', 'collision_rate', 'min_separations',
    'loglik_mean', 'loglik_var', 'pred_var_mean', 'pred_var_var',
    'min_sep_mean', 'episodes'])


class MetricsRecord(_MetricsRecordTuple):
    """Aggregate metrics of one scenario."""
    __slots__ = ()

    def as_dict(self):
        data = self._asdict()
        data['min_separations'] = list(self.min_separations)
        return data


def _mean_and_variance(values):
    values = list(values)
    if not values:
        return float('nan'), float('nan')
    mean = math.fsum(values) / len(values)
    spread = math.fsum((value - mean) ** 2 for value in values)
    return mean, spread / len(values)


def false_rates(outcomes, threshold=COLLISION_THRESHOLD):
    """Episode-level false positive and false negative rates.

    A false positive is a clean episode with an executed prediction above
    ``threshold``; a false negative is a collision episode without one. A
    rate with no episodes in its denominator is 0.

    :rtype: tuple
    :returns: ``(fpr, fnr)``.
    """
    clean = [item for item in outcomes if not item.collided]
    collided = [item for item in outcomes if item.collided]

    false_positives = sum(1 for item in clean if item.alarmed(threshold))
    false_negatives = sum(1 for item in collided
                          if not item.alarmed(threshold))
    fpr = false_positives / float(len(clean)) if clean else 0.0
    fnr = false_negatives / float(len(collided)) if collided else 0.0
    return fpr, fnr


def summarize_outcomes(scenario, outcomes):
    """Fold episode outcomes into a :class:`MetricsRecord`.

    :raises: :class:`~pbprnn.exceptions.ContractError` without outcomes.
    """
    outcomes = list(outcomes)
    if not outcomes:
        raise ContractError('no episodes to summarize')
    fpr, fnr = false_rates(outcomes)
    collisions = sum(1 for item in outcomes if item.collided)
    loglik_mean, loglik_var = _mean_and_variance(
        value for item in outcomes for value in item.logliks)
    var_mean, var_var = _mean_and_variance(
        value for item in outcomes for value in item.variances)
    clean_separations = [item.min_separation for item in outcomes
                         if not item.collided]
    min_sep_mean = (math.fsum(clean_separations) / len(clean_separations)
                    if clean_separations else float('nan'))
    return MetricsRecord(
        scenario=scenario.name,
        param=scenario.param,
        fpr=fpr,
        fnr=fnr,
        collision_rate=collisions / float(len(outcomes)),
        min_separations=tuple(sorted(item.min_separation
                                     for item in outcomes)),
        loglik_mean=loglik_mean,
        loglik_var=loglik_var,
        pred_var_mean=var_mean,
        pred_var_var=var_var,
        min_sep_mean=min_sep_mean,
        episodes=len(outcomes))


def run_scenario(model, scenario, config, bank, episodes=None,
                 on_episode=None):
    """Evaluate a trained model greedily under one condition.

    World starts and exploration draws come from streams named after the
    scenario mode, so every novel scenario starts from the same worlds and
    differs only in its corruption. Perturbations and dropout masks come
    from streams named after :attr:`Scenario.label`. Scenarios can run in
    any order or in parallel.

    :type model: :class:`~pbprnn.experiments.models.PbpModel` or
                 :class:`~pbprnn.experiments.models.MdeModel`
    :param model: the trained model.

    :type scenario: :class:`Scenario`
    :param scenario: the condition.

    :type config: :class:`~pbprnn.experiments.config.RunConfig`
    :param config: the run.

    :type bank: :class:`~pbprnn.seeding.SeedBank`
    :param bank: the repetition's random streams.

    :type episodes: int
    :param episodes: (Optional) overrides ``config.eval_episodes``.

    :type on_episode: callable
    :param on_episode: (Optional) called as ``on_episode(number, result,
                       decisions)`` after every episode.

    :rtype: :class:`MetricsRecord`
    :raises: :class:`~pbprnn.exceptions.UntrainedModelError`,
             :class:`~pbprnn.exceptions.ContractError` for zero episodes.
    """
    episodes = config.eval_episodes if episodes is None else episodes
    if episodes < 1:
        raise ContractError('a scenario needs at least one episode')
    if not model.trained:
        raise UntrainedModelError('cannot evaluate an untrained model')
    world_config = world_config_for(config)
    primitives = build_primitives()
    schedule = EpsilonSchedule(0.0, terminal=True)
    env_rng = bank.generator('env:' + scenario.mode)
    policy_rng = bank.generator('policy:' + scenario.mode)
    perturb = scenario.perturbation(bank.generator('perturb:' +
                                                   scenario.label))
    model = model.fork(bank.generator('dropout:' + scenario.label))

    outcomes = []
    for number in range(1, episodes + 1):
        world = reset(world_config, scenario.mode, env_rng)
        decisions = []
        record = None if on_episode is None else (
            lambda step, costs, chosen:
            decisions.append((step, costs, chosen)))
        result, predictions = run_mpc_episode(
            world, model, primitives, config.weights, schedule, policy_rng,
            config.sequence_length, perturb=perturb, on_decision=record)
        if on_episode is not None:
            on_episode(number, result, decisions)
        outcomes.append(EpisodeOutcome.from_episode(result, predictions))
    metrics = summarize_outcomes(scenario, outcomes)
    _LOGGER.info('Scenario %s: collision rate %.3f, FPR %.3f, FNR %.3f, '
                 'mean variance %.6g, mean loglik %.6g', scenario.label,
                 metrics.collision_rate, metrics.fpr, metrics.fnr,
                 metrics.pred_var_mean, metrics.loglik_mean)
    return metrics
