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

"""Drives whole experiments and writes their files."""

import asyncio
import concurrent.futures
import csv
import logging
import os

import asyncio_extras

from pbprnn.agent.mpc import COST_TRACE_HEADER
from pbprnn.agent.mpc import cost_trace_rows
from pbprnn.baseline.ensemble import Ensemble
from pbprnn.env.trace import write_trace
from pbprnn.env.world import OBSERVATION_FEATURES
from pbprnn.exceptions import ContractError
from pbprnn.experiments.config import MDE
from pbprnn.experiments.config import PBP_RNN
from pbprnn.experiments.evaluation import SCENARIO_DROPPED
from pbprnn.experiments.evaluation import SCENARIO_NOISE
from pbprnn.experiments.evaluation import Scenario
from pbprnn.experiments.evaluation import run_scenario
from pbprnn.experiments.evaluation import standard_scenarios
from pbprnn.experiments.models import load_model
from pbprnn.experiments.output import METRICS_HEADER
from pbprnn.experiments.output import SWEEP_HEADER
from pbprnn.experiments.output import metrics_rows
from pbprnn.experiments.output import sweep_point
from pbprnn.experiments.output import sweep_trends
from pbprnn.experiments.output import write_csv
from pbprnn.experiments.output import write_json
from pbprnn.experiments.timing import timing_benchmark
from pbprnn.experiments.training import run_training
from pbprnn.recurrent.network import RecurrentBayesNet
from pbprnn.seeding import SeedBank
from pbprnn.version import VERSION


_LOGGER = logging.getLogger(__name__)

SWEEP_NOISE = 'sweep-noise'
SWEEP_DROP = 'sweep-drop'
_SWEEPS = {
    SWEEP_NOISE: ('noise', SCENARIO_NOISE, 'noise_levels'),
    SWEEP_DROP: ('drop', SCENARIO_DROPPED, 'drop_levels'),
}


class ExperimentRunner(object):
    """Runs one command of the experiment battery into an output directory.

    Repetitions are independent: repetition ``r`` draws every stream from
    ``SeedBank(seed).child('repetition', r)``, so the files written do not
    depend on ``workers``.

    :type config: :class:`~pbprnn.experiments.config.RunConfig`
    :param config: the resolved run configuration.

    :type out_dir: str
    :param out_dir: where files are written; created when missing.

    :type checkpoint: str
    :param checkpoint: (Optional) a trained model. ``train`` writes it;
                       the other commands load it instead of training.

    :type trace: bool
    :param trace: also export episode and cost traces.

    :type executor: :class:`concurrent.futures.Executor`
    :param executor: (Optional) runs repetitions. If not passed, a thread
                     pool of ``config.workers`` threads is created on first
                     use and shut down by :meth:`close`.
    """

    def __init__(self, config, out_dir, checkpoint=None, trace=False,
                 executor=None):
        self.config = config
        self.out_dir = out_dir
        self.checkpoint = checkpoint
        self.trace = trace
        self.bank = SeedBank(config.seed)
        self.written = []
        self._executor_internal = executor
        self._owns_executor = executor is None

    def __repr__(self):
        return '<ExperimentRunner seed=%d model=%s out=%s>' % (
            self.config.seed, self.config.model_kind, self.out_dir)

    @property
    def executor(self):
        """Getter for the worker pool.

        :rtype: :class:`concurrent.futures.Executor`
        """
        if self._executor_internal is None:
            self._executor_internal = concurrent.futures.ThreadPoolExecutor(
                max_workers=self.config.workers)
        return self._executor_internal

    def close(self):
        if self._owns_executor and self._executor_internal is not None:
            self._executor_internal.shutdown(wait=True)
            self._executor_internal = None

    def _path(self, *parts):
        path = os.path.join(self.out_dir, *parts)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        self.written.append(os.path.relpath(path, self.out_dir))
        return path

    async def _map(self, func, items):
        """Run ``func`` over ``items`` on the executor, keeping their order."""
        calls = [asyncio_extras.call_in_executor(func, item,
                                                 executor=self.executor)
                 for item in items]
        return list(await asyncio.gather(*calls))

    def _tracer(self, prefix):
        if not self.trace:
            return None

        def on_episode(number, result, decisions):
            name = '%s_episode_%04d.csv' % (prefix, number)
            with open(self._path('traces', name), 'w', newline='') as stream:
                write_trace(stream, result)
            name = '%s_costs_%04d.csv' % (prefix, number)
            with open(self._path('traces', name), 'w', newline='') as stream:
                writer = csv.writer(stream, lineterminator='\n')
                writer.writerow(COST_TRACE_HEADER)
                for step, costs, chosen in decisions:
                    writer.writerows(cost_trace_rows(number, step, costs,
                                                     chosen))
        return on_episode

    def _trained_model(self, bank, prefix):
        if self.checkpoint is not None:
            return load_model(self.checkpoint, bank, self.config.model_kind)
        return run_training(self.config, bank, self._tracer(prefix)).model

    def _repetition_bank(self, repetition):
        return self.bank.child('repetition', repetition)

    def train(self):
        """Run the training protocol once and save the model."""
        outcome = run_training(self.config, self.bank, self._tracer('train'))
        path = self.checkpoint or self._path(
            'model_%s.bin' % self.config.model_kind)
        if self.checkpoint is not None:
            self.written.append(self.checkpoint)
        outcome.model.save(path)
        with open(self._path('pool.bin'), 'wb') as stream:
            outcome.pool.dump(stream)
        write_json(self._path('curves.json'), {
            'model_kind': self.config.model_kind,
            'episodes': outcome.episodes,
            'rounds': outcome.curves,
            'training': outcome.model.training_summary(),
        })
        return outcome

    def _evaluate_repetition(self, repetition):
        bank = self._repetition_bank(repetition)
        prefix = 'rep%02d' % repetition
        model = self._trained_model(bank, prefix + '_train')
        return [run_scenario(model, scenario, self.config, bank,
                             on_episode=self._tracer(
                                 '%s_%s' % (prefix, scenario.label.replace(
                                     ':', '_'))))
                for scenario in standard_scenarios(self.config)]

    async def evaluate(self):
        """The four-scenario battery, once per repetition."""
        repetitions = range(self.config.repetitions)
        results = await self._map(self._evaluate_repetition, repetitions)
        rows = []
        for repetition, records in zip(repetitions, results):
            rows.extend(metrics_rows(self.config.seed, repetition, records))
        write_csv(self._path('metrics_%s.csv' % self.config.model_kind),
                  METRICS_HEADER, rows)
        return results

    def _sweep_repetition(self, sweep, repetition):
        _, scenario_name, levels_key = _SWEEPS[sweep]
        bank = self._repetition_bank(repetition)
        model = self._trained_model(bank, 'rep%02d_train' % repetition)
        return [run_scenario(model, Scenario(scenario_name, level),
                             self.config, bank,
                             episodes=self.config.sweep_episodes)
                for level in getattr(self.config, levels_key)]

    async def sweep(self, sweep):
        """Collision proportion and variance over a perturbation grid.

        :type sweep: str
        :param sweep: ``'sweep-noise'`` or ``'sweep-drop'``.
        """
        if sweep not in _SWEEPS:
            raise ContractError('unknown sweep %r' % (sweep,))
        short, _, levels_key = _SWEEPS[sweep]
        levels = getattr(self.config, levels_key)
        repetitions = range(self.config.repetitions)
        results = await self._map(
            lambda repetition: self._sweep_repetition(sweep, repetition),
            repetitions)
        points = [sweep_point(level, [records[index] for records in results])
                  for index, level in enumerate(levels)]
        kind = self.config.model_kind
        write_csv(self._path('sweep_%s_%s.csv' % (short, kind)),
                  SWEEP_HEADER, [point.row() for point in points])
        rows = []
        for repetition, records in zip(repetitions, results):
            rows.extend(metrics_rows(self.config.seed, repetition, records))
        write_csv(self._path('sweep_%s_%s_metrics.csv' % (short, kind)),
                  METRICS_HEADER, rows)
        trends = sweep_trends(points)
        _LOGGER.info('Sweep %s for %s: Spearman %.3f (collisions), '
                     '%.3f (variance)', short, kind,
                     trends['collision_proportion'], trends['variance_mean'])
        write_json(self._path('trends_%s_%s.json' % (short, kind)), trends)
        return points, trends

    def bench_timing(self):
        """Latency of both models on identical windows.

        Weights do not change the cost of a query, so models are freshly
        initialized unless a checkpoint supplies one of them.
        """
        config = self.config
        init_rng = self.bank.generator('model-init')
        net = RecurrentBayesNet.initialize(OBSERVATION_FEATURES,
                                           config.hidden_dim, init_rng)
        ensemble = Ensemble.initialize(
            OBSERVATION_FEATURES, init_rng, size=config.ensemble_size,
            hidden_dim=config.hidden_dim, dropout_rate=config.dropout_rate,
            passes_per_member=config.passes_per_member)
        if self.checkpoint is not None:
            model = load_model(self.checkpoint, self.bank)
            if model.kind == PBP_RNN:
                net = model.net
            elif model.kind == MDE:
                ensemble = model.ensemble
        executor = self.executor if config.workers > 1 else None
        report = timing_benchmark(net, ensemble, config.timing_queries,
                                  self.bank.generator('timing'),
                                  length=config.sequence_length,
                                  executor=executor)
        write_json(self._path('timing.json'), report.as_dict())
        return report

    def write_manifest(self, command):
        path = self._path('manifest.json')
        write_json(path, {
            'command': command,
            'version': VERSION,
            'seed': self.config.seed,
            'config': self.config.as_dict(),
            'files': sorted(self.written),
        })

    def run(self, command):
        """Execute a command and write the manifest.

        :type command: str
        :param command: ``train``, ``eval``, ``sweep-noise``,
                        ``sweep-drop`` or ``bench-timing``.
        """
        os.makedirs(self.out_dir, exist_ok=True)
        if command == 'train':
            result = self.train()
        elif command == 'eval':
            result = self._run_async(self.evaluate())
        elif command in _SWEEPS:
            result = self._run_async(self.sweep(command))
        elif command == 'bench-timing':
            result = self.bench_timing()
        else:
            raise ContractError('unknown command %r' % (command,))
        self.write_manifest(command)
        return result

    def _run_async(self, coroutine):
        loop = asyncio.new_event_loop()
        try:
            return loop.run_until_complete(coroutine)
        finally:
            loop.close()
