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

"""Per-query inference latency of the two models."""

import collections
import logging
import time

import numpy as np

from pbprnn.baseline.ensemble import draw_masks
from pbprnn.baseline.ensemble import mc_predict
from pbprnn.baseline.ensemble import member_predictions
from pbprnn.baseline.ensemble import summarize_predictions
from pbprnn.exceptions import ContractError
from pbprnn.recurrent.network import ObservationSequence
from pbprnn.recurrent.network import forward_sequence


_LOGGER = logging.getLogger(__name__)

MIN_QUERIES = 10


_TimingReportTuple = collections.namedtuple('TimingReport', [
    'queries', 'pbp_mean', 'pbp_std', 'mde_serial_mean', 'mde_serial_std',
    'mde_parallel_mean', 'mde_parallel_std', 'ratio', 'pbp_parameters',
    'mde_parameters'])


class TimingReport(_TimingReportTuple):
    """Wall-clock seconds per query, mean and standard deviation.

    ``ratio`` is the serial ensemble mean over the recurrent network mean.
    The ``mde_parallel`` fields are ``None`` when no executor was given.
    """
    __slots__ = ()

    def as_dict(self):
        return self._asdict()


def _time_queries(predict, queries):
    elapsed = []
    for seq in queries:
        start = time.perf_counter()
        predict(seq)
        elapsed.append(time.perf_counter() - start)
    return float(np.mean(elapsed)), float(np.std(elapsed))


def _member_parallel(ensemble, rng, executor):
    def predict(seq):
        masks = draw_masks(ensemble, rng)
        predictions = executor.map(
            lambda pair: member_predictions(pair[0], seq, pair[1],
                                            ensemble.dropout_rate,
                                            serial=True),
            zip(ensemble.members, masks))
        return summarize_predictions(np.concatenate(list(predictions)))
    return predict


def random_queries(n_queries, length, features, rng):
    """Standard normal windows without padding."""
    return [ObservationSequence(rng.standard_normal((length, features)))
            for _ in range(n_queries)]


def timing_benchmark(net, ensemble, n_queries, rng, length=8, executor=None):
    """Time single-pass recurrent inference against serial Monte-Carlo
    dropout on identical windows.

    :type net: :class:`~pbprnn.recurrent.network.RecurrentBayesNet`
    :param net: the recurrent network.

    :type ensemble: :class:`~pbprnn.baseline.ensemble.Ensemble`
    :param ensemble: the dropout ensemble.

    :type n_queries: int
    :param n_queries: windows to time, at least 10.

    :type rng: :class:`numpy.random.Generator`
    :param rng: draws the windows and the dropout masks.

    :type length: int
    :param length: window length.

    :type executor: :class:`concurrent.futures.Executor`
    :param executor: (Optional) also time the members on parallel workers.

    :rtype: :class:`TimingReport`
    """
    if n_queries < MIN_QUERIES:
        raise ContractError('timing needs at least %d queries, got %r' % (
            MIN_QUERIES, n_queries))
    if net.input_dim != ensemble.input_dim:
        raise ContractError('models disagree on the input width')
    queries = random_queries(n_queries, length, net.input_dim, rng)
    pbp_mean, pbp_std = _time_queries(
        lambda seq: forward_sequence(net, seq), queries)
    serial_mean, serial_std = _time_queries(
        lambda seq: mc_predict(ensemble, seq, rng, serial=True), queries)
    parallel_mean = parallel_std = None
    if executor is not None:
        parallel_mean, parallel_std = _time_queries(
            _member_parallel(ensemble, rng, executor), queries)
    report = TimingReport(
        queries=n_queries, pbp_mean=pbp_mean, pbp_std=pbp_std,
        mde_serial_mean=serial_mean, mde_serial_std=serial_std,
        mde_parallel_mean=parallel_mean, mde_parallel_std=parallel_std,
        ratio=serial_mean / pbp_mean if pbp_mean > 0.0 else float('inf'),
        pbp_parameters=net.parameter_count(),
        mde_parameters=ensemble.parameter_count())
    _LOGGER.info('PBP %.3f ms, MDE serial %.3f ms per query (ratio %.2f)',
                 pbp_mean * 1e3, serial_mean * 1e3, report.ratio)
    return report
