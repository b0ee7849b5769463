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

"""Metric files, sweep curves and JSON reports."""

import collections
import csv
import logging
import math

import numpy as np
import ujson as json
from scipy import stats

from pbprnn.env.trace import format_float


_LOGGER = logging.getLogger(__name__)

CI95_Z = 1.96

METRICS_HEADER = (
    'run_seed', 'repetition', 'scenario', 'param', 'fpr', 'fnr',
    'collision_rate', 'loglik_mean', 'loglik_var', 'pred_var_mean',
    'pred_var_var', 'min_sep_mean',
)

SWEEP_HEADER = ('level', 'collision_proportion', 'variance_mean',
                'ci95_low', 'ci95_high')


def _text(value):
    if value is None:
        return ''
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def metrics_rows(run_seed, repetition, records):
    """Rows of :data:`METRICS_HEADER` for one repetition's records."""
    return [(run_seed, repetition, record.scenario, _text(record.param),
             _text(record.fpr), _text(record.fnr),
             _text(record.collision_rate), _text(record.loglik_mean),
             _text(record.loglik_var), _text(record.pred_var_mean),
             _text(record.pred_var_var), _text(record.min_sep_mean))
            for record in records]


def write_csv(path, header, rows):
    with open(path, 'w', newline='') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)
    _LOGGER.info('Wrote %s', path)


def _sanitize(value):
    if isinstance(value, dict):
        return {str(key): _sanitize(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(item) for item in value]
    if isinstance(value, np.ndarray):
        return _sanitize(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_json(path, data):
    """Dump ``data`` with sorted keys; non-finite floats become ``null``."""
    with open(path, 'w') as stream:
        stream.write(json.dumps(_sanitize(data), sort_keys=True, indent=2,
                                escape_forward_slashes=False))
        stream.write('\n')
    _LOGGER.info('Wrote %s', path)


_SweepPointTuple = collections.namedtuple('SweepPoint', SWEEP_HEADER)


class SweepPoint(_SweepPointTuple):
    """Aggregate of one perturbation level across repetitions."""
    __slots__ = ()

    def row(self):
        return tuple(_text(value) for value in self)


def sweep_point(level, records):
    """Collision proportion with a normal-approximation 95% interval.

    :type level: float or int
    :param level: the perturbation level.

    :type records: list of :class:`~pbprnn.experiments.evaluation.MetricsRecord`
    :param records: one record per repetition at this level.

    :rtype: :class:`SweepPoint`
    """
    rates = np.array([record.collision_rate for record in records])
    variances = np.array([record.pred_var_mean for record in records])
    proportion = float(np.mean(rates))
    if rates.size > 1:
        half = CI95_Z * float(np.std(rates, ddof=1)) / math.sqrt(rates.size)
    else:
        half = 0.0
    return SweepPoint(level, proportion, float(np.nanmean(variances)),
                      max(0.0, proportion - half),
                      min(1.0, proportion + half))


def spearman_trend(levels, values):
    """Rank correlation of ``values`` with ``levels``; NaN when constant."""
    if len(set(values)) < 2 or len(set(levels)) < 2:
        return float('nan')
    return float(stats.spearmanr(levels, values)[0])


def sweep_trends(points):
    """Spearman trends of collision proportion and variance over a sweep."""
    levels = [point.level for point in points]
    return {
        'collision_proportion': spearman_trend(
            levels, [point.collision_proportion for point in points]),
        'variance_mean': spearman_trend(
            levels, [point.variance_mean for point in points]),
    }
