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

import csv
import math

import numpy as np
import pytest
import ujson

from pbprnn.experiments.evaluation import MetricsRecord
from pbprnn.experiments.output import METRICS_HEADER
from pbprnn.experiments.output import SWEEP_HEADER
from pbprnn.experiments.output import metrics_rows
from pbprnn.experiments.output import spearman_trend
from pbprnn.experiments.output import sweep_point
from pbprnn.experiments.output import sweep_trends
from pbprnn.experiments.output import write_csv
from pbprnn.experiments.output import write_json


def _record(collision_rate, pred_var_mean=0.1, scenario='novel', param=None):
    return MetricsRecord(
        scenario=scenario, param=param, fpr=0.0, fnr=0.5,
        collision_rate=collision_rate, min_separations=(0.2, 0.3),
        loglik_mean=-1.0, loglik_var=0.25, pred_var_mean=pred_var_mean,
        pred_var_var=0.0, min_sep_mean=float('nan'), episodes=2)


class TestSweep(object):

    def test_point_interval(self):
        point = sweep_point(0.01, [_record(0.2), _record(0.4)])
        half = 1.96 * np.std([0.2, 0.4], ddof=1) / math.sqrt(2.0)
        assert point.collision_proportion == pytest.approx(0.3)
        assert point.ci95_low == pytest.approx(0.3 - half)
        assert point.ci95_high == pytest.approx(0.3 + half)
        assert point.variance_mean == pytest.approx(0.1)

    def test_interval_is_clipped(self):
        point = sweep_point(1, [_record(0.0), _record(1.0)])
        assert point.ci95_low == 0.0
        assert point.ci95_high == 1.0

    def test_single_repetition(self):
        point = sweep_point(2, [_record(0.5)])
        assert point.ci95_low == point.ci95_high == 0.5
        assert point.row()[0] == '2'
        assert len(point.row()) == len(SWEEP_HEADER)

    def test_trends(self):
        assert spearman_trend([0, 1, 2, 3], [0.1, 0.3, 0.2, 0.9]) == \
            pytest.approx(0.8)
        assert math.isnan(spearman_trend([0, 1, 2], [0.5, 0.5, 0.5]))
        points = [sweep_point(level, [_record(rate, variance)])
                  for level, rate, variance in ((0, 0.1, 0.01), (1, 0.2, 0.02),
                                                (2, 0.3, 0.01))]
        trends = sweep_trends(points)
        assert trends['collision_proportion'] == pytest.approx(1.0)
        assert trends['variance_mean'] == pytest.approx(0.0)


class TestFiles(object):

    def test_metrics_rows(self):
        rows = metrics_rows(7, 1, [_record(0.25),
                                   _record(0.5, scenario='novel_noise',
                                           param=0.005)])
        assert len(rows) == 2
        assert all(len(row) == len(METRICS_HEADER) for row in rows)
        assert rows[0][:4] == (7, 1, 'novel', '')
        assert rows[1][3] == '0.005'
        assert rows[0][6] == '0.25'
        assert rows[0][-1] == 'nan'

    def test_write_csv(self, tmp_path):
        path = str(tmp_path / 'metrics.csv')
        write_csv(path, METRICS_HEADER, metrics_rows(0, 0, [_record(0.5)]))
        with open(path, newline='') as stream:
            rows = list(csv.reader(stream))
        assert tuple(rows[0]) == METRICS_HEADER
        assert rows[1][2] == 'novel'

    def test_write_json_sanitizes(self, tmp_path):
        path = tmp_path / 'report.json'
        write_json(str(path), {
            'b': float('nan'), 'a': np.float64(1.5), 'c': np.int64(3),
            'd': (np.bool_(True), float('inf')), 'e': np.arange(2),
            'path': 'out/model.bin'})
        text = path.read_text()
        assert text.index('"a"') < text.index('"b"')
        assert 'out/model.bin' in text
        assert ujson.loads(text) == {'a': 1.5, 'b': None, 'c': 3,
                                     'd': [True, None], 'e': [0, 1],
                                     'path': 'out/model.bin'}
