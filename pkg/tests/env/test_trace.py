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
import io

import pytest

from pbprnn.agent.primitives import MotionPrimitive
from pbprnn.env.trace import TRACE_HEADER
from pbprnn.env.trace import format_float
from pbprnn.env.trace import replay_min_separation
from pbprnn.env.trace import write_trace
from pbprnn.env.world import WorldConfig
from pbprnn.env.world import reset
from pbprnn.env.world import step
from pbprnn.exceptions import ContractError


def _episode():
    world = reset(WorldConfig())
    while not world.terminal:
        step(world, MotionPrimitive(0.2, 0.05))
    return world.result()


def test_format_float():
    assert format_float(0.1) == '0.1'
    assert format_float(1.0) == '1'
    assert format_float(-2.5e-12) == '-2.5e-12'


def test_trace_replays_min_separation():
    result = _episode()
    stream = io.StringIO()
    write_trace(stream, result)
    rows = list(csv.reader(io.StringIO(stream.getvalue())))
    assert tuple(rows[0]) == TRACE_HEADER
    assert len(rows) == result.steps_taken + 1
    assert rows[1][0] == '0'
    assert replay_min_separation(rows[1:]) == pytest.approx(
        result.min_separation, rel=1e-9)


def test_trace_flags_last_step():
    result = _episode()
    stream = io.StringIO()
    write_trace(stream, result, header=False)
    rows = list(csv.reader(io.StringIO(stream.getvalue())))
    last = dict(zip(TRACE_HEADER, rows[-1]))
    assert last[result.cause if result.cause != 'goal'
                else 'agent_goal'] == '1'
    assert all(row[TRACE_HEADER.index('collision')] == '0'
               for row in rows[:-1])


def test_replay_of_empty_trace():
    with pytest.raises(ContractError):
        replay_min_separation([])
