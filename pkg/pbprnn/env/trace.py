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

"""Comma-separated export of episode traces."""

import csv

from pbprnn.exceptions import ContractError


TRACE_HEADER = (
    'step', 'agent_x', 'agent_y', 'agent_vx', 'agent_vy',
    'obstacle_x', 'obstacle_y', 'obstacle_vx', 'obstacle_vy',
    'heading', 'separation', 'agent_goal_distance', 'obstacle_goal_distance',
    'collision', 'agent_goal', 'obstacle_goal', 'timeout',
)


def format_float(value):
    """Stable text form of a float for CSV outputs."""
    return '%.10g' % value


def trace_rows(result):
    """Rows of :data:`TRACE_HEADER` for one finished episode.

    :type result: :class:`~pbprnn.env.world.EpisodeResult`
    :param result: the episode.

    :rtype: list of tuple
    :returns: one row per step, values already formatted as text.
    """
    rows = []
    for record in result.records:
        agent, obstacle, events = record.agent, record.obstacle, record.events
        values = [record.step]
        values.extend(format_float(value) for value in (
            agent.position[0], agent.position[1],
            agent.velocity[0], agent.velocity[1],
            obstacle.position[0], obstacle.position[1],
            obstacle.velocity[0], obstacle.velocity[1],
            record.heading, record.separation,
            agent.goal_distance(), obstacle.goal_distance()))
        values.extend(int(flag) for flag in events)
        rows.append(tuple(values))
    return rows


def write_trace(stream, result, header=True):
    """Write an episode trace to an open text stream.

    :type stream: file-like
    :param stream: opened with ``newline=''``.

    :type result: :class:`~pbprnn.env.world.EpisodeResult`
    :param result: the episode.

    :type header: bool
    :param header: whether to emit the header row first.
    """
    writer = csv.writer(stream, lineterminator='\n')
    if header:
        writer.writerow(TRACE_HEADER)
    writer.writerows(trace_rows(result))


def replay_min_separation(rows):
    """Minimum separation recovered from exported rows.

    :type rows: iterable of sequences
    :param rows: trace rows without the header.

    :rtype: float
    """
    column = TRACE_HEADER.index('separation')
    values = [float(row[column]) for row in rows]
    if not values:
        raise ContractError('an empty trace has no separation')
    return min(values)
