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

"""Discrete motion primitives of the agent."""

import collections

import numpy as np

from pbprnn.exceptions import ContractError


PRIMITIVE_COUNT = 11
MAX_OFFSET = np.pi / 5.0
PRIMITIVE_LENGTH = 0.05


_MotionPrimitiveTuple = collections.namedtuple(
    'MotionPrimitive', ['heading_offset', 'length'])


class MotionPrimitive(_MotionPrimitiveTuple):
    """One straight step at an offset from the goal bearing."""
    __slots__ = ()

    def displacement(self, position, goal):
        """The move this primitive makes from ``position``."""
        delta = np.asarray(goal, dtype=np.float64) - np.asarray(
            position, dtype=np.float64)
        heading = np.arctan2(delta[1], delta[0]) + self.heading_offset
        return self.length * np.array([np.cos(heading), np.sin(heading)])


class MotionPrimitiveSet(object):
    """An ordered, symmetric set of primitives.

    :type primitives: sequence of :class:`MotionPrimitive`
    :param primitives: ordered by strictly increasing offset.
    """
    def __init__(self, primitives):
        primitives = tuple(primitives)
        if not primitives:
            raise ContractError('a primitive set cannot be empty')
        offsets = [item.heading_offset for item in primitives]
        if any(b <= a for a, b in zip(offsets, offsets[1:])):
            raise ContractError('offsets must be strictly increasing')
        self.primitives = primitives

    def __repr__(self):
        return '<MotionPrimitiveSet count=%d>' % len(self)

    def __len__(self):
        return len(self.primitives)

    def __iter__(self):
        return iter(self.primitives)

    def __getitem__(self, index):
        return self.primitives[index]

    @property
    def offsets(self):
        return np.array([item.heading_offset for item in self.primitives])

    def mirror_index(self, index):
        """Index of the primitive mirrored about the zero offset."""
        return len(self) - 1 - index


def build_primitives(count=PRIMITIVE_COUNT, max_offset=MAX_OFFSET,
                     length=PRIMITIVE_LENGTH):
    """Evenly spaced offsets on ``[-max_offset, max_offset]``.

    Offsets are generated as ``spacing * (k - centre)`` so the set is exactly
    symmetric and an odd count has an exact zero in the middle.

    :rtype: :class:`MotionPrimitiveSet`
    """
    if count < 2:
        raise ContractError('need at least two primitives, got %r' % count)
    spacing = 2.0 * max_offset / (count - 1)
    centre = (count - 1) / 2.0
    return MotionPrimitiveSet(
        MotionPrimitive(spacing * (k - centre), float(length))
        for k in range(count))
