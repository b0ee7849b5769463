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

"""Named random streams derived from one master seed."""

import zlib

import numpy as np

from pbprnn.exceptions import ContractError


MAX_SEED = 2 ** 64 - 1


def check_seed(seed):
    """Validate a master seed.

    :raises: :class:`~pbprnn.exceptions.ContractError` unless
             ``0 <= seed < 2**64``.
    """
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ContractError('seed must fit in 64 unsigned bits, got %d' % seed)
    return seed


class SeedBank(object):
    """Hands out independent generators keyed by ``(name, index)``.

    Each stream is a :class:`numpy.random.Philox` generator seeded from
    ``SeedSequence(master_seed, spawn_key=(crc32(name), index))``, so a
    stream never depends on which other streams were requested.

    :type master_seed: int
    :param master_seed: the run seed.
    """
    def __init__(self, master_seed):
        self.master_seed = check_seed(master_seed)

    def __repr__(self):
        return '<SeedBank master_seed=%d>' % self.master_seed

    def sequence(self, name, index=0):
        key = (zlib.crc32(name.encode('utf-8')), int(index))
        return np.random.SeedSequence(self.master_seed, spawn_key=key)

    def generator(self, name, index=0):
        """The generator of stream ``name`` number ``index``.

        :rtype: :class:`numpy.random.Generator`
        """
        return np.random.Generator(np.random.Philox(self.sequence(name, index)))

    def child(self, name, index=0):
        """A bank whose master seed is drawn from stream ``(name, index)``."""
        state = self.sequence(name, index).generate_state(2, np.uint32)
        return SeedBank(int(state[0]) << 32 | int(state[1]))
