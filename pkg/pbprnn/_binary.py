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

"""Little-endian record reading and writing for binary files."""

import struct

import numpy as np

from pbprnn.exceptions import TruncatedCheckpointError


_FLOAT = np.dtype('<f8')


class BoundedReader(object):
    """Reads exact-size records from a binary stream.

    :type stream: readable binary file-like object
    :param stream: the source.
    """
    def __init__(self, stream):
        self._stream = stream
        self._consumed = 0

    def __repr__(self):
        return 'Reader over %s with %d bytes consumed' % (
            self._stream, self._consumed)

    @property
    def consumed(self):
        """Number of bytes read so far."""
        return self._consumed

    def read(self, size):
        """Read exactly ``size`` bytes.

        Unlike a plain stream read, running out of data before ``size``
        bytes arrived is an error.

        :type size: int
        :param size: number of bytes required.

        :rtype: bytes
        :returns: the bytes read.

        :raises: :class:`~pbprnn.exceptions.TruncatedCheckpointError`
        """
        data = self._stream.read(size)
        if len(data) < size:
            raise TruncatedCheckpointError(
                self._consumed + len(data), self._consumed + size)
        self._consumed += size
        return data

    def read_struct(self, fmt):
        """Unpack one :mod:`struct` record (``fmt`` must be little-endian)."""
        return struct.unpack(fmt, self.read(struct.calcsize(fmt)))

    def read_floats(self, shape):
        """Read a row-major float64 array of the given shape."""
        count = int(np.prod(shape, dtype=np.int64))
        data = self.read(count * _FLOAT.itemsize)
        return np.frombuffer(data, dtype=_FLOAT).astype(np.float64).reshape(
            shape)

    def peek_end(self):
        """Whether the stream has no bytes left; consumes nothing if so."""
        data = self._stream.read(1)
        if not data:
            return True
        self._stream.seek(-1, 1)
        return False


class BinaryWriter(object):
    """Writes little-endian records to a binary stream."""

    def __init__(self, stream):
        self._stream = stream

    def write(self, data):
        self._stream.write(data)

    def write_struct(self, fmt, *values):
        self._stream.write(struct.pack(fmt, *values))

    def write_floats(self, array):
        self._stream.write(
            np.ascontiguousarray(array, dtype=_FLOAT).tobytes())
