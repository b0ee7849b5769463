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

"""Exceptions raised by :mod:`pbprnn`."""


class Error(Exception):
    """Base class for all exceptions."""


class ContractError(Error, ValueError):
    """A precondition of an operation was violated (shape, range, state)."""


class NumericError(Error, ArithmeticError):
    """A computation produced or received a non-finite or invalid number."""


class EmptyDatasetError(ContractError):
    """Training or sampling was requested on an empty dataset."""


class TerminalWorldError(ContractError):
    """A world that already reached a terminal event was stepped again."""


class UntrainedModelError(Error):
    """Evaluation was requested from a model that was never fitted."""


class ConfigError(Error):
    """A configuration document could not be parsed.

    :type message: str
    :param message: what went wrong

    :type line: int
    :param line: (Optional) 1-based line number of the offending entry

    :type key: str
    :param key: (Optional) key of the offending entry
    """
    def __init__(self, message, line=None, key=None):
        super(ConfigError, self).__init__(message)
        self.message = message
        self.line = line
        self.key = key

    def __str__(self):
        parts = []
        if self.line is not None:
            parts.append('line %d' % self.line)
        if self.key is not None:
            parts.append('key %r' % self.key)
        if not parts:
            return self.message
        return '%s: %s' % (', '.join(parts), self.message)


class CheckpointError(Error):
    """Errors related to checkpoint and pool files."""


class CheckpointShapeError(CheckpointError):
    """A checkpoint declares dimensions that do not fit the payload."""


class TruncatedCheckpointError(CheckpointError):
    """The file ended before the declared payload was read.

    :type partial: int
    :param partial: number of bytes read before the file ended

    :type expected: int
    :param expected: number of bytes the reader required
    """
    def __init__(self, partial, expected):
        super(TruncatedCheckpointError, self).__init__()
        self.partial = partial
        self.expected = expected

    def __str__(self):
        return 'Checkpoint truncated: read %d of %d bytes' % (
            self.partial, self.expected)


class MagicMismatchError(CheckpointError):
    """The file does not start with the magic bytes of the expected format.

    :type expected: bytes
    :param expected: magic bytes of the format being loaded

    :type actual: bytes
    :param actual: bytes found at the start of the file
    """
    def __init__(self, expected, actual):
        super(MagicMismatchError, self).__init__()
        self.expected = expected
        self.actual = actual

    def __str__(self):
        return 'Checkpoint magic mismatch: expected %r, found %r' % (
            self.expected, self.actual)

    @classmethod
    def from_header(cls, expected, header):
        """Factory:  construct an exception from the leading file bytes.

        :type expected: bytes
        :param expected: magic bytes of the format being loaded

        :type header: bytes
        :param header: the leading bytes of the file (any length)

        :rtype: :class:`MagicMismatchError`
        :returns: The error naming both magics.
        """
        return cls(expected, bytes(header[:len(expected)]))
