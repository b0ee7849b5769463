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

"""Store of labelled observation windows with balanced sampling."""

import collections
import logging

import numpy as np

from pbprnn._binary import BinaryWriter
from pbprnn._binary import BoundedReader
from pbprnn.exceptions import CheckpointShapeError
from pbprnn.exceptions import ContractError
from pbprnn.exceptions import EmptyDatasetError
from pbprnn.exceptions import MagicMismatchError
from pbprnn.recurrent.network import DEFAULT_SEQUENCE_LENGTH
from pbprnn.recurrent.network import ObservationSequence
from pbprnn.recurrent.network import zero_pad


_LOGGER = logging.getLogger(__name__)

POOL_MAGIC = b'PBPPOOL\0'
STD_FLOOR = 1e-6
DEFAULT_FEATURES = 9


_FeatureScalerTuple = collections.namedtuple(
    'FeatureScaler', ['means', 'stds'])


class FeatureScaler(_FeatureScalerTuple):
    """Per-feature z-scoring with the standard deviations floored."""
    __slots__ = ()

    def __new__(cls, means, stds):
        means = np.array(means, dtype=np.float64)
        stds = np.maximum(np.array(stds, dtype=np.float64), STD_FLOOR)
        if means.shape != stds.shape or means.ndim != 1:
            raise ContractError('scaler needs equal-length vectors')
        means.setflags(write=False)
        stds.setflags(write=False)
        return super(FeatureScaler, cls).__new__(cls, means, stds)

    @classmethod
    def identity(cls, features):
        return cls(np.zeros(features), np.ones(features))

    @property
    def features(self):
        return self.means.shape[0]

    def transform(self, steps):
        """Z-score every row of ``steps``."""
        return (np.asarray(steps, dtype=np.float64) - self.means) / self.stds

    def transform_sequence(self, seq):
        """Z-score the observed rows of a window.

        Leading padding rows stay exact zeros, so a short history reaches
        the model as "no input" rather than as the z-score of a zero
        observation. Zeroed rows after the padding (dropped observations)
        are scaled like any other reading.
        """
        steps = self.transform(seq.steps)
        steps[:seq.pad_count] = 0.0
        return seq.with_steps(steps)


class FeatureStats(object):
    """Running per-feature mean and variance (Welford, block-merged)."""

    def __init__(self, features=DEFAULT_FEATURES):
        self.count = 0
        self.means = np.zeros(features)
        self.m2 = np.zeros(features)

    def __repr__(self):
        return '<FeatureStats count=%d>' % self.count

    @property
    def features(self):
        return self.means.shape[0]

    def update(self, rows):
        """Fold a block of observation rows into the statistics."""
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        if rows.shape[1] != self.features:
            raise ContractError('expected %d features, got %d' % (
                self.features, rows.shape[1]))
        count = rows.shape[0]
        if count == 0:
            return
        block_mean = rows.mean(axis=0)
        block_m2 = ((rows - block_mean) ** 2).sum(axis=0)
        total = self.count + count
        delta = block_mean - self.means
        self.means = self.means + delta * (count / float(total))
        self.m2 = self.m2 + block_m2 + delta * delta * (
            self.count * count / float(total))
        self.count = total

    @property
    def stds(self):
        if self.count == 0:
            return np.ones(self.features)
        return np.sqrt(self.m2 / self.count)

    def scaler(self):
        """Snapshot of the current statistics as a :class:`FeatureScaler`."""
        return FeatureScaler(self.means, self.stds)


def extract_windows(rows, length=DEFAULT_SEQUENCE_LENGTH):
    """One zero-padded window ending at every row of an observation stream.

    :type rows: :class:`numpy.ndarray`, ``(steps, features)``
    :param rows: the episode's observation rows, oldest first.

    :rtype: list of :class:`~pbprnn.recurrent.network.ObservationSequence`
    """
    rows = np.asarray(rows, dtype=np.float64)
    return [zero_pad(rows[max(0, t - length + 1):t + 1], length)
            for t in range(rows.shape[0])]


_TrainingBatchTuple = collections.namedtuple(
    'TrainingBatch', ['examples', 'fallback', 'scaler'])


class TrainingBatch(_TrainingBatchTuple):
    """A z-scored, shuffled training batch.

    :type examples: list of ``(ObservationSequence, label)``
    :param examples: normalized windows and labels.

    :type fallback: bool
    :param fallback: set when one class was empty and the batch was drawn
                     from the other class alone.

    :type scaler: :class:`FeatureScaler`
    :param scaler: the normalization applied to the windows.
    """
    __slots__ = ()

    @property
    def labels(self):
        return np.array([label for _, label in self.examples])

    def __len__(self):
        return len(self.examples)


class ExperiencePool(object):
    """Windows of past episodes, indexed by collision label.

    :type sequence_length: int
    :param sequence_length: window length ``T``.

    :type features: int
    :param features: observation features per row.
    """
    def __init__(self, sequence_length=DEFAULT_SEQUENCE_LENGTH,
                 features=DEFAULT_FEATURES):
        self.sequence_length = int(sequence_length)
        self.positives = []
        self.negatives = []
        self.feature_stats = FeatureStats(features)

    def __repr__(self):
        return '<ExperiencePool positives=%d negatives=%d>' % (
            len(self.positives), len(self.negatives))

    def __len__(self):
        return len(self.positives) + len(self.negatives)

    @property
    def features(self):
        return self.feature_stats.features

    def append_windows(self, windows, label):
        target = self.positives if label == 1 else self.negatives
        target.extend((seq, int(label)) for seq in windows)

    def append_episode(self, episode):
        """Add one window per step of a finished episode.

        Every window carries the episode's collision label.

        :type episode: :class:`~pbprnn.env.world.EpisodeResult`
        :param episode: the finished episode.

        :rtype: :class:`ExperiencePool`
        :returns: the pool itself.
        """
        rows = episode.feature_rows()
        if rows.shape[0] == 0:
            return self
        self.append_windows(extract_windows(rows, self.sequence_length),
                            episode.label)
        self.feature_stats.update(rows)
        return self

    def sample_balanced(self, n, rng):
        """Draw ``n // 2`` windows from each class with replacement.

        :type n: int
        :param n: requested batch size, at least 2.

        :type rng: :class:`numpy.random.Generator`
        :param rng: drives the draws and the shuffle.

        :rtype: :class:`TrainingBatch`
        :returns: the z-scored, shuffled batch. If one class is empty all
                  ``n`` windows come from the other one and ``fallback`` is
                  set.

        :raises: :class:`~pbprnn.exceptions.EmptyDatasetError` when the pool
                 is empty.
        """
        if n < 2:
            raise ContractError('batch size must be at least 2, got %r' % n)
        if not self.positives and not self.negatives:
            raise EmptyDatasetError('cannot sample from an empty pool')
        fallback = not (self.positives and self.negatives)
        if fallback:
            source = self.positives or self.negatives
            _LOGGER.warning(
                'Only one collision class in the pool, drawing %d windows '
                'from %d examples', n, len(source))
            chosen = [source[i] for i in rng.integers(len(source), size=n)]
        else:
            half = n // 2
            chosen = [self.positives[i]
                      for i in rng.integers(len(self.positives), size=half)]
            chosen.extend(self.negatives[i]
                          for i in rng.integers(len(self.negatives),
                                                size=half))
        scaler = self.feature_stats.scaler()
        examples = [(scaler.transform_sequence(chosen[i][0]), chosen[i][1])
                    for i in rng.permutation(len(chosen))]
        return TrainingBatch(examples, fallback, scaler)

    def dump(self, stream):
        """Write the pool to a binary stream.

        Layout: magic, ``<IIII`` (length, features, positives, negatives),
        ``<Q`` stats count, feature means and squared deviations, then for
        every window ``<I`` pad count and its rows, positives first.
        """
        writer = BinaryWriter(stream)
        writer.write(POOL_MAGIC)
        writer.write_struct('<IIII', self.sequence_length, self.features,
                            len(self.positives), len(self.negatives))
        writer.write_struct('<Q', self.feature_stats.count)
        writer.write_floats(self.feature_stats.means)
        writer.write_floats(self.feature_stats.m2)
        for seq, _ in self.positives + self.negatives:
            writer.write_struct('<I', seq.pad_count)
            writer.write_floats(seq.steps)

    @classmethod
    def load(cls, stream):
        """Read a pool written by :meth:`dump`.

        :raises: :class:`~pbprnn.exceptions.MagicMismatchError`,
                 :class:`~pbprnn.exceptions.TruncatedCheckpointError`,
                 :class:`~pbprnn.exceptions.CheckpointShapeError`
        """
        reader = BoundedReader(stream)
        header = stream.read(len(POOL_MAGIC))
        if header != POOL_MAGIC:
            raise MagicMismatchError.from_header(POOL_MAGIC, header)
        length, features, positives, negatives = reader.read_struct('<IIII')
        if length < 1 or features < 1:
            raise CheckpointShapeError(
                'pool declares window %dx%d' % (length, features))
        pool = cls(length, features)
        pool.feature_stats.count = reader.read_struct('<Q')[0]
        pool.feature_stats.means = reader.read_floats((features,))
        pool.feature_stats.m2 = reader.read_floats((features,))
        for index in range(positives + negatives):
            pad_count = reader.read_struct('<I')[0]
            if pad_count > length:
                raise CheckpointShapeError(
                    'window %d declares %d padding rows' % (index, pad_count))
            seq = ObservationSequence(
                reader.read_floats((length, features)), pad_count)
            target = pool.positives if index < positives else pool.negatives
            target.append((seq, 1 if index < positives else 0))
        return pool
