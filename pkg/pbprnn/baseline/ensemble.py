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

"""Ensemble of LSTM members with Monte-Carlo dropout inference."""

import logging

import numpy as np

from pbprnn.baseline.adam import AdamState
from pbprnn.baseline.adam import DEFAULT_LEARNING_RATE
from pbprnn.baseline.lstm import DEFAULT_HIDDEN_DIM
from pbprnn.baseline.lstm import LstmNet
from pbprnn.baseline.lstm import forward_batch
from pbprnn.baseline.lstm import squared_error_gradients
from pbprnn.exceptions import ContractError
from pbprnn.exceptions import EmptyDatasetError
from pbprnn.recurrent.network import PredictiveDistribution


_LOGGER = logging.getLogger(__name__)

DEFAULT_ENSEMBLE_SIZE = 5
DEFAULT_DROPOUT_RATE = 0.7
DEFAULT_PASSES = 20
DEFAULT_BATCH_SIZE = 32


class Ensemble(object):
    """A list of LSTM members sharing the dropout settings.

    :type members: list of :class:`~pbprnn.baseline.lstm.LstmNet`
    :param members: the networks, at least one.

    :type dropout_rate: float
    :param dropout_rate: probability of dropping a hidden unit at inference.

    :type passes_per_member: int
    :param passes_per_member: stochastic passes drawn from every member.

    :type learning_rate: float
    :param learning_rate: Adam step size used by :func:`train_mde`.
    """
    def __init__(self, members, dropout_rate=DEFAULT_DROPOUT_RATE,
                 passes_per_member=DEFAULT_PASSES,
                 learning_rate=DEFAULT_LEARNING_RATE):
        members = list(members)
        if not members:
            raise ContractError('an ensemble needs at least one member')
        dims = set((member.input_dim, member.hidden_dim) for member in members)
        if len(dims) != 1:
            raise ContractError('ensemble members differ in shape: %s' % (
                sorted(dims),))
        if not 0.0 <= dropout_rate < 1.0:
            raise ContractError('dropout_rate must lie in [0, 1), got %r' % (
                dropout_rate,))
        if passes_per_member < 1:
            raise ContractError('passes_per_member must be at least 1')
        self.members = members
        self.dropout_rate = float(dropout_rate)
        self.passes_per_member = int(passes_per_member)
        self.learning_rate = float(learning_rate)

    def __repr__(self):
        return '<Ensemble members=%d dropout=%g passes=%d>' % (
            len(self.members), self.dropout_rate, self.passes_per_member)

    @property
    def input_dim(self):
        return self.members[0].input_dim

    @property
    def hidden_dim(self):
        return self.members[0].hidden_dim

    @property
    def prediction_count(self):
        """Number of stochastic predictions behind one query."""
        return len(self.members) * self.passes_per_member

    @classmethod
    def initialize(cls, input_dim, rng, size=DEFAULT_ENSEMBLE_SIZE,
                   hidden_dim=DEFAULT_HIDDEN_DIM, **kwargs):
        """Draw ``size`` members, each from its own child generator."""
        seeds = rng.integers(0, 2 ** 63, size=size)
        members = [LstmNet.initialize(input_dim, hidden_dim,
                                      np.random.default_rng(int(seed)))
                   for seed in seeds]
        return cls(members, **kwargs)

    def replace(self, members):
        return Ensemble(members, dropout_rate=self.dropout_rate,
                        passes_per_member=self.passes_per_member,
                        learning_rate=self.learning_rate)

    def parameter_count(self):
        return sum(member.parameter_count() for member in self.members)


class MdeTrainingStats(object):
    """Per-epoch mean squared error of every member."""

    def __init__(self):
        self.epoch_loss = []

    def __repr__(self):
        return '<MdeTrainingStats epochs=%d>' % self.epochs

    @property
    def epochs(self):
        return len(self.epoch_loss)

    def as_dict(self):
        return {'epoch_loss': [list(map(float, row))
                               for row in self.epoch_loss]}


def _stack(dataset):
    inputs = np.stack([seq.steps for seq, _ in dataset])
    labels = np.array([float(label) for _, label in dataset])
    return inputs, labels


def train_member(member, inputs, labels, epochs, rng,
                 learning_rate=DEFAULT_LEARNING_RATE,
                 batch_size=DEFAULT_BATCH_SIZE):
    """Fit one member by Adam on squared error, without dropout.

    :rtype: tuple
    :returns: the trained copy of ``member`` and its per-epoch losses.
    """
    net = member.copy()
    adam = AdamState(net.parameters(), learning_rate=learning_rate)
    count = labels.shape[0]
    losses = []
    for _ in range(epochs):
        order = rng.permutation(count)
        total = 0.0
        for start in range(0, count, batch_size):
            batch = order[start:start + batch_size]
            loss, grads = squared_error_gradients(
                net, inputs[batch], labels[batch])
            adam.apply(net.parameters(), grads)
            total += loss * batch.shape[0]
        losses.append(total / count)
    return net, losses


def train_mde(ensemble, dataset, epochs, rng, batch_size=DEFAULT_BATCH_SIZE,
              stats=None):
    """Train every member independently on the same dataset.

    Each member gets its own generator (seeded from ``rng``) that drives
    its shuffles.

    :type ensemble: :class:`Ensemble`
    :param ensemble: the current ensemble.

    :type dataset: list of ``(ObservationSequence, label)``
    :param dataset: the training examples.

    :type epochs: int
    :param epochs: number of sweeps per member.

    :type rng: :class:`numpy.random.Generator`
    :param rng: parent generator.

    :type stats: :class:`MdeTrainingStats`
    :param stats: (Optional) receives the per-epoch member losses.

    :rtype: :class:`Ensemble`
    :returns: the trained ensemble.

    :raises: :class:`~pbprnn.exceptions.EmptyDatasetError`
    """
    dataset = list(dataset)
    if not dataset:
        raise EmptyDatasetError('cannot train on an empty dataset')
    if epochs == 0:
        return ensemble
    inputs, labels = _stack(dataset)
    seeds = rng.integers(0, 2 ** 63, size=len(ensemble.members))
    members = []
    member_losses = []
    for index, (member, seed) in enumerate(zip(ensemble.members, seeds)):
        trained, losses = train_member(
            member, inputs, labels, epochs, np.random.default_rng(int(seed)),
            learning_rate=ensemble.learning_rate, batch_size=batch_size)
        _LOGGER.debug('Member %d trained for %d epochs, final loss %.6f',
                      index, epochs, losses[-1])
        members.append(trained)
        member_losses.append(losses)
    if stats is not None:
        stats.epoch_loss.extend(zip(*member_losses))
    _LOGGER.info('Trained %d members for %d epochs, mean final loss %.6f',
                 len(members), epochs,
                 float(np.mean([losses[-1] for losses in member_losses])))
    return ensemble.replace(members)


def draw_masks(ensemble, rng):
    """Keep masks for every member and pass, member-major.

    :rtype: :class:`numpy.ndarray`, ``(members, passes, H)``
    """
    keep = 1.0 - ensemble.dropout_rate
    shape = (len(ensemble.members), ensemble.passes_per_member,
             ensemble.hidden_dim)
    return (rng.random(shape) < keep).astype(np.float64)


def member_predictions(member, seq, masks, dropout_rate, serial=False):
    """Predictions of one member for a stack of masks.

    With ``serial`` the passes run one after another instead of as one
    batched evaluation.
    """
    if serial:
        return np.array([
            forward_batch(member, seq.steps[None, :, :], mask[None, :],
                          dropout_rate)[0]
            for mask in masks])
    inputs = np.repeat(seq.steps[None, :, :], masks.shape[0], axis=0)
    return forward_batch(member, inputs, masks, dropout_rate)


def summarize_predictions(values):
    """Sample mean and unbiased sample variance of a prediction list.

    :rtype: :class:`~pbprnn.recurrent.network.PredictiveDistribution`
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise ContractError('no predictions to summarize')
    mean = float(np.mean(values))
    variance = float(np.var(values, ddof=1)) if values.size > 1 else 0.0
    return PredictiveDistribution(mean, variance, variance)


def mc_predict(ensemble, seq, rng, serial=False):
    """Monte-Carlo dropout prediction of the whole ensemble.

    :type ensemble: :class:`Ensemble`
    :param ensemble: the trained ensemble.

    :type seq: :class:`~pbprnn.recurrent.network.ObservationSequence`
    :param seq: the query window.

    :type rng: :class:`numpy.random.Generator`
    :param rng: source of the dropout masks.

    :type serial: bool
    :param serial: run each pass on its own.

    :rtype: :class:`~pbprnn.recurrent.network.PredictiveDistribution`
    :returns: sample mean and variance of ``members x passes`` predictions;
              ``total_variance`` equals ``variance``.
    """
    if seq.features != ensemble.input_dim:
        raise ContractError('ensemble expects %d features, got %d' % (
            ensemble.input_dim, seq.features))
    masks = draw_masks(ensemble, rng)
    predictions = np.concatenate([
        member_predictions(member, seq, member_masks, ensemble.dropout_rate,
                           serial=serial)
        for member, member_masks in zip(ensemble.members, masks)])
    return summarize_predictions(predictions)
