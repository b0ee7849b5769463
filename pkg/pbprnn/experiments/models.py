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

"""Uniform predict / fit surface over the two collision models.

Both adapters take raw observation windows and z-score them with the
feature statistics captured at their latest training round.
"""

import logging

import numpy as np

from pbprnn.baseline.ensemble import Ensemble
from pbprnn.baseline.ensemble import MdeTrainingStats
from pbprnn.baseline.ensemble import mc_predict
from pbprnn.baseline.ensemble import train_mde
from pbprnn.checkpoint import load_checkpoint
from pbprnn.checkpoint import save_checkpoint
from pbprnn.exceptions import ContractError
from pbprnn.exceptions import UntrainedModelError
from pbprnn.experiments.config import MDE
from pbprnn.experiments.config import PBP_RNN
from pbprnn.recurrent.network import RecurrentBayesNet
from pbprnn.recurrent.network import forward_sequence
from pbprnn.recurrent.training import TrainingStats
from pbprnn.recurrent.training import train_epochs


_LOGGER = logging.getLogger(__name__)


class _Model(object):
    """Shared bookkeeping of the adapters."""

    kind = None

    def __init__(self, scaler=None):
        self.scaler = scaler
        self.epochs_trained = 0

    def __repr__(self):
        return '<%s trained=%s epochs=%d>' % (
            self.__class__.__name__, self.trained, self.epochs_trained)

    @property
    def trained(self):
        return self.scaler is not None

    def _scaled(self, seq):
        if self.scaler is None:
            raise UntrainedModelError('%s has not been trained' % self.kind)
        return self.scaler.transform_sequence(seq)

    def fork(self, rng):
        """An adapter sharing the weights with its own randomness."""
        return self

    def save(self, path):
        save_checkpoint(path, self.payload, self.scaler)


class PbpModel(_Model):
    """The recurrent Bayesian network.

    :type net: :class:`~pbprnn.recurrent.network.RecurrentBayesNet`
    :param net: the network belief.

    :type scaler: :class:`~pbprnn.experience.FeatureScaler`
    :param scaler: (Optional) input normalization; ``None`` until trained.
    """

    kind = PBP_RNN

    def __init__(self, net, scaler=None):
        super(PbpModel, self).__init__(scaler)
        self.net = net
        self.stats = TrainingStats()

    @property
    def payload(self):
        return self.net

    def predict(self, seq):
        return forward_sequence(self.net, self._scaled(seq))[1]

    def fit(self, batch, epochs, rng):
        """Train on a balanced batch and adopt its normalization.

        :rtype: float
        :returns: mean ``logZ`` of the last epoch.
        """
        self.net, self.stats = train_epochs(
            self.net, batch.examples, epochs, rng, stats=self.stats)
        self.scaler = batch.scaler
        self.epochs_trained += epochs
        return self.stats.epoch_logZ[-1] if epochs else float('nan')

    def parameter_count(self):
        return self.net.parameter_count()

    def training_summary(self):
        return self.stats.as_dict()


class MdeModel(_Model):
    """The Monte-Carlo dropout LSTM ensemble.

    :type ensemble: :class:`~pbprnn.baseline.ensemble.Ensemble`
    :param ensemble: the members.

    :type rng: :class:`numpy.random.Generator`
    :param rng: source of the inference dropout masks.
    """

    kind = MDE

    def __init__(self, ensemble, scaler=None, rng=None):
        super(MdeModel, self).__init__(scaler)
        self.ensemble = ensemble
        self.rng = np.random.default_rng() if rng is None else rng
        self.stats = MdeTrainingStats()
        self.serial = False

    @property
    def payload(self):
        return self.ensemble

    def fork(self, rng):
        forked = MdeModel(self.ensemble, self.scaler, rng)
        forked.epochs_trained = self.epochs_trained
        forked.serial = self.serial
        return forked

    def predict(self, seq):
        return mc_predict(self.ensemble, self._scaled(seq), self.rng,
                          serial=self.serial)

    def fit(self, batch, epochs, rng):
        """Train every member on a balanced batch.

        :rtype: float
        :returns: mean squared error of the last epoch over the members.
        """
        self.ensemble = train_mde(self.ensemble, batch.examples, epochs, rng,
                                  stats=self.stats)
        self.scaler = batch.scaler
        self.epochs_trained += epochs
        if not epochs:
            return float('nan')
        return float(np.mean(self.stats.epoch_loss[-1]))

    def parameter_count(self):
        return self.ensemble.parameter_count()

    def training_summary(self):
        return self.stats.as_dict()


def build_model(config, input_dim, bank):
    """A fresh, untrained adapter for ``config.model_kind``.

    :type bank: :class:`~pbprnn.seeding.SeedBank`
    :param bank: provides the ``model-init`` and ``dropout`` streams.
    """
    init_rng = bank.generator('model-init')
    if config.model_kind == PBP_RNN:
        return PbpModel(RecurrentBayesNet.initialize(
            input_dim, config.hidden_dim, init_rng))
    if config.model_kind == MDE:
        ensemble = Ensemble.initialize(
            input_dim, init_rng, size=config.ensemble_size,
            hidden_dim=config.hidden_dim, dropout_rate=config.dropout_rate,
            passes_per_member=config.passes_per_member,
            learning_rate=config.learning_rate)
        return MdeModel(ensemble, rng=bank.generator('dropout'))
    raise ContractError('unknown model kind %r' % (config.model_kind,))


def load_model(path, bank, expected=None):
    """Restore an adapter from a checkpoint file.

    :raises: :class:`~pbprnn.exceptions.UntrainedModelError` when the file
             carries no input normalization.
    """
    payload, scaler = load_checkpoint(path, expected)
    if scaler is None:
        raise UntrainedModelError(
            'checkpoint %s has no input normalization' % path)
    if isinstance(payload, RecurrentBayesNet):
        return PbpModel(payload, scaler)
    return MdeModel(payload, scaler, rng=bank.generator('dropout'))
