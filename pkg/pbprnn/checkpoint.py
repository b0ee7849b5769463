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

"""Binary checkpoints of trained models.

Both formats are little-endian. A recurrent network file holds::

    b"PBPRNN1\\0"  <II input_dim, hidden_dim
    for each layer (recurrent_input, recurrent_hidden, readout):
        means, then variances, row-major <f8
    <4d noise alpha, beta, prior alpha_lambda, beta_lambda

An ensemble file holds::

    b"MDE1\\0"  <I member count
    for each member: <II input_dim, hidden_dim, then its arrays as <f8
    <d dropout_rate  <I passes_per_member

Either may end with a normalization trailer ``b"FEAT" <I features``
followed by the feature means and standard deviations.
"""

import logging

from pbprnn._binary import BinaryWriter
from pbprnn._binary import BoundedReader
from pbprnn.baseline.ensemble import Ensemble
from pbprnn.baseline.lstm import LstmNet
from pbprnn.core.gaussian import GammaPosterior
from pbprnn.core.gaussian import GaussianMatrix
from pbprnn.core.gaussian import PriorSpec
from pbprnn.exceptions import CheckpointError
from pbprnn.exceptions import CheckpointShapeError
from pbprnn.exceptions import ContractError
from pbprnn.exceptions import MagicMismatchError
from pbprnn.exceptions import NumericError
from pbprnn.experience import FeatureScaler
from pbprnn.recurrent.network import RecurrentBayesNet


_LOGGER = logging.getLogger(__name__)

PBP_MAGIC = b'PBPRNN1\0'
MDE_MAGIC = b'MDE1\0'
FEATURE_MAGIC = b'FEAT'


def _write_scaler(writer, scaler):
    if scaler is None:
        return
    writer.write(FEATURE_MAGIC)
    writer.write_struct('<I', scaler.features)
    writer.write_floats(scaler.means)
    writer.write_floats(scaler.stds)


def _read_scaler(reader):
    if reader.peek_end():
        return None
    tag = reader.read(len(FEATURE_MAGIC))
    if tag != FEATURE_MAGIC:
        raise MagicMismatchError.from_header(FEATURE_MAGIC, tag)
    features = reader.read_struct('<I')[0]
    means = reader.read_floats((features,))
    stds = reader.read_floats((features,))
    if not reader.peek_end():
        raise CheckpointError('unexpected data after the feature trailer')
    return FeatureScaler(means, stds)


def _check_magic(stream, expected):
    header = stream.read(len(expected))
    if header != expected:
        raise MagicMismatchError.from_header(expected, header)


def save_pbp(stream, net, scaler=None):
    """Write a :class:`~pbprnn.recurrent.network.RecurrentBayesNet`."""
    writer = BinaryWriter(stream)
    writer.write(PBP_MAGIC)
    writer.write_struct('<II', net.input_dim, net.hidden_dim)
    for layer in net.layers():
        writer.write_floats(layer.means)
        writer.write_floats(layer.variances)
    writer.write_struct('<4d', net.noise.alpha, net.noise.beta,
                        net.prior.alpha_lambda, net.prior.beta_lambda)
    _write_scaler(writer, scaler)


def load_pbp(stream):
    """Read a recurrent network.

    :rtype: tuple
    :returns: the network and its :class:`~pbprnn.experience.FeatureScaler`
              (``None`` if the file has no trailer).
    """
    _check_magic(stream, PBP_MAGIC)
    reader = BoundedReader(stream)
    input_dim, hidden_dim = reader.read_struct('<II')
    if input_dim < 1 or hidden_dim < 1:
        raise CheckpointShapeError('invalid dimensions %dx%d' % (
            input_dim, hidden_dim))
    shapes = [(hidden_dim, input_dim + 1), (hidden_dim, hidden_dim + 1),
              (1, hidden_dim + 1)]
    arrays = []
    for shape in shapes:
        arrays.append((reader.read_floats(shape), reader.read_floats(shape)))
    alpha, beta, alpha_lambda, beta_lambda = reader.read_struct('<4d')
    scaler = _read_scaler(reader)
    try:
        layers = [GaussianMatrix(means, variances)
                  for means, variances in arrays]
        net = RecurrentBayesNet(
            layers[0], layers[1], layers[2],
            noise=GammaPosterior(alpha, beta),
            prior=PriorSpec(alpha_lambda, beta_lambda))
    except (ContractError, NumericError) as exc:
        raise CheckpointError('invalid network payload: %s' % exc)
    return net, scaler


def save_mde(stream, ensemble, scaler=None):
    """Write an :class:`~pbprnn.baseline.ensemble.Ensemble`."""
    writer = BinaryWriter(stream)
    writer.write(MDE_MAGIC)
    writer.write_struct('<I', len(ensemble.members))
    for member in ensemble.members:
        writer.write_struct('<II', member.input_dim, member.hidden_dim)
        for array in member.parameters():
            writer.write_floats(array)
    writer.write_struct('<d', ensemble.dropout_rate)
    writer.write_struct('<I', ensemble.passes_per_member)
    _write_scaler(writer, scaler)


def load_mde(stream):
    """Read an ensemble.

    :rtype: tuple
    :returns: the ensemble and its scaler (or ``None``).
    """
    _check_magic(stream, MDE_MAGIC)
    reader = BoundedReader(stream)
    count = reader.read_struct('<I')[0]
    if count < 1:
        raise CheckpointShapeError('an ensemble needs members, got 0')
    payloads = []
    for _ in range(count):
        input_dim, hidden_dim = reader.read_struct('<II')
        if input_dim < 1 or hidden_dim < 1:
            raise CheckpointShapeError('invalid member dimensions %dx%d' % (
                input_dim, hidden_dim))
        payloads.append([
            reader.read_floats((4 * hidden_dim, input_dim)),
            reader.read_floats((4 * hidden_dim, hidden_dim)),
            reader.read_floats((4 * hidden_dim,)),
            reader.read_floats((hidden_dim,)),
            reader.read_floats(()),
        ])
    dropout_rate = reader.read_struct('<d')[0]
    passes = reader.read_struct('<I')[0]
    scaler = _read_scaler(reader)
    try:
        ensemble = Ensemble([LstmNet(*arrays) for arrays in payloads],
                            dropout_rate=dropout_rate,
                            passes_per_member=passes)
    except (ContractError, NumericError) as exc:
        raise CheckpointError('invalid ensemble payload: %s' % exc)
    return ensemble, scaler


def save_checkpoint(path, model, scaler=None):
    """Write ``model`` to ``path`` in the format matching its type."""
    with open(path, 'wb') as stream:
        if isinstance(model, RecurrentBayesNet):
            save_pbp(stream, model, scaler)
        elif isinstance(model, Ensemble):
            save_mde(stream, model, scaler)
        else:
            raise ContractError('cannot checkpoint %r' % (model,))
    _LOGGER.info('Wrote checkpoint %s', path)


def load_checkpoint(path, expected=None):
    """Read a checkpoint, picking the format from its magic bytes.

    :type path: str
    :param path: the file.

    :type expected: str
    :param expected: (Optional) ``'pbp_rnn'`` or ``'mde'``; any other
                     format is rejected with
                     :class:`~pbprnn.exceptions.MagicMismatchError`.

    :rtype: tuple
    :returns: the model and its scaler (or ``None``).
    """
    loaders = {'pbp_rnn': (PBP_MAGIC, load_pbp), 'mde': (MDE_MAGIC, load_mde)}
    with open(path, 'rb') as stream:
        if expected is not None:
            if expected not in loaders:
                raise ContractError('unknown model kind %r' % (expected,))
            return loaders[expected][1](stream)
        header = stream.read(len(PBP_MAGIC))
        stream.seek(0)
        for magic, loader in loaders.values():
            if header.startswith(magic):
                return loader(stream)
        raise MagicMismatchError.from_header(PBP_MAGIC, header)
