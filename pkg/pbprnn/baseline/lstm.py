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

"""Single-layer LSTM with a rectified scalar readout.

Gate blocks are stacked in the order input, forget, output, candidate, so
``input_weights`` has shape ``(4 * hidden, input)``. All routines work on
a batch of windows shaped ``(batch, T, input)``.
"""

import numpy as np

from pbprnn.exceptions import ContractError


DEFAULT_HIDDEN_DIM = 16

PARAMETERS = ('input_weights', 'hidden_weights', 'gate_bias',
              'readout_weights', 'readout_bias')


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


class LstmNet(object):
    """Parameters of one LSTM member.

    :type input_weights: :class:`numpy.ndarray`, ``(4H, D)``
    :type hidden_weights: :class:`numpy.ndarray`, ``(4H, H)``
    :type gate_bias: :class:`numpy.ndarray`, ``(4H,)``
    :type readout_weights: :class:`numpy.ndarray`, ``(H,)``
    :type readout_bias: float
    """
    def __init__(self, input_weights, hidden_weights, gate_bias,
                 readout_weights, readout_bias):
        self.input_weights = np.array(input_weights, dtype=np.float64)
        self.hidden_weights = np.array(hidden_weights, dtype=np.float64)
        self.gate_bias = np.array(gate_bias, dtype=np.float64)
        self.readout_weights = np.array(readout_weights, dtype=np.float64)
        self.readout_bias = np.array(readout_bias, dtype=np.float64).reshape(())
        hidden = self.hidden_weights.shape[1]
        if (self.input_weights.ndim != 2 or
                self.input_weights.shape[0] != 4 * hidden or
                self.hidden_weights.shape != (4 * hidden, hidden) or
                self.gate_bias.shape != (4 * hidden,) or
                self.readout_weights.shape != (hidden,)):
            raise ContractError('inconsistent LSTM parameter shapes')
        for name in PARAMETERS:
            if not np.all(np.isfinite(getattr(self, name))):
                raise ContractError('%s contains non-finite entries' % name)

    def __repr__(self):
        return '<LstmNet input=%d hidden=%d>' % (
            self.input_dim, self.hidden_dim)

    @property
    def input_dim(self):
        return self.input_weights.shape[1]

    @property
    def hidden_dim(self):
        return self.hidden_weights.shape[1]

    @classmethod
    def initialize(cls, input_dim, hidden_dim=DEFAULT_HIDDEN_DIM, rng=None):
        """Uniform ``(-1/sqrt(H), 1/sqrt(H))`` initialization."""
        if rng is None:
            rng = np.random.default_rng()
        bound = 1.0 / np.sqrt(hidden_dim)
        return cls(
            rng.uniform(-bound, bound, size=(4 * hidden_dim, input_dim)),
            rng.uniform(-bound, bound, size=(4 * hidden_dim, hidden_dim)),
            rng.uniform(-bound, bound, size=4 * hidden_dim),
            rng.uniform(-bound, bound, size=hidden_dim),
            0.0)

    @classmethod
    def zeros(cls, input_dim, hidden_dim=DEFAULT_HIDDEN_DIM,
              readout_bias=0.0):
        return cls(np.zeros((4 * hidden_dim, input_dim)),
                   np.zeros((4 * hidden_dim, hidden_dim)),
                   np.zeros(4 * hidden_dim), np.zeros(hidden_dim),
                   readout_bias)

    def parameters(self):
        """The parameter arrays in :data:`PARAMETERS` order."""
        return [getattr(self, name) for name in PARAMETERS]

    def copy(self):
        return LstmNet(*[array.copy() for array in self.parameters()])

    def flat(self):
        """All parameters concatenated into one vector."""
        return np.concatenate([array.ravel() for array in self.parameters()])

    def parameter_count(self):
        return int(sum(array.size for array in self.parameters()))


class _Cache(object):

    def __init__(self):
        self.inputs = None
        self.hidden = []
        self.cells = []
        self.gates = []
        self.pre_output = None


def forward_batch(net, inputs, masks=None, dropout_rate=0.0, cache=None):
    """Run the LSTM over a batch of windows.

    :type inputs: :class:`numpy.ndarray`, ``(batch, T, D)``
    :param inputs: the windows.

    :type masks: :class:`numpy.ndarray`, ``(batch, H)``
    :param masks: (Optional) binary keep masks applied to the hidden state
                  at every step, scaled by ``1 / (1 - dropout_rate)``.

    :rtype: :class:`numpy.ndarray`, ``(batch,)``
    :returns: the rectified outputs.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 3 or inputs.shape[2] != net.input_dim:
        raise ContractError('LSTM expects (batch, T, %d) inputs, got %s' % (
            net.input_dim, inputs.shape))
    batch, length, _ = inputs.shape
    hidden_dim = net.hidden_dim
    if masks is not None:
        masks = np.asarray(masks, dtype=np.float64)
        if masks.shape != (batch, hidden_dim):
            raise ContractError('masks must be (%d, %d), got %s' % (
                batch, hidden_dim, masks.shape))
        if not 0.0 <= dropout_rate < 1.0:
            raise ContractError('dropout_rate must lie in [0, 1)')
        masks = masks / (1.0 - dropout_rate)
    hidden = np.zeros((batch, hidden_dim))
    cell = np.zeros((batch, hidden_dim))
    if cache is not None:
        cache.inputs = inputs
        cache.hidden.append(hidden)
        cache.cells.append(cell)
    for t in range(length):
        z = (inputs[:, t].dot(net.input_weights.T) +
             hidden.dot(net.hidden_weights.T) + net.gate_bias)
        gate_in = _sigmoid(z[:, :hidden_dim])
        gate_forget = _sigmoid(z[:, hidden_dim:2 * hidden_dim])
        gate_out = _sigmoid(z[:, 2 * hidden_dim:3 * hidden_dim])
        candidate = np.tanh(z[:, 3 * hidden_dim:])
        cell = gate_forget * cell + gate_in * candidate
        hidden = gate_out * np.tanh(cell)
        if masks is not None:
            hidden = hidden * masks
        if cache is not None:
            cache.gates.append((gate_in, gate_forget, gate_out, candidate))
            cache.hidden.append(hidden)
            cache.cells.append(cell)
    pre_output = hidden.dot(net.readout_weights) + net.readout_bias
    if cache is not None:
        cache.pre_output = pre_output
    return np.maximum(pre_output, 0.0)


def lstm_forward(net, seq, dropout_mask=None, dropout_rate=0.0):
    """Evaluate one window.

    :type net: :class:`LstmNet`
    :param net: the member.

    :type seq: :class:`~pbprnn.recurrent.network.ObservationSequence`
    :param seq: the window.

    :type dropout_mask: array-like of ``H`` zeros and ones
    :param dropout_mask: (Optional) keep mask for the hidden units.

    :type dropout_rate: float
    :param dropout_rate: drop probability used to rescale kept units.

    :rtype: float
    :returns: ``ReLU(readout . h_T + bias)``.
    """
    masks = None
    if dropout_mask is not None:
        masks = np.asarray(dropout_mask, dtype=np.float64)[None, :]
    return float(forward_batch(
        net, seq.steps[None, :, :], masks=masks,
        dropout_rate=dropout_rate)[0])


def squared_error_gradients(net, inputs, labels):
    """Mean squared error of a batch and its gradients (no dropout).

    :rtype: tuple
    :returns: the loss and a list of gradients in :data:`PARAMETERS` order.
    """
    labels = np.asarray(labels, dtype=np.float64)
    cache = _Cache()
    outputs = forward_batch(net, inputs, cache=cache)
    batch = outputs.shape[0]
    residual = outputs - labels
    loss = float(np.mean(residual * residual))

    hidden_dim = net.hidden_dim
    grad_pre = (2.0 / batch) * residual * (cache.pre_output > 0.0)
    grad_readout = cache.hidden[-1].T.dot(grad_pre)
    grad_readout_bias = np.sum(grad_pre)
    grad_input = np.zeros_like(net.input_weights)
    grad_hidden_weights = np.zeros_like(net.hidden_weights)
    grad_bias = np.zeros_like(net.gate_bias)

    grad_h = grad_pre[:, None] * net.readout_weights[None, :]
    grad_c = np.zeros((batch, hidden_dim))
    for t in reversed(range(len(cache.gates))):
        gate_in, gate_forget, gate_out, candidate = cache.gates[t]
        cell = cache.cells[t + 1]
        previous_cell = cache.cells[t]
        tanh_cell = np.tanh(cell)
        grad_out = grad_h * tanh_cell
        grad_c = grad_c + grad_h * gate_out * (1.0 - tanh_cell * tanh_cell)
        grad_z = np.concatenate([
            grad_c * candidate * gate_in * (1.0 - gate_in),
            grad_c * previous_cell * gate_forget * (1.0 - gate_forget),
            grad_out * gate_out * (1.0 - gate_out),
            grad_c * gate_in * (1.0 - candidate * candidate),
        ], axis=1)
        grad_input += grad_z.T.dot(cache.inputs[:, t])
        grad_hidden_weights += grad_z.T.dot(cache.hidden[t])
        grad_bias += grad_z.sum(axis=0)
        grad_h = grad_z.dot(net.hidden_weights)
        grad_c = grad_c * gate_forget
    return loss, [grad_input, grad_hidden_weights, grad_bias, grad_readout,
                  np.array(grad_readout_bias)]
