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

"""Truncated backpropagation through time with moment-matching updates."""

import logging

import numpy as np

from pbprnn.core.gaussian import PartitionTriple
from pbprnn.core.propagation import linear_moments_backward
from pbprnn.core.updates import UpdateCounters
from pbprnn.core.updates import VARIANCE_FLOOR
from pbprnn.core.updates import gaussian_log_density
from pbprnn.core.updates import incorporate_prior
from pbprnn.core.updates import log_marginal_gradients
from pbprnn.core.updates import update_layer
from pbprnn.core.updates import update_noise_posterior
from pbprnn.exceptions import EmptyDatasetError
from pbprnn.exceptions import NumericError
from pbprnn.recurrent.network import trace_sequence


_LOGGER = logging.getLogger(__name__)


class SequenceGradients(object):
    """Per-target gradients of ``logZ_t`` for every layer.

    ``means[name][t]`` is the gradient of ``logZ_t`` with respect to the
    mean matrix of layer ``name``; ``variances`` likewise.
    """

    def __init__(self, net, length):
        self.means = {}
        self.variances = {}
        for name in net.LAYERS:
            shape = (length,) + getattr(net, name).means.shape
            self.means[name] = np.zeros(shape)
            self.variances[name] = np.zeros(shape)
        self.log_partitions = np.zeros(length)
        self.output_means = np.zeros(length)
        self.output_variances = np.zeros(length)

    @property
    def length(self):
        return self.log_partitions.shape[0]

    def is_finite(self):
        arrays = list(self.means.values()) + list(self.variances.values())
        return all(np.all(np.isfinite(array)) for array in arrays)


def _log_partitions(trace, label, noise_variance):
    variances = np.maximum(trace.output_variances, 0.0)
    return np.array([
        gaussian_log_density(label, mean, variance + noise_variance)
        for mean, variance in zip(trace.output_means, variances)])


def step_log_partitions(net, seq, label):
    """The per-step log marginals ``logZ_t`` of a label, one per step."""
    return _log_partitions(trace_sequence(net, seq), label,
                           net.noise.noise_variance)


def sequence_gradients(net, seq, label):
    """Gradients of every per-step log marginal in one reverse sweep.

    The label is scored at every step. Row ``t`` of the upstream gradient
    block carries the objective ``logZ_t``; it is injected at step ``t`` and
    flows back through the unrolled prefix together with all later targets.

    :type net: :class:`~pbprnn.recurrent.network.RecurrentBayesNet`
    :param net: the network belief (pre-update values).

    :type seq: :class:`~pbprnn.recurrent.network.ObservationSequence`
    :param seq: the input window.

    :type label: float
    :param label: the target broadcast to every step.

    :rtype: :class:`SequenceGradients`
    :returns: the gradients and the per-step log partitions.
    """
    trace = trace_sequence(net, seq)
    length = trace.length
    noise_variance = net.noise.noise_variance
    grads = SequenceGradients(net, length)
    output_variances = np.maximum(trace.output_variances, 0.0)
    grads.output_means[:] = trace.output_means
    grads.output_variances[:] = output_variances
    grads.log_partitions[:] = _log_partitions(trace, label, noise_variance)
    grad_out_means, grad_out_variances = log_marginal_gradients(
        label, trace.output_means, output_variances, noise_variance)

    inp = net.recurrent_input
    rec = net.recurrent_hidden
    out = net.readout
    upstream_means = np.zeros((length, net.hidden_dim))
    upstream_variances = np.zeros((length, net.hidden_dim))
    for t in reversed(range(length)):
        readout_grads = linear_moments_backward(
            out.means, out.variances,
            trace.hidden_means[t], trace.hidden_variances[t],
            grad_out_means[t:t + 1], grad_out_variances[t:t + 1])
        grads.means['readout'][t] = readout_grads[0]
        grads.variances['readout'][t] = readout_grads[1]
        upstream_means[t] += readout_grads[2][:-1]
        upstream_variances[t] += readout_grads[3][:-1]

        input_grads = linear_moments_backward(
            inp.means, inp.variances,
            trace.input_means[t], trace.input_variances[t],
            upstream_means, upstream_variances)
        grads.means['recurrent_input'] += input_grads[0]
        grads.variances['recurrent_input'] += input_grads[1]

        hidden_grads = linear_moments_backward(
            rec.means, rec.variances,
            trace.previous_means[t], trace.previous_variances[t],
            upstream_means, upstream_variances)
        grads.means['recurrent_hidden'] += hidden_grads[0]
        grads.variances['recurrent_hidden'] += hidden_grads[1]
        upstream_means = hidden_grads[2][:, :-1]
        upstream_variances = hidden_grads[3][:, :-1]
    return grads


def _partition(net, label, grads):
    # logZ at alpha comes with the gradients; the shifted values only change
    # the noise variance.
    shifted = []
    for offset in (1.0, 2.0):
        noise_variance = net.noise.shifted(offset).noise_variance
        shifted.append(np.mean([
            gaussian_log_density(label, mean, variance + noise_variance)
            for mean, variance in zip(grads.output_means,
                                      grads.output_variances)]))
    return PartitionTriple(np.mean(grads.log_partitions), *shifted)


def tbptt_update_sequence(net, seq, label, v_min=VARIANCE_FLOOR,
                          counters=None):
    """Fold one labelled window into the network belief.

    Gradients of ``logZ_t`` for all steps come from a single reverse sweep
    at the pre-update parameters; the updates are then applied from the
    last step back to the first.

    :type net: :class:`~pbprnn.recurrent.network.RecurrentBayesNet`
    :param net: the network belief.

    :type seq: :class:`~pbprnn.recurrent.network.ObservationSequence`
    :param seq: the input window.

    :type label: float
    :param label: the collision label (0 or 1).

    :type counters: :class:`~pbprnn.core.updates.UpdateCounters`
    :param counters: (Optional) receives clamp and skip events.

    :rtype: tuple
    :returns: the updated network and the
              :class:`~pbprnn.core.gaussian.PartitionTriple` of the window,
              or the unchanged network and ``None`` if the window was
              skipped because of a numeric overflow.
    """
    if counters is None:
        counters = UpdateCounters()
    local = UpdateCounters()
    try:
        with np.errstate(over='ignore', invalid='ignore'):
            grads = sequence_gradients(net, seq, label)
            partition = _partition(net, label, grads)
            if not grads.is_finite():
                raise NumericError('non-finite gradients')
            layers = {name: getattr(net, name) for name in net.LAYERS}
            for t in reversed(range(grads.length)):
                for name in net.LAYERS:
                    layers[name] = update_layer(
                        layers[name], grads.means[name][t],
                        grads.variances[name][t], v_min=v_min,
                        counters=local)
    except NumericError as exc:
        counters.skipped_sequences += 1
        _LOGGER.warning('Skipped sequence after numeric failure: %s', exc)
        return net, None
    counters.merge(local)
    return net.replace(**layers), partition


class TrainingStats(object):
    """Per-epoch summaries of a training run."""

    def __init__(self):
        self.epoch_logZ = []
        self.epoch_clamps = []
        self.epoch_rejections = []
        self.epoch_skipped = []
        self.counters = UpdateCounters()

    def __repr__(self):
        return '<TrainingStats epochs=%d %r>' % (
            self.epochs, self.counters)

    @property
    def epochs(self):
        return len(self.epoch_logZ)

    def as_dict(self):
        data = {
            'epoch_logZ': [float(value) for value in self.epoch_logZ],
            'epoch_clamps': list(self.epoch_clamps),
            'epoch_rejections': list(self.epoch_rejections),
            'epoch_skipped': list(self.epoch_skipped),
        }
        data.update(self.counters.as_dict())
        return data


def _incorporate_priors(net, v_min, counters):
    layers = {
        name: incorporate_prior(getattr(net, name), net.prior, v_min=v_min,
                                counters=counters)
        for name in net.LAYERS}
    return net.replace(**layers)


def train_epochs(net, dataset, epochs, rng, v_min=VARIANCE_FLOOR,
                 stats=None):
    """Sweep a labelled dataset ``epochs`` times.

    Each epoch visits the examples in a shuffled order, then refines the
    noise posterior with the epoch-mean partition values and folds the
    weight prior into every layer.

    :type net: :class:`~pbprnn.recurrent.network.RecurrentBayesNet`
    :param net: the network belief.

    :type dataset: list of ``(ObservationSequence, label)``
    :param dataset: the training examples.

    :type epochs: int
    :param epochs: number of sweeps.

    :type rng: :class:`numpy.random.Generator`
    :param rng: drives the shuffles.

    :type stats: :class:`TrainingStats`
    :param stats: (Optional) accumulates across calls.

    :rtype: tuple
    :returns: the trained network and the :class:`TrainingStats`.

    :raises: :class:`~pbprnn.exceptions.EmptyDatasetError`
    """
    dataset = list(dataset)
    if not dataset:
        raise EmptyDatasetError('cannot train on an empty dataset')
    if stats is None:
        stats = TrainingStats()
    for epoch in range(epochs):
        counters = UpdateCounters()
        partitions = []
        for index in rng.permutation(len(dataset)):
            seq, label = dataset[index]
            net, partition = tbptt_update_sequence(
                net, seq, float(label), v_min=v_min, counters=counters)
            if partition is not None:
                partitions.append(partition)
        if partitions:
            net = net.replace(noise=update_noise_posterior(
                net.noise, PartitionTriple.mean_of(partitions),
                counters=counters))
            mean_logZ = float(np.mean([item.logZ for item in partitions]))
        else:
            mean_logZ = float('nan')
        net = _incorporate_priors(net, v_min, counters)
        stats.epoch_logZ.append(mean_logZ)
        stats.epoch_clamps.append(counters.clamp_events)
        stats.epoch_rejections.append(counters.rejected_noise_updates)
        stats.epoch_skipped.append(counters.skipped_sequences)
        stats.counters.merge(counters)
        _LOGGER.info(
            'Epoch %d/%d: mean logZ %.5f, clamps %d, rejected %d, '
            'skipped %d', epoch + 1, epochs, mean_logZ,
            counters.clamp_events, counters.rejected_noise_updates,
            counters.skipped_sequences)
    return net, stats
