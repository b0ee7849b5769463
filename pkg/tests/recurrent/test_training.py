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

import numpy as np
import pytest

from pbprnn.core.gaussian import GaussianMatrix
from pbprnn.core.gaussian import GaussianMoments
from pbprnn.core.propagation import extend_with_bias
from pbprnn.core.propagation import linear_moments_backward
from pbprnn.core.propagation import propagate_linear_gaussian
from pbprnn.core.updates import UpdateCounters
from pbprnn.core.updates import log_marginal_gradients
from pbprnn.core.updates import update_layer
from pbprnn.exceptions import EmptyDatasetError
from pbprnn.recurrent.network import ObservationSequence
from pbprnn.recurrent.network import RecurrentBayesNet
from pbprnn.recurrent.network import forward_sequence
from pbprnn.recurrent.training import TrainingStats
from pbprnn.recurrent.training import sequence_gradients
from pbprnn.recurrent.training import step_log_partitions
from pbprnn.recurrent.training import tbptt_update_sequence
from pbprnn.recurrent.training import train_epochs


def _separable_dataset(rng, per_class=16, length=4):
    dataset = []
    for label, sign in ((1.0, 1.0), (0.0, -1.0)):
        for _ in range(per_class):
            steps = sign + 0.1 * rng.normal(size=(length, 2))
            dataset.append((ObservationSequence(steps), label))
    return dataset


class TestSequenceGradients(object):

    def test_log_partitions_per_step(self, rng):
        net = RecurrentBayesNet.initialize(2, 3, rng)
        seq = ObservationSequence(rng.normal(size=(5, 2)))
        grads = sequence_gradients(net, seq, 1.0)
        assert grads.length == 5
        np.testing.assert_allclose(grads.log_partitions,
                                   step_log_partitions(net, seq, 1.0))
        assert grads.means['readout'].shape == (5, 1, 4)
        assert grads.is_finite()

    def test_single_step_leaves_transition_weights(self, rng):
        # the hidden state entering step one is a point mass at zero
        net = RecurrentBayesNet.initialize(2, 3, rng)
        seq = ObservationSequence(rng.normal(size=(1, 2)))
        updated, partition = tbptt_update_sequence(net, seq, 1.0)
        assert partition is not None
        np.testing.assert_array_equal(
            updated.recurrent_hidden.means[:, :-1],
            net.recurrent_hidden.means[:, :-1])
        np.testing.assert_array_equal(
            updated.recurrent_hidden.variances[:, :-1],
            net.recurrent_hidden.variances[:, :-1])
        assert not np.array_equal(updated.readout.means, net.readout.means)

    def test_single_step_equals_feedforward_update(self, rng):
        net = RecurrentBayesNet.initialize(2, 3, rng)
        x = rng.normal(size=2)
        label = 1.0
        first = propagate_linear_gaussian(
            net.recurrent_input, GaussianMoments(x, np.zeros(2)))
        carried = propagate_linear_gaussian(
            net.recurrent_hidden, GaussianMoments(np.zeros(3), np.zeros(3)))
        hidden = GaussianMoments(first.means + carried.means,
                                 first.variances + carried.variances)
        output = propagate_linear_gaussian(net.readout, hidden)
        grad_mean, grad_variance = log_marginal_gradients(
            label, output.means, output.variances, net.noise.noise_variance)

        readout = linear_moments_backward(
            net.readout.means, net.readout.variances,
            *extend_with_bias(hidden),
            grad_out_means=grad_mean, grad_out_variances=grad_variance)
        upstream_means = readout[2][None, :-1]
        upstream_variances = readout[3][None, :-1]
        expected = {'readout': readout}
        for name, moments in (
                ('recurrent_input', GaussianMoments(x, np.zeros(2))),
                ('recurrent_hidden',
                 GaussianMoments(np.zeros(3), np.zeros(3)))):
            layer = getattr(net, name)
            grads = linear_moments_backward(
                layer.means, layer.variances, *extend_with_bias(moments),
                grad_out_means=upstream_means,
                grad_out_variances=upstream_variances)
            expected[name] = (grads[0][0], grads[1][0])

        updated, _ = tbptt_update_sequence(
            net, ObservationSequence(x[None, :]), label)
        for name in net.LAYERS:
            layer = update_layer(getattr(net, name), expected[name][0],
                                 expected[name][1])
            np.testing.assert_array_equal(getattr(updated, name).means,
                                          layer.means)
            np.testing.assert_array_equal(getattr(updated, name).variances,
                                          layer.variances)


class TestUpdateSequence(object):

    def test_update_moves_prediction_towards_label(self, rng):
        net = RecurrentBayesNet.initialize(2, 4, rng)
        seq = ObservationSequence(rng.normal(size=(4, 2)))
        before = forward_sequence(net, seq)[1].mean
        updated, _ = tbptt_update_sequence(net, seq, 1.0)
        after = forward_sequence(updated, seq)[1].mean
        assert abs(after - 1.0) < abs(before - 1.0)

    def test_surprising_label_moves_means_further(self, rng):
        net = RecurrentBayesNet.initialize(2, 4, rng)
        seq = ObservationSequence(rng.normal(size=(1, 2)))
        prediction = forward_sequence(net, seq)[1]
        spread = 3.0 * np.sqrt(prediction.total_variance)

        def displacement(label):
            updated, _ = tbptt_update_sequence(net, seq, label)
            return np.sqrt(sum(
                np.sum((getattr(updated, name).means -
                        getattr(net, name).means) ** 2)
                for name in net.LAYERS))

        expected = displacement(prediction.mean + 1e-6)
        for label in (prediction.mean + spread, prediction.mean - spread):
            assert displacement(label) > 100.0 * expected

    def test_overflow_skips_sequence(self):
        huge = GaussianMatrix(np.full((2, 3), 1e200), np.full((2, 3), 1.0))
        net = RecurrentBayesNet(huge, GaussianMatrix.zeros(2, 2),
                                GaussianMatrix(np.full((1, 3), 1e200),
                                               np.ones((1, 3))))
        counters = UpdateCounters()
        updated, partition = tbptt_update_sequence(
            net, ObservationSequence(np.full((3, 2), 1e100)), 1.0,
            counters=counters)
        assert updated is net
        assert partition is None
        assert counters.skipped_sequences == 1


class TestTrainEpochs(object):

    def test_zero_epochs_is_identity(self, rng):
        net = RecurrentBayesNet.initialize(2, 3, rng)
        dataset = _separable_dataset(rng, per_class=2)
        trained, stats = train_epochs(net, dataset, 0, rng)
        assert trained == net
        assert stats.epochs == 0

    def test_empty_dataset(self, rng):
        net = RecurrentBayesNet.initialize(2, 3, rng)
        with pytest.raises(EmptyDatasetError):
            train_epochs(net, [], 3, rng)

    def test_learns_separable_labels(self, rng):
        net = RecurrentBayesNet.initialize(2, 16, rng)
        dataset = _separable_dataset(rng)
        assert len(dataset) == 32
        trained, stats = train_epochs(net, dataset, 20, rng)
        assert stats.epochs == 20
        assert all(np.isfinite(value) for value in stats.epoch_logZ)
        positives = [forward_sequence(trained, seq)[1].mean
                     for seq, label in dataset if label == 1.0]
        negatives = [forward_sequence(trained, seq)[1].mean
                     for seq, label in dataset if label == 0.0]
        assert np.mean(positives) - np.mean(negatives) >= 0.5
        assert stats.epoch_logZ[-1] > stats.epoch_logZ[0]

    def test_single_example_fit_improves(self, rng):
        net = RecurrentBayesNet.initialize(2, 4, rng)
        dataset = [(ObservationSequence(rng.normal(size=(4, 2))), 1.0)]
        _, stats = train_epochs(net, dataset, 6, rng)
        steps = np.diff(stats.epoch_logZ)
        assert len(steps) == 5
        assert np.sum(steps >= 0.0) >= 4

    def test_deterministic_given_seed(self):
        results = []
        for _ in range(2):
            rng = np.random.default_rng(99)
            net = RecurrentBayesNet.initialize(2, 3, rng)
            dataset = _separable_dataset(rng, per_class=3)
            results.append(train_epochs(net, dataset, 2, rng)[0])
        assert results[0] == results[1]

    def test_stats_accumulate_across_calls(self, rng):
        net = RecurrentBayesNet.initialize(2, 3, rng)
        dataset = _separable_dataset(rng, per_class=2)
        stats = TrainingStats()
        net, stats = train_epochs(net, dataset, 2, rng, stats=stats)
        net, stats = train_epochs(net, dataset, 1, rng, stats=stats)
        assert stats.epochs == 3
        data = stats.as_dict()
        assert len(data['epoch_clamps']) == 3
        assert data['skipped_sequences'] == 0
        assert net.noise.alpha > 1.0
