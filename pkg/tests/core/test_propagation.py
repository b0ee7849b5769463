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
from pbprnn.core.propagation import propagate_linear_gaussian
from pbprnn.core.propagation import propagate_relu_moments
from pbprnn.exceptions import ContractError
from pbprnn.exceptions import NumericError


def test_extend_with_bias():
    means, variances = extend_with_bias(GaussianMoments([2.0], [0.5]))
    np.testing.assert_array_equal(means, [2.0, 1.0])
    np.testing.assert_array_equal(variances, [0.5, 0.0])


class TestLinear(object):

    def test_deterministic_weights_pass_scaled_input(self):
        layer = GaussianMatrix([[np.sqrt(2.0), 0.0]], [[0.0, 0.0]])
        out = propagate_linear_gaussian(layer,
                                        GaussianMoments.deterministic([3.0]))
        np.testing.assert_allclose(out.means, [3.0])
        np.testing.assert_array_equal(out.variances, [0.0])

    def test_weight_variance_scales_with_input_square(self):
        layer = GaussianMatrix([[0.0, 0.0]], [[1.0, 0.0]])
        out = propagate_linear_gaussian(layer,
                                        GaussianMoments.deterministic([2.0]))
        np.testing.assert_array_equal(out.means, [0.0])
        np.testing.assert_allclose(out.variances, [2.0])

    def test_dimension_mismatch(self):
        layer = GaussianMatrix.zeros(2, 3)
        with pytest.raises(ContractError):
            propagate_linear_gaussian(layer, GaussianMoments([1.0], [0.0]))

    def test_non_finite_input(self):
        layer = GaussianMatrix.zeros(1, 1)
        with pytest.raises(NumericError):
            propagate_linear_gaussian(layer, GaussianMoments([np.inf], [0.0]))

    def test_means_are_linear_in_deterministic_inputs(self, rng):
        for _ in range(100):
            layer = GaussianMatrix(rng.normal(size=(3, 5)),
                                   rng.uniform(0.0, 1.0, size=(3, 5)))
            a = rng.normal(size=4)
            b = rng.normal(size=4)

            def mean(x):
                return propagate_linear_gaussian(
                    layer, GaussianMoments.deterministic(x)).means

            # the bias column contributes once to every evaluation
            bias = mean(np.zeros(4))
            np.testing.assert_allclose(mean(a + b) - bias,
                                       (mean(a) - bias) + (mean(b) - bias),
                                       atol=1e-12)

    def test_matches_monte_carlo(self, rng):
        samples = 100000
        layer = GaussianMatrix(rng.normal(size=(4, 5)),
                               rng.uniform(0.1, 1.0, size=(4, 5)))
        moments = GaussianMoments(rng.normal(size=4),
                                  rng.uniform(0.1, 1.0, size=4))
        out = propagate_linear_gaussian(layer, moments)

        weights = rng.normal(layer.means, np.sqrt(layer.variances),
                             size=(samples, 4, 5))
        inputs = rng.normal(moments.means, np.sqrt(moments.variances),
                            size=(samples, 4))
        inputs = np.concatenate([inputs, np.ones((samples, 1))], axis=1)
        sampled = layer.scale * np.einsum('sij,sj->si', weights, inputs)
        mean = sampled.mean(axis=0)
        squares = (sampled - mean) ** 2
        mean_error = np.sqrt(squares.mean(axis=0) / samples)
        variance_error = squares.std(axis=0) / np.sqrt(samples)
        assert np.all(np.abs(mean - out.means) < 4.0 * mean_error)
        assert np.all(np.abs(squares.mean(axis=0) - out.variances) <
                      4.0 * variance_error)


class TestRelu(object):

    def test_deterministic_positive(self):
        out = propagate_relu_moments(GaussianMoments([5.0], [0.0]))
        np.testing.assert_array_equal(out.means, [5.0])
        np.testing.assert_array_equal(out.variances, [0.0])

    def test_deterministic_negative(self):
        out = propagate_relu_moments(GaussianMoments([-5.0], [0.0]))
        np.testing.assert_array_equal(out.means, [0.0])
        np.testing.assert_array_equal(out.variances, [0.0])

    def test_standard_normal(self):
        out = propagate_relu_moments(GaussianMoments([0.0], [1.0]))
        np.testing.assert_allclose(out.means, [1.0 / np.sqrt(2.0 * np.pi)],
                                   rtol=1e-12)
        np.testing.assert_allclose(out.variances, [0.5 - 1.0 / (2.0 * np.pi)],
                                   rtol=1e-12)

    def test_matches_sampled_rectifier(self, rng):
        moments = GaussianMoments([-1.0, 0.3, 2.0], [0.5, 2.0, 0.1])
        out = propagate_relu_moments(moments)
        draws = np.maximum(rng.normal(moments.means,
                                      np.sqrt(moments.variances),
                                      size=(200000, 3)), 0.0)
        np.testing.assert_allclose(draws.mean(axis=0), out.means, atol=1e-2)
        np.testing.assert_allclose(draws.var(axis=0), out.variances,
                                   atol=1e-2)
        assert np.all(out.variances >= 0.0)
