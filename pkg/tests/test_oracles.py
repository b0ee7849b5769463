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

from pbprnn import oracles
from pbprnn.recurrent.network import ObservationSequence
from pbprnn.recurrent.network import forward_sequence
from pbprnn.seeding import SeedBank


def test_conjugate_suite():
    result = oracles.conjugate_suite(SeedBank(5), cases=20)
    assert result.passed, result.detail
    assert result.name == 'conjugate'
    assert result.cases == 20


def test_finite_difference_suite():
    result = oracles.finite_difference_suite(SeedBank(0))
    assert result.passed, result.detail
    assert result.cases == 100


def test_monte_carlo_suite():
    result = oracles.monte_carlo_suite(SeedBank(0))
    assert result.passed, result.detail
    assert result.cases == 20


def test_monte_carlo_band_is_three_standard_errors():
    assert oracles.MC_STANDARD_ERRORS == 3.0


def test_quadrature_suite():
    result = oracles.quadrature_suite(SeedBank(5), cases=3)
    assert result.passed, result.detail
    assert result.cases == 3


def test_sampled_outputs_match_a_deterministic_net(rng):
    net = oracles.random_net(rng, 2, 3, zero_recurrent_means=True)
    net = net.replace(**{
        name: getattr(net, name).replace(
            variances=np.zeros_like(getattr(net, name).variances))
        for name in net.LAYERS})
    seq = ObservationSequence(rng.normal(size=(3, 2)))
    outputs = oracles.sample_outputs(net, seq, rng, samples=4)
    expected = forward_sequence(net, seq)[1].mean
    np.testing.assert_allclose(outputs, np.full(4, expected))


def test_run_selftest_picks_suites():
    results = oracles.run_selftest(3, ['conjugate'])
    assert [result.name for result in results] == ['conjugate']
    assert results[0].passed
    assert list(oracles.SUITES) == ['conjugate', 'finite-differences',
                                    'monte-carlo', 'quadrature']
