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

from pbprnn.exceptions import ContractError
from pbprnn.seeding import MAX_SEED
from pbprnn.seeding import SeedBank
from pbprnn.seeding import check_seed


def test_streams_are_reproducible():
    first = SeedBank(42).generator('policy').random(5)
    second = SeedBank(42).generator('policy').random(5)
    np.testing.assert_array_equal(first, second)


def test_streams_do_not_depend_on_request_order():
    bank = SeedBank(42)
    bank.generator('sampling').random(100)
    late = bank.generator('policy').random(5)
    np.testing.assert_array_equal(late, SeedBank(42).generator('policy')
                                  .random(5))


def test_names_indices_and_seeds_separate_streams():
    bank = SeedBank(42)
    draws = [bank.generator('policy').random(),
             bank.generator('policy', 1).random(),
             bank.generator('sampling').random(),
             SeedBank(43).generator('policy').random()]
    assert len(set(draws)) == 4


def test_children():
    bank = SeedBank(7)
    assert bank.child('repetition', 0).master_seed == bank.child(
        'repetition', 0).master_seed
    assert bank.child('repetition', 0).master_seed != bank.child(
        'repetition', 1).master_seed


def test_check_seed():
    assert check_seed(MAX_SEED) == MAX_SEED
    assert check_seed('12') == 12
    with pytest.raises(ContractError):
        check_seed(-1)
    with pytest.raises(ContractError):
        check_seed(MAX_SEED + 1)
