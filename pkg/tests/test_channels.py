import itertools
import math

import numpy as np
import pytest

from oracles import binomial_entropy, bpsk_awgn_capacity
from macpolar.channels import (AwgnSpec, awgn_to_bmac, bec, builtin, linear, qary_sum_rate,
                               random_mac, split_qary)
from macpolar.mac import MacError, rank_profile


def test_awgn_rows_and_symmetry():
    mac = awgn_to_bmac(AwgnSpec.from_snr(3, 2.0, bins=40))
    np.testing.assert_allclose(mac.table.sum(axis=1), 1.0, atol=1e-12)
    # inputs with the same weight see the same row
    for x, y in itertools.combinations(range(8), 2):
        if bin(x).count("1") == bin(y).count("1"):
            np.testing.assert_array_equal(mac.table[x], mac.table[y])
    prof = rank_profile(mac)
    for J in range(8):
        for perm in itertools.permutations(range(3)):
            K = sum(1 << perm[k] for k in range(3) if J >> k & 1)
            assert prof[K] == pytest.approx(prof[J], abs=1e-12)


def test_awgn_single_user_matches_capacity_integral():
    for snr_db in (-3.0, 0.0, 3.0):
        snr = 10 ** (snr_db / 10)
        mac = awgn_to_bmac(AwgnSpec.from_snr(1, snr_db, bins=256))
        got = rank_profile(mac)[1]
        ref = bpsk_awgn_capacity(snr)
        assert got <= ref + 1e-9
        assert got == pytest.approx(ref, abs=5e-3)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_awgn_noiseless_limit_is_level_entropy(m):
    spec = AwgnSpec(m, noise_var=1e-6, bins=256)
    assert rank_profile(awgn_to_bmac(spec))[-1] == pytest.approx(binomial_entropy(m), abs=1e-6)


def test_awgn_validation():
    with pytest.raises(MacError):
        AwgnSpec(2, bins=1)
    with pytest.raises(MacError):
        AwgnSpec(2, span=0)
    np.testing.assert_allclose(AwgnSpec(1).levels(), [-1, 1])
    np.testing.assert_allclose(AwgnSpec(4).levels(), [-2, -1, 0, 1, 2])


def test_split_identity_for_q2():
    t = random_mac(2, 3, 0).table
    assert np.array_equal(split_qary(t, 2, 2).table, t)


def test_split_noiseless_quaternary():
    mac = split_qary(np.eye(4), 1, 4)
    assert mac.m == 2
    np.testing.assert_allclose(rank_profile(mac), [0, 1, 1, 2])


@pytest.mark.parametrize("users, q", [(1, 4), (2, 4), (1, 8)])
def test_split_preserves_sum_rate(users, q):
    rng = np.random.default_rng(q * users)
    t = rng.dirichlet(np.ones(5), size=q ** users)
    mac = split_qary(t, users, q)
    assert mac.m == users * int(math.log2(q))
    assert rank_profile(mac)[-1] == pytest.approx(qary_sum_rate(t, users, q), abs=1e-12)


def test_split_bit_assignment():
    # two 4-ary users, output = user 1's symbol: virtual users 1 and 2 carry it
    t = np.zeros((16, 4))
    for a in range(16):
        t[a, a % 4] = 1
    prof = rank_profile(split_qary(t, 2, 4))
    assert prof[0b0011] == pytest.approx(2)
    assert prof[0b1100] == pytest.approx(0)


def test_split_errors():
    with pytest.raises(MacError):
        split_qary(np.eye(3), 1, 3)
    with pytest.raises(MacError):
        split_qary(np.eye(4), 2, 4)


def test_builtins():
    assert rank_profile(builtin("bec", param=0.25))[1] == pytest.approx(0.75)
    assert builtin("adder", 3).n_outputs == 4
    assert builtin("pure_noise", 3).m == 3
    with pytest.raises(MacError):
        builtin("nope")
    assert rank_profile(linear([[1, 1]]))[-1] == pytest.approx(1)
    assert bec(0).n_outputs == 3
