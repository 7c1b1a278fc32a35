import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import macs
from oracles import brute_form_info, brute_subset_info
from macpolar.channels import adder, bec, bsc, identity, mixture, pure_noise, xor2
from macpolar.mac import (Mac, MacError, bhattacharyya, form_information, linear_image_info,
                          map_error, marginalize_linear_form, mutual_info_subset,
                          mutual_info_unconditioned, rank_profile)
from macpolar.matroid import is_polymatroid


def h2(p):
    return 0.0 if p in (0, 1) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)


@pytest.mark.parametrize("mac, expected", [
    (xor2(), [0, 1, 1, 1]),
    (identity(2), [0, 1, 1, 2]),
    (pure_noise(2), [0, 0, 0, 0]),
    (adder(2), [0, 1, 1, 1.5]),
    (mixture(), [0, 1, 1, 1.5]),
])
def test_fixture_profiles(mac, expected):
    np.testing.assert_allclose(rank_profile(mac), expected, atol=1e-12)


def test_single_user_closed_forms():
    assert mutual_info_subset(bec(0.3), 1) == pytest.approx(0.7, abs=1e-12)
    assert mutual_info_subset(bsc(0.11), 1) == pytest.approx(1 - h2(0.11), abs=1e-12)
    z = bhattacharyya(marginalize_linear_form(bsc(0.11), 1))
    assert z == pytest.approx(2 * math.sqrt(0.11 * 0.89), abs=1e-12)
    assert bhattacharyya(marginalize_linear_form(bec(0.3), 1)) == pytest.approx(0.3)


def test_validation():
    with pytest.raises(MacError):
        Mac(2, np.ones((3, 2)) / 2)
    with pytest.raises(MacError):
        Mac(1, [[0.5, 0.6], [0.5, 0.5]])
    with pytest.raises(MacError):
        Mac(1, [[1.5, -0.5], [0.5, 0.5]])
    with pytest.raises(MacError):
        Mac(9, np.ones((512, 1)))
    big = Mac(9, np.ones((512, 1)), m_max=9)
    assert big.m == 9
    with pytest.raises(MacError):
        marginalize_linear_form(xor2(), 0)


def test_table_is_read_only():
    mac = xor2()
    with pytest.raises(ValueError):
        mac.table[0, 0] = 0.3


def test_file_round_trip(tmp_path):
    mac = mixture()
    mac.save(tmp_path / "m.json")
    back = Mac.load(tmp_path / "m.json")
    assert np.array_equal(back.table, mac.table)
    assert back.labels == mac.labels
    (tmp_path / "bad.json").write_text('{"m": 1, "rows": [[1, 0], [0, 1]]}')
    with pytest.raises(MacError):
        Mac.load(tmp_path / "bad.json")


@settings(max_examples=60, deadline=None)
@given(macs(max_m=3))
def test_profile_matches_brute_force(mac):
    for J in range(mac.q):
        users = [k for k in range(mac.m) if J >> k & 1]
        assert mutual_info_subset(mac, J) == pytest.approx(
            brute_subset_info(mac.table, mac.m, users), abs=1e-10)
    for S in range(1, mac.q):
        assert form_information(mac)[S] == pytest.approx(
            brute_form_info(mac.table, mac.m, S), abs=1e-10)


@settings(max_examples=80, deadline=None)
@given(macs(max_m=4))
def test_profile_is_polymatroid(mac):
    prof = rank_profile(mac)
    assert is_polymatroid(prof, tol=1e-9)
    sizes = np.array([bin(J).count("1") for J in range(mac.q)])
    assert np.all(prof <= sizes + 1e-12)


@settings(max_examples=60, deadline=None)
@given(macs(max_m=3))
def test_chain_rule(mac):
    # I(X;Y) = I(X_J;Y) + I(X_{J^c}; Y X_J) for every split
    total = rank_profile(mac)[-1]
    for J in range(mac.q):
        comp = mac.full ^ J
        assert mutual_info_unconditioned(mac, J) + mutual_info_subset(mac, comp) == \
            pytest.approx(total, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(macs(max_m=3))
def test_bhattacharyya_bounds(mac):
    # standard bounds relating I, Z and MAP error for binary-input channels
    for S in range(1, mac.q):
        ch = marginalize_linear_form(mac, S)
        i, z = ch.mutual_info(), bhattacharyya(ch)
        assert i >= math.log2(2 / (1 + z)) - 1e-10
        assert i <= math.sqrt(max(0.0, 1 - z * z)) + 1e-10
        assert i + z >= 1 - 1e-10
        pe = 0.5 * np.minimum(ch.table[0], ch.table[1]).sum()
        assert pe <= z / 2 + 1e-12


@settings(max_examples=40, deadline=None)
@given(macs(max_m=3))
def test_linear_image_info_identity_matrix(mac):
    assert linear_image_info(mac, np.eye(mac.m, dtype=int)) == pytest.approx(
        rank_profile(mac)[-1], abs=1e-10)
    for S in range(1, mac.q):
        row = [[S >> k & 1 for k in range(mac.m)]]
        assert linear_image_info(mac, row) == pytest.approx(form_information(mac)[S], abs=1e-10)


def test_map_error():
    assert map_error(identity(2)) == pytest.approx(0.0)
    assert map_error(pure_noise(2)) == pytest.approx(0.75)
    assert map_error(xor2(), [[1, 1]]) == pytest.approx(0.0)
    assert map_error(xor2(), [[1, 0]]) == pytest.approx(0.5)
    assert map_error(bsc(0.2)) == pytest.approx(0.2)
