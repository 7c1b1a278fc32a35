import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import gf2_rank, row_space
from macpolar.channels import identity, linear, mixture, noisy, pure_noise, random_mac, xor2
from macpolar.extremal import (PAIR_TABLE, InconsistencyError, InvalidProfile, NotPolarized,
                               assemble_linear_forms, classify_pair, recover_linear_forms,
                               u24_distance, verify_u24_unreachable)
from macpolar.mac import Mac, linear_image_info
from macpolar.matroid import enumerate_matroids


def test_pair_table_covers_two_element_matroids():
    assert set(PAIR_TABLE) == {f.size_order() for f in enumerate_matroids(2)}


@pytest.mark.parametrize("B, expect", [
    (np.zeros((1, 2), int), (0, 0, 0)),
    ([[0, 1]], (0, 1, 0)),
    ([[1, 0]], (1, 0, 0)),
    ([[1, 1]], (0, 0, 1)),
    ([[1, 0], [0, 1]], (1, 1, 1)),
])
def test_classify_linear_pairs(B, expect):
    res = classify_pair(linear(B))
    assert res.j_triple == expect
    assert res.gamma < 1e-9


def test_classify_rejects_unpolarized():
    with pytest.raises(NotPolarized):
        classify_pair(mixture())
    with pytest.raises(ValueError):
        classify_pair(identity(3))


def test_recover_from_noisy_linear_channel():
    B = [[1, 1, 0], [0, 1, 1]]
    rep = recover_linear_forms(noisy(linear(B), 1e-4), eps=0.01)
    assert rep.A.same_row_space(rep.A.__class__(B, m=3))
    assert rep.A.rank() == 2
    assert rep.achieved == pytest.approx(2, abs=0.01)
    assert rep.to_dict()["A"] == rep.A.to_strings()


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5).flatmap(
    lambda m: st.lists(st.lists(st.integers(0, 1), min_size=m, max_size=m),
                       min_size=1, max_size=m)))
def test_recover_exact_linear(B):
    m = len(B[0])
    rep = recover_linear_forms(linear(B), eps=1e-9)
    r = gf2_rank(B)
    assert rep.A.rank() == r
    assert row_space(rep.A.bits, m) == row_space(B, m)
    assert linear_image_info(linear(B), rep.A.bits) == pytest.approx(r, abs=1e-12)


def test_inconsistent_forms_are_reported():
    # forms 01 and 10 look recoverable but 11 does not
    with pytest.raises(InconsistencyError) as err:
        assemble_linear_forms([0, 1.0, 1.0, 0.0], 2, 2, 0.1)
    assert err.value.witness == (1, 2, 3)
    with pytest.raises(InconsistencyError):
        assemble_linear_forms([0, 1.0, 0.0, 0.0], 2, 2, 0.1)


def test_rank_zero_channel():
    rep = recover_linear_forms(pure_noise(2), eps=1e-9)
    assert rep.A.k == 0 and rep.achieved == 0.0


def test_useless_pair():
    t = np.array([[0.5, 0.5], [0.5, 0.5], [0.5, 0.5], [0.5, 0.5]])
    assert classify_pair(Mac(2, t)).j_triple == (0, 0, 0)
    assert isinstance(InvalidProfile("x"), ValueError)


def test_u24_distance():
    rng = np.random.default_rng(0)
    for _ in range(20):
        mac = random_mac(4, 4, rng)
        assert verify_u24_unreachable(mac)["distance"] >= 0.05
    with pytest.raises(ValueError):
        u24_distance(xor2())


def test_recovery_examples():
    from macpolar.channels import parity_fixture
    rep = recover_linear_forms(parity_fixture(3), eps=1e-9)
    assert rep.A.to_strings() == ["111"]
    np.testing.assert_allclose(rep.rounded.size_order(), (1, 1, 1, 1, 1, 1, 1))
    rep = recover_linear_forms(linear([[1, 1, 0], [0, 0, 1]]), eps=1e-9)
    assert sorted(rep.A.to_strings()) == ["001", "110"]
    rep = recover_linear_forms(identity(3), eps=1e-9)
    assert rep.A.to_strings() == ["100", "010", "001"] and rep.achieved == pytest.approx(3)


def test_u24_distance_examples():
    assert u24_distance(identity(4)) >= 1
    assert u24_distance(linear([[1, 1, 0, 0], [0, 0, 1, 1]])) >= 1


def test_gamma_shrinks_near_xor():
    gammas = [classify_pair(noisy(xor2(), d), eps=0.5).gamma for d in (0.2, 0.05, 0.01, 0.0)]
    assert all(a >= b for a, b in zip(gammas, gammas[1:]))
    assert gammas[-1] < 1e-12
