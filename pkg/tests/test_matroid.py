import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import gf2_rank, row_space
from macpolar.gf2 import BinaryMatrix, rank_of_ints, rref
from macpolar.matroid import (U24, IntRankFunction, canonical_form, enumerate_matroids,
                              find_binary_representation, has_u24_minor, integrality_gap,
                              is_binary, is_matroid, is_polymatroid, linear_matroid, minor,
                              size_lex_order, permute, polymatroid_vertices, round_profile,
                              uniform_matroid, unlabeled)

bit_matrices = st.integers(1, 5).flatmap(
    lambda m: st.lists(st.lists(st.integers(0, 1), min_size=m, max_size=m),
                       min_size=0, max_size=5).map(lambda rows: (rows, m)))


@settings(max_examples=100, deadline=None)
@given(bit_matrices)
def test_gf2_rank_and_rref(data):
    rows, m = data
    A = BinaryMatrix(rows, m=m)
    assert A.rank() == gf2_rank(rows)
    assert rank_of_ints(A.row_masks()) == A.rank()
    R = A.canonical
    assert np.array_equal(rref(R), R)
    assert row_space(R, m) == row_space(rows, m)
    assert A.same_row_space(A.reduced())


def test_binary_matrix_strings():
    A = BinaryMatrix.from_strings(["101", "011"])
    assert A.to_strings() == ["101", "011"]
    assert A.column_mask(2) == 0b11
    assert BinaryMatrix.from_masks([0b101], 3).to_strings() == ["101"]
    assert BinaryMatrix.from_strings([], m=3).shape == (0, 3)


@pytest.mark.parametrize("m, labeled, classes", [(1, 2, 2), (2, 5, 4), (3, 16, 8), (4, 68, 17)])
def test_matroid_counts(m, labeled, classes):
    ms = enumerate_matroids(m)
    assert len(ms) == labeled
    assert len(unlabeled(ms)) == classes
    assert all(is_matroid(f.values) for f in ms)


def test_two_element_matroids_in_size_order():
    got = sorted(f.size_order() for f in enumerate_matroids(2))
    assert got == [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1), (1, 1, 2)]


def test_enumeration_is_closed_under_permutation():
    ms = set(f.values for f in enumerate_matroids(3))
    for f in enumerate_matroids(3):
        for p in itertools.permutations(range(3)):
            assert permute(f, p).values in ms


def test_only_nonbinary_m4_is_u24():
    bad = [f for f in enumerate_matroids(4) if not is_binary(f)]
    assert bad == [U24]
    assert find_binary_representation(U24) is None
    assert has_u24_minor(U24)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_binary_representations_round_trip(m):
    for f in enumerate_matroids(m):
        if not is_binary(f):
            continue
        A = find_binary_representation(f)
        assert A is not None
        assert A.rank() == f.rank() == A.k
        assert linear_matroid(A) == f


@settings(max_examples=60, deadline=None)
@given(bit_matrices)
def test_linear_matroid_is_binary_matroid(data):
    rows, m = data
    f = linear_matroid(BinaryMatrix(rows, m=m))
    assert is_matroid(f.values)
    assert is_binary(f)
    A = find_binary_representation(f)
    assert linear_matroid(A) == f


def test_u24_appears_as_minor_of_u25():
    u25 = uniform_matroid(2, 5)
    assert has_u24_minor(u25)
    assert minor(u25, delete=0b10000) == U24
    with pytest.raises(ValueError):
        minor(u25, delete=1, contract=1)


def test_polymatroid_checks():
    assert is_polymatroid([0, 0.5, 0.5, 1.0])
    assert not is_polymatroid([0, 1, 1, 2.5])           # f(E) > f(1) + f(2)
    assert not is_polymatroid([0, 1, 0.5, 0.7])         # not monotone
    assert not is_matroid([0, 1, 1, 1.5])
    assert not is_matroid([0, 2, 1, 2])                 # f({1}) > 1


def test_rounding():
    f = round_profile([0, 0.999, 1.002, 1.0005], eps=0.01)
    assert f.values == (0, 1, 1, 1)
    with pytest.raises(ValueError):
        round_profile([0, 0.5, 1, 1], eps=0.01)
    assert integrality_gap([0, 0.75, 2]) == pytest.approx(0.25)


def test_vertices_of_small_polymatroids():
    assert polymatroid_vertices([0, 1, 1, 1]) == {(0, 0), (1, 0), (0, 1)}
    assert polymatroid_vertices([0, 1, 1, 2]) == {(0, 0), (1, 0), (0, 1), (1, 1)}
    v = polymatroid_vertices([0, 1, 1, 1.5])
    assert (1.0, 0.5) in v and (0.5, 1.0) in v


def test_subset_order_and_canonical_form():
    assert size_lex_order(3) == [1, 2, 4, 3, 5, 6, 7]
    f = IntRankFunction.from_size_order(2, (0, 1, 1))
    assert f.values == (0, 0, 1, 1)
    assert canonical_form(f) == canonical_form(permute(f, (1, 0)))
    with pytest.raises(ValueError):
        IntRankFunction(2, (1, 1, 1, 1))
    with pytest.raises(ValueError):
        enumerate_matroids(5)
