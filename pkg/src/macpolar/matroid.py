"""Integer rank functions on small ground sets.

Set functions are arrays of length ``2**m`` indexed by subset mask, with
bit ``k`` of the mask standing for element ``k + 1``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .gf2 import BinaryMatrix, rank_of_ints
from .mac import popcount


@dataclass(frozen=True)
class IntRankFunction:
    m: int
    values: tuple

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if len(vals) != 1 << self.m:
            raise ValueError(f"need {1 << self.m} values for m={self.m}")
        if vals[0] != 0:
            raise ValueError("rank of the empty set must be 0")
        object.__setattr__(self, "values", vals)

    def __getitem__(self, mask: int) -> int:
        return self.values[mask]

    @property
    def full(self) -> int:
        return (1 << self.m) - 1

    def rank(self) -> int:
        return self.values[self.full]

    def size_order(self) -> tuple:
        return tuple(self.values[J] for J in size_lex_order(self.m))

    @classmethod
    def from_size_order(cls, m: int, seq) -> "IntRankFunction":
        vals = [0] * (1 << m)
        order = size_lex_order(m)
        if len(seq) != len(order):
            raise ValueError(f"need {len(order)} values")
        for J, v in zip(order, seq):
            vals[J] = v
        return cls(m, tuple(vals))

    def bases(self) -> list[int]:
        r = self.rank()
        return [J for J in range(1 << self.m) if popcount(J) == r and self.values[J] == r]

    def to_list(self) -> list[int]:
        return list(self.values)


def size_lex_order(m: int) -> list[int]:
    """Non-empty masks by size, then lexicographically on sorted elements."""
    order = []
    for size in range(1, m + 1):
        for combo in itertools.combinations(range(m), size):
            order.append(sum(1 << k for k in combo))
    return order


def _ground_size(values) -> int:
    n = len(values)
    m = n.bit_length() - 1
    if n != 1 << m:
        raise ValueError("set function length must be a power of two")
    return m


def _vals(f) -> np.ndarray:
    if isinstance(f, IntRankFunction):
        return np.array(f.values, dtype=float)
    return np.asarray(f, dtype=float)


def is_polymatroid(f, tol: float = 1e-9) -> bool:
    v = _vals(f)
    m = _ground_size(v)
    if abs(v[0]) > tol:
        return False
    for J in range(1 << m):
        for i in range(m):
            if not J >> i & 1 and v[J] > v[J | 1 << i] + tol:
                return False
    for J in range(1 << m):
        for K in range(J + 1, 1 << m):
            if v[J | K] + v[J & K] > v[J] + v[K] + tol:
                return False
    return True


def is_matroid(f) -> bool:
    v = _vals(f)
    m = _ground_size(v)
    if not np.all(v == np.round(v)):
        return False
    if any(v[J] > popcount(J) or v[J] < 0 for J in range(1 << m)):
        return False
    return is_polymatroid(v, tol=0.0)


def round_profile(values, eps: float) -> IntRankFunction:
    """Round a real profile whose entries all lie within ``eps`` of integers."""
    v = np.asarray(values, dtype=float)
    r = np.rint(v)
    gap = float(np.max(np.abs(v - r)))
    if gap > eps:
        raise ValueError(f"integrality gap {gap:.3g} exceeds {eps}")
    return IntRankFunction(_ground_size(v), tuple(int(x) for x in r))


def integrality_gap(values) -> float:
    v = np.asarray(values, dtype=float)
    return float(np.max(np.abs(v - np.rint(v))))


def enumerate_matroids(m: int, allow_large: bool = False) -> list[IntRankFunction]:
    """All labeled matroid rank functions on ``m`` elements, sorted."""
    limit = 5 if allow_large else 4
    if not 0 <= m <= limit:
        raise ValueError(f"m must be in 0..{limit}")
    masks = sorted(range(1, 1 << m), key=lambda J: (popcount(J), J))
    f = [0] * (1 << m)
    found = []

    def assign(pos: int):
        if pos == len(masks):
            found.append(IntRankFunction(m, tuple(f)))
            return
        J = masks[pos]
        elems = [i for i in range(m) if J >> i & 1]
        subs = [f[J ^ (1 << i)] for i in elems]
        for val in range(max(subs), min(subs) + 2):
            ok = True
            for a, b in itertools.combinations(elems, 2):
                S = J ^ (1 << a) ^ (1 << b)
                if val + f[S] > f[S | 1 << a] + f[S | 1 << b]:
                    ok = False
                    break
            if ok:
                f[J] = val
                assign(pos + 1)
        f[J] = 0

    assign(0)
    return sorted(found, key=lambda r: r.values)


def permute(f: IntRankFunction, perm) -> IntRankFunction:
    """Relabel so that element ``i`` becomes ``perm[i]``."""
    vals = [0] * (1 << f.m)
    for J in range(1 << f.m):
        K = sum(1 << perm[i] for i in range(f.m) if J >> i & 1)
        vals[K] = f.values[J]
    return IntRankFunction(f.m, tuple(vals))


def canonical_form(f: IntRankFunction) -> tuple:
    return min(permute(f, p).values for p in itertools.permutations(range(f.m)))


def unlabeled(fs) -> list[tuple]:
    return sorted({canonical_form(f) for f in fs})


def polymatroid_vertices(f) -> set[tuple]:
    """Vertices from the greedy rule over orderings and prefix lengths."""
    v = _vals(f)
    m = _ground_size(v)
    integral = np.all(v == np.round(v))
    verts = set()
    for order in itertools.permutations(range(m)):
        x = [0.0] * m
        prev, A = 0.0, 0
        verts.add(tuple(x))
        for j in order:
            A |= 1 << j
            x[j] = v[A] - prev
            prev = v[A]
            verts.add(tuple(x))
    if integral:
        return {tuple(int(round(c)) for c in p) for p in verts}
    return verts


def minor(f: IntRankFunction, delete: int = 0, contract: int = 0) -> IntRankFunction:
    """Delete and contract element masks; survivors keep their relative order."""
    if delete & contract:
        raise ValueError("delete and contract sets overlap")
    rest = [i for i in range(f.m) if not (delete | contract) >> i & 1]
    base = f.values[contract]
    vals = []
    for J in range(1 << len(rest)):
        K = sum(1 << rest[k] for k in range(len(rest)) if J >> k & 1)
        vals.append(f.values[K | contract] - base)
    return IntRankFunction(len(rest), tuple(vals))


U24 = IntRankFunction(4, tuple(min(popcount(J), 2) for J in range(16)))


def uniform_matroid(r: int, m: int) -> IntRankFunction:
    return IntRankFunction(m, tuple(min(popcount(J), r) for J in range(1 << m)))


def _disjoint_pairs(m: int, leave: int):
    for kept in itertools.combinations(range(m), leave):
        others = [i for i in range(m) if i not in kept]
        for choice in itertools.product((0, 1), repeat=len(others)):
            D = sum(1 << i for i, c in zip(others, choice) if c == 0)
            C = sum(1 << i for i, c in zip(others, choice) if c == 1)
            yield D, C


def has_u24_minor(f: IntRankFunction) -> bool:
    if f.m < 4:
        return False
    return any(minor(f, D, C) == U24 for D, C in _disjoint_pairs(f.m, 4))


def is_binary(f: IntRankFunction) -> bool:
    """Binary representability via the excluded-minor test."""
    return not has_u24_minor(f)


def find_binary_representation(f: IntRankFunction) -> BinaryMatrix | None:
    """Search for a bit matrix whose column ranks reproduce ``f``.

    The columns of the first basis (in mask order) are pinned to unit
    vectors, which is no loss of generality; the others are searched
    column by column, pruned by checking every subset closed so far.
    """
    m, k = f.m, f.rank()
    if k == 0:
        return BinaryMatrix(np.zeros((0, m)), m=m)
    basis = min(f.bases(), key=lambda J: sorted(i for i in range(m) if J >> i & 1))
    cols = [0] * m
    pinned = {}
    for r, j in enumerate(i for i in range(m) if basis >> i & 1):
        pinned[j] = 1 << r

    def consistent(j: int) -> bool:
        below = (1 << j) - 1
        sub = below
        while True:
            J = sub | 1 << j
            rank = rank_of_ints(cols[i] for i in range(j + 1) if J >> i & 1)
            if rank != f.values[J]:
                return False
            if sub == 0:
                return True
            sub = (sub - 1) & below

    def place(j: int) -> bool:
        if j == m:
            return True
        options = [pinned[j]] if j in pinned else range(1 << k)
        for c in options:
            cols[j] = c
            if consistent(j) and place(j + 1):
                return True
        cols[j] = 0
        return False

    if not place(0):
        return None
    bits = [[(cols[j] >> r) & 1 for j in range(m)] for r in range(k)]
    return BinaryMatrix(bits, m=m).reduced()


def linear_matroid(A: BinaryMatrix) -> IntRankFunction:
    return IntRankFunction(A.m, tuple(A.column_rank(J) for J in range(1 << A.m)))
