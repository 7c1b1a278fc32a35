"""Small dense bit matrices over F2."""
from __future__ import annotations

import numpy as np


def _row_ints(a: np.ndarray) -> list[int]:
    weights = 1 << np.arange(a.shape[1], dtype=object)
    return [int(sum(int(b) * w for b, w in zip(row, weights))) for row in a]


def rank_of_ints(vectors) -> int:
    """Rank over F2 of vectors given as integer bitmasks."""
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


def rref(a) -> np.ndarray:
    """Reduced row echelon form with zero rows removed.

    Pivots are taken left to right (column 0 first), so the result is the
    unique canonical basis of the row space.
    """
    a = (np.array(a, dtype=np.uint8) % 2).copy()
    if a.ndim != 2:
        raise ValueError("expected a 2-D bit matrix")
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        hits = np.nonzero(a[:, c])[0]
        for h in hits:
            if h != r:
                a[h] ^= a[r]
        r += 1
    return a[:r]


class BinaryMatrix:
    """k x m matrix over F2 with a cached canonical form."""

    def __init__(self, rows, m: int | None = None):
        a = np.array(rows, dtype=np.uint8) % 2
        if a.size == 0:
            a = np.zeros((0, m or 0), dtype=np.uint8)
        elif a.ndim == 1:
            a = a[None, :]
        if m is not None and a.shape[1] != m:
            raise ValueError(f"expected {m} columns")
        a.setflags(write=False)
        self.bits = a
        self._rref = None

    @property
    def shape(self):
        return self.bits.shape

    @property
    def k(self) -> int:
        return self.bits.shape[0]

    @property
    def m(self) -> int:
        return self.bits.shape[1]

    @property
    def canonical(self) -> np.ndarray:
        if self._rref is None:
            self._rref = rref(self.bits)
        return self._rref

    def rank(self) -> int:
        return self.canonical.shape[0]

    def column_mask(self, j: int) -> int:
        return int(sum(int(b) << r for r, b in enumerate(self.bits[:, j])))

    def column_rank(self, J: int) -> int:
        """Rank of the columns whose indices are set in mask ``J``."""
        return rank_of_ints(self.column_mask(j) for j in range(self.m) if J >> j & 1)

    def row_masks(self) -> list[int]:
        return _row_ints(self.bits)

    def same_row_space(self, other: "BinaryMatrix") -> bool:
        a, b = self.canonical, other.canonical
        return a.shape == b.shape and bool(np.array_equal(a, b))

    def reduced(self) -> "BinaryMatrix":
        return BinaryMatrix(self.canonical, m=self.m)

    def to_strings(self) -> list[str]:
        return ["".join(str(int(b)) for b in row) for row in self.bits]

    @classmethod
    def from_strings(cls, rows, m: int | None = None) -> "BinaryMatrix":
        rows = list(rows)
        if not rows:
            return cls(np.zeros((0, m or 0)), m=m)
        return cls([[int(c) for c in r] for r in rows], m=m)

    @classmethod
    def from_masks(cls, masks, m: int) -> "BinaryMatrix":
        masks = list(masks)
        return cls([[(v >> j) & 1 for j in range(m)] for v in masks]
                   if masks else np.zeros((0, m)), m=m)

    def __eq__(self, other):
        return isinstance(other, BinaryMatrix) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.bits.shape, self.bits.tobytes()))

    def __repr__(self):
        return f"BinaryMatrix({self.to_strings()})"
