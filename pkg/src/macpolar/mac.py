"""Exact m-user binary-input MACs and the information measures on them.

Inputs are always i.i.d. uniform bits. Row index of a table is the integer
encoding of the input vector with user 1 as the least significant bit.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

M_MAX = 8
ROW_TOL = 1e-12
TINY = 1e-300


class MacError(ValueError):
    pass


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def parity(values):
    """Parity (mod-2 popcount) of integers, elementwise for arrays."""
    v = np.asarray(values, dtype=np.int64).copy()
    out = np.zeros_like(v)
    while np.any(v):
        out ^= v & 1
        v >>= 1
    return out


def entropy(p) -> float:
    """Shannon entropy in bits of a pmf given as an array of any shape."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > TINY]
    return float(-(p * np.log2(p)).sum())


def _cond_entropy(joint: np.ndarray) -> float:
    """H(A | B) for a joint array with rows indexed by a, columns by b."""
    return entropy(joint) - entropy(joint.sum(axis=0))


@dataclass(frozen=True, eq=False)
class Mac:
    """Conditional law P(y|x) of an m-user binary-input MAC.

    ``table[x, y]`` with ``x`` in ``0..2**m - 1``. ``labels`` is optional
    metadata for output symbols and never enters any computation.
    """

    m: int
    table: np.ndarray
    labels: tuple | None = field(default=None, compare=False)
    m_max: int = field(default=M_MAX, compare=False)

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.ndim != 2:
            raise MacError("table must be two-dimensional")
        if not 1 <= self.m <= self.m_max:
            raise MacError(f"user count {self.m} outside 1..{self.m_max}")
        if t.shape[0] != 1 << self.m:
            raise MacError(f"expected {1 << self.m} rows, got {t.shape[0]}")
        if t.shape[1] < 1:
            raise MacError("empty output alphabet")
        if np.any(t < 0) or not np.all(np.isfinite(t)):
            raise MacError("negative or non-finite probability")
        if np.any(np.abs(t.sum(axis=1) - 1.0) > ROW_TOL):
            raise MacError("rows must sum to 1")
        if self.labels is not None and len(self.labels) != t.shape[1]:
            raise MacError("label count does not match output alphabet")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def q(self) -> int:
        return 1 << self.m

    @property
    def n_outputs(self) -> int:
        return self.table.shape[1]

    @property
    def full(self) -> int:
        return (1 << self.m) - 1

    def joint(self) -> np.ndarray:
        return self.table / self.q

    def __repr__(self):
        return f"Mac(m={self.m}, outputs={self.n_outputs})"

    # -- file format -------------------------------------------------------

    def to_dict(self) -> dict:
        d = {"m": self.m, "outputs": self.n_outputs,
             "rows": self.table.tolist()}
        if self.labels is not None:
            d["labels"] = [str(s) for s in self.labels]
        return d

    @classmethod
    def from_dict(cls, d: dict, m_max: int = M_MAX) -> "Mac":
        try:
            m, outputs, rows = int(d["m"]), int(d["outputs"]), d["rows"]
        except KeyError as exc:
            raise MacError(f"missing field {exc}") from None
        table = np.asarray(rows, dtype=float)
        if table.ndim != 2 or table.shape[1] != outputs:
            raise MacError(f"rows must be 2^m arrays of {outputs} numbers")
        labels = tuple(d["labels"]) if "labels" in d else None
        return cls(m, table, labels=labels, m_max=m_max)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path, m_max: int = M_MAX) -> "Mac":
        return cls.from_dict(json.loads(Path(path).read_text()), m_max=m_max)


@dataclass(frozen=True, eq=False)
class SingleUserChannel:
    """Binary-input channel, ``table[s, b]`` = Q(b|s)."""

    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.ndim != 2 or t.shape[0] != 2:
            raise MacError("single-user table must have 2 rows")
        if np.any(t < 0) or np.any(np.abs(t.sum(axis=1) - 1.0) > 1e-9):
            raise MacError("invalid channel rows")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def mutual_info(self) -> float:
        return _input_info(self.table)


def _input_info(table: np.ndarray) -> float:
    """I(X;Y) for uniform X over the rows of ``table``."""
    joint = table / table.shape[0]
    return entropy(joint.sum(axis=0)) - (entropy(joint) - np.log2(table.shape[0]))


def _group_rows(mac: Mac, keep_mask: int) -> np.ndarray:
    """Joint law of (x restricted to ``keep_mask`` , y) as a (2^m, |Y|) array.

    Row index is ``x & keep_mask``; rows for other indices are zero.
    """
    joint = mac.joint()
    out = np.zeros_like(joint)
    idx = np.arange(mac.q) & keep_mask
    np.add.at(out, idx, joint)
    return out


def mutual_info_subset(mac: Mac, J: int) -> float:
    """I(X[J]; Y, X[J^c]) in bits."""
    J &= mac.full
    if J == 0:
        return 0.0
    comp = mac.full ^ J
    # H(X[J] | Y X[J^c]) = H(X, Y) - H(X[J^c], Y); H(X[J]) = |J|.
    h_cond = entropy(mac.joint()) - entropy(_group_rows(mac, comp))
    return float(popcount(J) - h_cond)


def rank_profile(mac: Mac) -> np.ndarray:
    """All ``2**m`` values I[J], indexed by subset mask."""
    return np.array([mutual_info_subset(mac, J) for J in range(mac.q)])


def mutual_info_unconditioned(mac: Mac, S: int) -> float:
    """I(X[S]; Y) in bits."""
    S &= mac.full
    if S == 0:
        return 0.0
    grouped = _group_rows(mac, S)
    h_y = entropy(grouped.sum(axis=0))
    return float(popcount(S) - (entropy(grouped) - h_y))


def marginalize_linear_form(mac: Mac, S: int) -> SingleUserChannel:
    """Channel from the parity of the inputs in ``S`` to the output."""
    S &= mac.full
    if S == 0:
        raise MacError("linear form needs a non-empty user set")
    s = parity(np.arange(mac.q) & S)
    t = np.stack([mac.table[s == 0].sum(axis=0), mac.table[s == 1].sum(axis=0)])
    return SingleUserChannel(t / (mac.q // 2))


def form_information(mac: Mac) -> np.ndarray:
    """I(P^[S]) for every mask S (entry 0 is 0)."""
    out = np.zeros(mac.q)
    for S in range(1, mac.q):
        out[S] = marginalize_linear_form(mac, S).mutual_info()
    return out


def bhattacharyya(q: SingleUserChannel) -> float:
    z = float(np.sqrt(q.table[0] * q.table[1]).sum())
    return min(max(z, 0.0), 1.0)


def linear_image_info(mac: Mac, A) -> float:
    """I(A X; Y) for a binary matrix A with m columns."""
    A = np.asarray(A, dtype=np.int64) % 2
    if A.size == 0:
        return 0.0
    xs = (np.arange(mac.q)[:, None] >> np.arange(mac.m)[None, :]) & 1
    img = (xs @ A.T) % 2
    keys = img @ (1 << np.arange(A.shape[0]))
    joint = np.zeros((1 << A.shape[0], mac.n_outputs))
    np.add.at(joint, keys, mac.joint())
    return float(entropy(joint.sum(axis=1)) - _cond_entropy(joint))


def map_error(mac: Mac, A=None) -> float:
    """Error probability of the MAP estimate of ``A x`` from y (A=None: x)."""
    if A is None:
        joint = mac.joint()
    else:
        A = np.asarray(A, dtype=np.int64) % 2
        if A.size == 0:
            return 0.0
        xs = (np.arange(mac.q)[:, None] >> np.arange(mac.m)[None, :]) & 1
        keys = ((xs @ A.T) % 2) @ (1 << np.arange(A.shape[0]))
        joint = np.zeros((1 << A.shape[0], mac.n_outputs))
        np.add.at(joint, keys, mac.joint())
    return float(max(0.0, 1.0 - joint.max(axis=0).sum()))

