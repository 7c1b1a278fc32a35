"""Builtin channel fixtures, the AWGN-to-MAC mapping and q-ary user splitting."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .mac import Mac, MacError, parity, popcount


def _inputs(m: int) -> np.ndarray:
    return np.arange(1 << m)


def deterministic(m: int, fn, n_outputs: int, labels=None) -> Mac:
    """MAC whose output is ``fn(x)`` for the integer-encoded input ``x``."""
    t = np.zeros((1 << m, n_outputs))
    for x in _inputs(m):
        t[x, fn(int(x))] = 1.0
    return Mac(m, t, labels=labels)


def xor2() -> Mac:
    return deterministic(2, lambda x: popcount(x) & 1, 2, labels=("0", "1"))


def identity(m: int = 1) -> Mac:
    return deterministic(m, lambda x: x, 1 << m)


def pure_noise(m: int = 1, outputs: int = 2) -> Mac:
    return Mac(m, np.full((1 << m, outputs), 1.0 / outputs))


def adder(m: int = 2) -> Mac:
    """Integer sum of the inputs."""
    return deterministic(m, popcount, m + 1, labels=tuple(str(k) for k in range(m + 1)))


def mixture() -> Mac:
    """Two users; half the time the XOR is seen, half the time both bits.

    Symbols 0-1 are the XOR mode, 2-5 the clear mode with value ``2 + x``.
    """
    t = np.zeros((4, 6))
    for x in range(4):
        t[x, popcount(x) & 1] += 0.5
        t[x, 2 + x] += 0.5
    labels = ("xor:0", "xor:1", "both:00", "both:10", "both:01", "both:11")
    return Mac(2, t, labels=labels)


def bec(eps: float) -> Mac:
    """Binary erasure channel; symbol 2 is the erasure."""
    return Mac(1, [[1 - eps, 0.0, eps], [0.0, 1 - eps, eps]], labels=("0", "1", "?"))


def bsc(p: float) -> Mac:
    return Mac(1, [[1 - p, p], [p, 1 - p]], labels=("0", "1"))


def linear(B) -> Mac:
    """Deterministic MAC Y = B X over F2; B has one column per user."""
    B = np.atleast_2d(np.asarray(B, dtype=np.int64) % 2)
    k, m = B.shape
    cols = [sum(int(b) << r for r, b in enumerate(B[:, j])) for j in range(m)]

    def out(x):
        v = 0
        for j in range(m):
            if x >> j & 1:
                v ^= cols[j]
        return v

    return deterministic(m, out, 1 << k)


def noisy(mac: Mac, flip: float) -> Mac:
    """Follow ``mac`` by a symmetric channel that redraws the output w.p. ``flip``."""
    k = mac.n_outputs
    mix = (1 - flip) * np.eye(k) + flip / k
    return Mac(mac.m, mac.table @ mix)


def random_mac(m: int, outputs: int, rng, concentration: float = 1.0) -> Mac:
    rng = np.random.default_rng(rng)
    return Mac(m, rng.dirichlet(np.full(outputs, concentration), size=1 << m))


BUILTINS = {
    "xor2": lambda m=2: xor2(),
    "identity": identity,
    "pure_noise": pure_noise,
    "adder": adder,
    "mixture": lambda m=2: mixture(),
}


def builtin(name: str, m: int | None = None, param: float | None = None) -> Mac:
    """Look up a named fixture: ``xor2``, ``identity``, ``pure_noise``,
    ``adder``, ``mixture``, ``bec`` and ``bsc`` (the last two take ``param``)."""
    if name == "bec":
        return bec(0.5 if param is None else param)
    if name == "bsc":
        return bsc(0.11 if param is None else param)
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise MacError(f"unknown builtin channel {name!r}") from None
    return factory() if m is None else factory(m)


@dataclass(frozen=True)
class AwgnSpec:
    m: int
    power: float = 1.0
    noise_var: float = 1.0
    bins: int = 64
    span: float = 6.0

    def __post_init__(self):
        if self.bins < 2:
            raise MacError("quantizer needs at least 2 bins")
        if self.span <= 0 or self.noise_var <= 0 or self.power <= 0:
            raise MacError("span, noise variance and power must be positive")

    @classmethod
    def from_snr(cls, m: int, snr_db: float, bins: int = 64, span: float = 6.0,
                 power: float = 1.0) -> "AwgnSpec":
        return cls(m, power, power / 10 ** (snr_db / 10), bins, span)

    def levels(self) -> np.ndarray:
        """Noiseless received amplitude for each count of ones."""
        k = np.arange(self.m + 1)
        return 2 * np.sqrt(self.power) / np.sqrt(self.m) * (k - self.m / 2)


def awgn_to_bmac(spec: AwgnSpec) -> Mac:
    """Quantized m-user MAC seen when the scaled sum of bits crosses AWGN."""
    sigma = np.sqrt(spec.noise_var)
    lv = spec.levels()
    edges = np.linspace(lv[0] - spec.span * sigma, lv[-1] + spec.span * sigma, spec.bins + 1)
    cuts = edges[1:-1]
    cdf = ndtr((cuts[None, :] - lv[:, None]) / sigma)
    cdf = np.concatenate([np.zeros((len(lv), 1)), cdf, np.ones((len(lv), 1))], axis=1)
    per_level = np.diff(cdf, axis=1)
    per_level = np.clip(per_level, 0, None)
    per_level /= per_level.sum(axis=1, keepdims=True)
    counts = np.array([popcount(x) for x in _inputs(spec.m)])
    centers = 0.5 * (edges[:-1] + edges[1:])
    return Mac(spec.m, per_level[counts], labels=tuple(f"{c:.6g}" for c in centers))


def split_qary(table, users: int, q: int) -> Mac:
    """Turn a q-ary-input MAC into a binary MAC with ``log2 q`` virtual users each.

    Input rows of ``table`` are indexed by ``sum_j a_j q**j`` (user 1 least
    significant).  Virtual user ``j*k + b`` carries bit ``b`` of ``a_j``, so
    the binary row index coincides with the q-ary one and rows are reused.
    """
    if q < 2 or q & (q - 1):
        raise MacError(f"q={q} is not a power of two")
    k = q.bit_length() - 1
    t = np.asarray(table, dtype=float)
    if t.shape[0] != q ** users:
        raise MacError(f"expected {q ** users} rows for {users} users with q={q}")
    return Mac(users * k, t, m_max=max(8, users * k))


def qary_sum_rate(table, users: int, q: int) -> float:
    """I(A_1..A_users; Y) for uniform q-ary inputs, computed directly."""
    t = np.asarray(table, dtype=float)
    joint = t / t.shape[0]
    indep = joint.sum(axis=0)[None, :] / t.shape[0]
    nz = joint > 0
    return float((joint[nz] * np.log2(joint[nz] / np.broadcast_to(indep, joint.shape)[nz])).sum())


def parity_fixture(m: int) -> Mac:
    """Y = X1 + ... + Xm (mod 2)."""
    return deterministic(m, lambda x: int(parity(x)), 2)
