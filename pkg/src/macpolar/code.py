"""Polar codes for m-user binary-input MACs.

Users apply the same Kronecker transform to their own bit sequences, so
the m-user system is a polar code over the group F2^m: position ``i`` of
the block carries the integer symbol whose bit ``k`` is user ``k+1``'s bit.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .extremal import InconsistencyError, assemble_linear_forms, default_threshold
from .gf2 import BinaryMatrix, rank_of_ints
from .mac import (Mac, bhattacharyya, form_information, map_error, marginalize_linear_form,
                  parity, popcount, rank_profile)
from .matroid import integrality_gap
from .transform import EXACT, MergePolicy, index_path, synthesize_all

log = logging.getLogger(__name__)

TRIAL_CHUNK = 256


def _check_length(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"block length {n} is not a power of two")
    return n.bit_length() - 1


def kronecker_encode(u):
    """x = u G_n over F2 (G_n the n-fold Kronecker power of [[1,0],[1,1]])."""
    u = np.asarray(u, dtype=np.int64)
    _check_length(u.shape[-1])
    return kernels.polar_transform_bits(u)


# ---------------------------------------------------------------------------
# synthesized channel statistics


@dataclass
class SynthChannelStats:
    index: int
    path: str
    profile: np.ndarray
    form_info: np.ndarray
    form_z: np.ndarray
    form_error: np.ndarray
    mode: str = "exact"
    samples: int = 0
    channel: Mac | None = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return len(self.profile).bit_length() - 1

    def sum_rate(self) -> float:
        return float(self.profile[-1])


def _exact_stats(i: int, path: str, mac: Mac, keep: bool) -> SynthChannelStats:
    z = np.zeros(mac.q)
    err = np.zeros(mac.q)
    for S in range(1, mac.q):
        ch = marginalize_linear_form(mac, S)
        z[S] = bhattacharyya(ch)
        err[S] = max(0.0, 1.0 - 0.5 * np.maximum(ch.table[0], ch.table[1]).sum())
    return SynthChannelStats(i, path, rank_profile(mac), form_information(mac), z, err,
                             "exact", 0, mac if keep else None)


def sample_channel(mac: Mac, x, rng) -> np.ndarray:
    """Draw one output symbol per input symbol in ``x``."""
    x = np.asarray(x, dtype=np.int64)
    cum = np.cumsum(mac.table, axis=1)
    cum[:, -1] = 1.0
    r = rng.random(x.shape)
    flat_x, flat_r = x.ravel(), r.ravel()
    y = np.empty(flat_x.size, dtype=np.int64)
    for sym in np.unique(flat_x):
        sel = flat_x == sym
        y[sel] = np.searchsorted(cum[sym], flat_r[sel], side="right")
    return np.minimum(y, mac.n_outputs - 1).reshape(x.shape)


def channel_likelihoods(mac: Mac, y) -> np.ndarray:
    """``lik[..., u] = P(y | u)`` for every received symbol."""
    return np.ascontiguousarray(mac.table.T[np.asarray(y, dtype=np.int64)])


def _submasks(J: int):
    d = J
    while True:
        yield d
        if d == 0:
            return
        d = (d - 1) & J


def _sampled_stats(root: Mac, depth: int, samples: int, seed, backend) -> list[SynthChannelStats]:
    n, q = 1 << depth, root.q
    log_den = np.zeros((q, n))     # accumulates -log2 P(u_J | rest) per J
    form_h = np.zeros((q, n))
    form_z = np.zeros((q, n))
    form_err = np.zeros((q, n))
    symbols = np.arange(q)
    sym_par = np.stack([parity(symbols & S) for S in range(q)])   # (q, q)
    done = 0
    chunks = math.ceil(samples / TRIAL_CHUNK)
    for ss in np.random.SeedSequence(seed).spawn(chunks):
        rng = np.random.default_rng(ss)
        T = min(TRIAL_CHUNK, samples - done)
        u = rng.integers(0, q, size=(T, n))
        y = sample_channel(root, kronecker_encode(u), rng)
        _, post = kernels.sc_decode_batch(channel_likelihoods(root, y), np.full(n, q - 1),
                                          np.zeros(n, dtype=np.int64), genie=u,
                                          want_post=True, backend=backend)
        tt, ii = np.meshgrid(np.arange(T), np.arange(n), indexing="ij")
        p_true = np.maximum(post[tt, ii, u], 1e-300)
        for J in range(1, q):
            den = np.zeros_like(p_true)
            for d in _submasks(J):
                den += post[tt, ii, u ^ d]
            log_den[J] += -np.log2(np.clip(p_true / np.maximum(den, 1e-300), 1e-300, 1.0)).sum(0)
        for S in range(1, q):
            p1 = post @ sym_par[S].astype(float)
            s_true = sym_par[S][u]
            p_s = np.where(s_true == 1, p1, 1 - p1)
            p_s = np.clip(p_s, 1e-300, 1.0)
            form_h[S] += -np.log2(p_s).sum(0)
            form_z[S] += np.sqrt(np.clip(1 - p_s, 0, None) / p_s).sum(0)
            guess = (p1 > 0.5).astype(np.int64)
            form_err[S] += (guess != s_true).sum(0)
        done += T
    out = []
    sizes = np.array([popcount(J) for J in range(q)], dtype=float)
    for i in range(n):
        prof = sizes - log_den[:, i] / done
        prof[0] = 0.0
        fi = 1.0 - form_h[:, i] / done
        fi[0] = 0.0
        z = np.minimum(form_z[:, i] / done, 1.0)
        z[0] = 1.0
        err = form_err[:, i] / done
        err[0] = 0.5
        out.append(SynthChannelStats(i, index_path(i, depth), np.clip(prof, 0, sizes), fi,
                                     z, err, "sampled", done))
    return out


def synthesize_channel_stats(root: Mac, depth: int, mode: str = "exact",
                             policy: MergePolicy = EXACT, seed=0, samples: int = 2000,
                             keep_channels: bool = True, backend=None) -> list[SynthChannelStats]:
    """Statistics of all ``2**depth`` synthesized channels.

    Exact mode builds every synthesized MAC through the transform tree;
    sampled mode estimates the same quantities from genie-aided decoding of
    random blocks.
    """
    if mode == "exact":
        macs = synthesize_all(root, depth, policy)
        return [_exact_stats(i, index_path(i, depth), mac, keep_channels)
                for i, mac in enumerate(macs)]
    if mode == "sampled":
        return _sampled_stats(root, depth, samples, seed, backend)
    raise ValueError(f"unknown synthesis mode {mode!r}")


# ---------------------------------------------------------------------------
# code construction


@dataclass
class CodeSpec:
    n: int
    m: int
    eps: float
    seed: int
    polarized: list
    r: list
    A: list
    B: list
    frozen: np.ndarray
    threshold: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return self.n.bit_length() - 1

    @property
    def free_mask(self) -> np.ndarray:
        return np.array(self.B, dtype=np.int64)

    def info_set(self, k: int) -> list[int]:
        """Indices (0-based) where user ``k`` (0-based) sends data."""
        return [i for i in range(self.n) if self.B[i] >> k & 1]

    def info_sizes(self) -> list[int]:
        return [len(self.info_set(k)) for k in range(self.m)]

    def sum_rate(self) -> float:
        return sum(self.info_sizes()) / self.n

    def unpolarized_fraction(self) -> float:
        return 1.0 - sum(self.polarized) / self.n

    def to_dict(self) -> dict:
        return {
            "n": self.n, "m": self.m, "eps": self.eps, "seed": self.seed,
            "threshold": self.threshold,
            "sum_rate": self.sum_rate(),
            "unpolarized_fraction": self.unpolarized_fraction(),
            "indices": [
                {"i": i + 1, "polarized": bool(self.polarized[i]), "r": int(self.r[i]),
                 "A": self.A[i].to_strings(),
                 "B": [k + 1 for k in range(self.m) if self.B[i] >> k & 1],
                 "frozen": [int(self.frozen[i] >> k & 1) for k in range(self.m)]}
                for i in range(self.n)
            ],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CodeSpec":
        n, m = int(d["n"]), int(d["m"])
        recs = sorted(d["indices"], key=lambda r: r["i"])
        if len(recs) != n:
            raise ValueError("index records do not cover the block")
        return cls(
            n=n, m=m, eps=float(d["eps"]), seed=int(d["seed"]),
            polarized=[bool(r["polarized"]) for r in recs],
            r=[int(r["r"]) for r in recs],
            A=[BinaryMatrix.from_strings(r["A"], m=m) for r in recs],
            B=[sum(1 << (k - 1) for k in r["B"]) for r in recs],
            frozen=np.array([sum(b << k for k, b in enumerate(r["frozen"])) for r in recs],
                            dtype=np.int64),
            threshold=float(d.get("threshold", 0.0)),
            notes=list(d.get("notes", [])),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "CodeSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))


def eps_schedule(n: int, alpha: float = 0.4) -> float:
    """The 2^(-n^alpha) tolerance schedule; far too strict for small n."""
    return 2.0 ** (-(n ** alpha))


def select_columns(A: BinaryMatrix, r: int) -> int:
    """Greedily pick ``r`` independent columns, lowest index first."""
    chosen, cols = 0, []
    for k in range(A.m):
        if len(cols) == r:
            break
        c = A.column_mask(k)
        if rank_of_ints(cols + [c]) > len(cols):
            cols.append(c)
            chosen |= 1 << k
    if len(cols) != r:
        raise InconsistencyError(f"only {len(cols)} independent columns, need {r}")
    return chosen


def _draw_frozen(n: int, m: int, seed) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, 1 << m, size=n)


def construct_code(stats: list[SynthChannelStats], eps: float = 0.01, seed: int = 0,
                   threshold: float | None = None) -> CodeSpec:
    n = len(stats)
    _check_length(n)
    m = stats[0].m
    thr = default_threshold(eps) if threshold is None else threshold
    polarized, rs, As, Bs, notes = [], [], [], [], []
    for st in stats:
        ok, r, A, B = False, 0, BinaryMatrix(np.zeros((0, m)), m=m), 0
        if integrality_gap(st.profile) <= eps:
            r = int(np.rint(st.profile[-1]))
            try:
                A = assemble_linear_forms(st.form_info, m, r, thr)
                B = select_columns(A, r)
                ok = True
            except InconsistencyError as exc:
                log.info("index %d demoted to unpolarized: %s", st.index + 1, exc)
                notes.append(f"index {st.index + 1} demoted: {exc}")
                r, A, B = 0, BinaryMatrix(np.zeros((0, m)), m=m), 0
        polarized.append(ok)
        rs.append(r)
        As.append(A)
        Bs.append(B)
    frozen = _draw_frozen(n, m, seed) & ~np.array(Bs, dtype=np.int64) & ((1 << m) - 1)
    return CodeSpec(n, m, eps, seed, polarized, rs, As, Bs, frozen, thr, notes)


def construct_by_reliability(stats: list[SynthChannelStats], info_bits: int,
                             seed: int = 0) -> CodeSpec:
    """Single-user code with a prescribed number of information bits.

    The ``info_bits`` indices with the smallest Bhattacharyya parameter
    carry data; all others are frozen.
    """
    n = len(stats)
    _check_length(n)
    if stats[0].m != 1:
        raise ValueError("fixed-rate construction is defined for single-user channels")
    if not 0 <= info_bits <= n:
        raise ValueError("info_bits out of range")
    z = np.array([st.form_z[1] for st in stats])
    chosen = set(np.argsort(z, kind="stable")[:info_bits].tolist())
    one = BinaryMatrix([[1]], m=1)
    empty = BinaryMatrix(np.zeros((0, 1)), m=1)
    B = [1 if i in chosen else 0 for i in range(n)]
    frozen = _draw_frozen(n, 1, seed) & ~np.array(B, dtype=np.int64) & 1
    return CodeSpec(n, 1, float("nan"), seed, [i in chosen for i in range(n)],
                    B, [one if i in chosen else empty for i in range(n)], B, frozen,
                    0.0, [f"fixed rate {info_bits}/{n} by Bhattacharyya ranking"])


# ---------------------------------------------------------------------------
# encoding and decoding


@dataclass
class Codeword:
    u: np.ndarray       # (n,) integer symbols, bit k = user k+1
    x: np.ndarray       # (n,) transmitted symbols
    payload: list

    def user_bits(self, k: int, which: str = "x") -> np.ndarray:
        return (getattr(self, which) >> k) & 1


def _place_payload(spec: CodeSpec, payload) -> np.ndarray:
    """(T, n) symbol array from per-user payload arrays of shape (T, |G[k]|)."""
    u = np.broadcast_to(spec.frozen, (payload[0].shape[0], spec.n)).copy() \
        if payload else spec.frozen[None, :].copy()
    for k in range(spec.m):
        idx = spec.info_set(k)
        bits = np.asarray(payload[k], dtype=np.int64)
        if bits.shape[-1] != len(idx):
            raise ValueError(f"user {k + 1} payload has {bits.shape[-1]} bits, "
                             f"code carries {len(idx)}")
        if len(idx):
            u[:, idx] |= (bits & 1) << k
    return u


def encode_block(spec: CodeSpec, payload) -> Codeword:
    """Encode one block; ``payload[k]`` holds user k+1's information bits."""
    if len(payload) != spec.m:
        raise ValueError(f"need one payload per user ({spec.m})")
    pl = [np.asarray(p, dtype=np.int64).reshape(1, -1) for p in payload]
    u = _place_payload(spec, pl)[0]
    return Codeword(u, kronecker_encode(u), [p[0] for p in pl])


def encode_batch(spec: CodeSpec, payload) -> tuple[np.ndarray, np.ndarray]:
    u = _place_payload(spec, [np.asarray(p, dtype=np.int64) for p in payload])
    return u, kronecker_encode(u)


@dataclass
class DecodeResult:
    u: np.ndarray             # decided symbols (or true ones under the genie)
    decisions: np.ndarray     # per-index decisions of the decoding function

    def payload(self, spec: CodeSpec) -> list:
        return [(self.decisions[..., spec.info_set(k)] >> k) & 1 for k in range(spec.m)]


def decode_block(spec: CodeSpec, mac: Mac, y, mode: str = "standalone", u_true=None,
                 backend=None) -> DecodeResult:
    """Successive decoding of one block (1-D ``y``) or a batch (2-D ``y``)."""
    y = np.asarray(y, dtype=np.int64)
    single = y.ndim == 1
    y2 = y[None, :] if single else y
    genie = None
    if mode == "genie":
        if u_true is None:
            raise ValueError("genie decoding needs the true u")
        genie = np.asarray(u_true, dtype=np.int64).reshape(y2.shape)
    elif mode != "standalone":
        raise ValueError(f"unknown decoder mode {mode!r}")
    dec = kernels.sc_decode_batch(channel_likelihoods(mac, y2), spec.free_mask, spec.frozen,
                                  genie=genie, backend=backend)
    u = genie if genie is not None else dec
    if single:
        return DecodeResult(u[0], dec[0])
    return DecodeResult(u, dec)


def index_errors(stats_i: SynthChannelStats, A: BinaryMatrix) -> float:
    """MAP error of A U_i: exact when the channel is kept, else a row-wise bound."""
    if A.k == 0:
        return 0.0
    if stats_i.channel is not None:
        return map_error(stats_i.channel, A.bits)
    return float(min(1.0, sum(stats_i.form_error[S] for S in A.row_masks())))


def union_bound(spec: CodeSpec, stats: list[SynthChannelStats]) -> float:
    return float(sum(index_errors(stats[i], spec.A[i]) for i in range(spec.n)
                     if spec.B[i]))


# ---------------------------------------------------------------------------
# Monte Carlo simulation


@dataclass
class SimReport:
    trials: int
    block_errors: int
    seed: int
    n: int
    m: int
    sum_rate: float
    index_errors: np.ndarray
    first_error: np.ndarray
    genie_mismatches: int | None = None
    union_bound: float | None = None
    elapsed: float = 0.0
    backend: str = ""

    @property
    def bler(self) -> float:
        return self.block_errors / self.trials if self.trials else 0.0

    def bler_sigma(self) -> float:
        p = self.bler
        return math.sqrt(p * (1 - p) / self.trials) if self.trials else 0.0

    def to_dict(self) -> dict:
        return {
            "trials": self.trials, "block_errors": self.block_errors, "bler": self.bler,
            "bler_sigma": self.bler_sigma(), "seed": self.seed, "n": self.n, "m": self.m,
            "sum_rate": self.sum_rate, "union_bound": self.union_bound,
            "genie_mismatches": self.genie_mismatches,
            "index_errors": self.index_errors.tolist(),
            "elapsed_s": self.elapsed, "backend": self.backend,
        }

    def trials_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "block_error", "first_error_index"])
        for t, fe in enumerate(self.first_error):
            w.writerow([t, int(fe >= 0), int(fe) + 1 if fe >= 0 else 0])
        return buf.getvalue()


def _first_error(dec: np.ndarray, u: np.ndarray) -> np.ndarray:
    wrong = dec != u
    return np.where(wrong.any(axis=1), wrong.argmax(axis=1), -1)


def simulate(spec: CodeSpec, mac: Mac, trials: int, seed: int = 0, genie_check: bool = False,
             stats: list[SynthChannelStats] | None = None, backend=None) -> SimReport:
    """Monte Carlo block error rate of the standalone decoder.

    Trials run in fixed-size chunks, each with its own child seed, so the
    outcome depends only on ``seed``.  With ``genie_check`` every block is
    also decoded with the genie and the two block-error events compared.
    """
    if mac.m != spec.m:
        raise ValueError("channel and code disagree on the user count")
    start = time.perf_counter()
    sizes = spec.info_sizes()
    idx_err = np.zeros(spec.n, dtype=np.int64)
    first = np.full(trials, -1, dtype=np.int64)
    mismatches = 0 if genie_check else None
    chunks = math.ceil(trials / TRIAL_CHUNK) if trials else 0
    done = 0
    for ss in np.random.SeedSequence(seed).spawn(chunks):
        rng = np.random.default_rng(ss)
        T = min(TRIAL_CHUNK, trials - done)
        payload = [rng.integers(0, 2, size=(T, s)) for s in sizes]
        u, x = encode_batch(spec, payload)
        y = sample_channel(mac, x, rng)
        lik = channel_likelihoods(mac, y)
        dec = kernels.sc_decode_batch(lik, spec.free_mask, spec.frozen, backend=backend)
        fe = _first_error(dec, u)
        first[done:done + T] = fe
        if genie_check:
            gdec = kernels.sc_decode_batch(lik, spec.free_mask, spec.frozen, genie=u,
                                           backend=backend)
            idx_err += (gdec != u).sum(axis=0)
            mismatches += int(((gdec != u).any(axis=1) != (fe >= 0)).sum())
        done += T
    ub = union_bound(spec, stats) if stats is not None else None
    return SimReport(trials, int((first >= 0).sum()), seed, spec.n, spec.m, spec.sum_rate(),
                     idx_err, first, mismatches, ub, time.perf_counter() - start,
                     backend or kernels.BACKEND)


def stats_csv(stats: list[SynthChannelStats]) -> str:
    """One row per (index, mask) with I[J], I(P^[S]) and Z(P^[S])."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "path", "mask", "I_subset", "I_form", "Z_form", "mode", "samples"])
    for st in stats:
        for mask in range(len(st.profile)):
            w.writerow([st.index + 1, st.path, mask, f"{st.profile[mask]:.12g}",
                        f"{st.form_info[mask]:.12g}", f"{st.form_z[mask]:.12g}",
                        st.mode, st.samples])
    return buf.getvalue()
