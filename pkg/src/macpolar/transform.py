"""One-step polar transforms of a MAC and the polarization process.

Every transform is followed by output merging, so that synthesized
alphabets stay bounded.  Exact merging only fuses output symbols whose
posterior vectors over the input agree; lossy merging trades a measured
amount of sum-rate for a hard alphabet cap.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .mac import Mac, mutual_info_subset, rank_profile

EXACT_QUANTUM = 1e-12

MINUS, PLUS = "-", "+"
_SIGN_ALIASES = {"-": MINUS, "−": MINUS, "0": MINUS, "+": PLUS, "1": PLUS}


class AlphabetCapacityError(RuntimeError):
    """Exact synthesis would exceed the configured output alphabet cap."""


@dataclass(frozen=True)
class MergePolicy:
    mode: str = "exact"
    tolerance: float = 0.0
    max_alphabet: int = 4096

    def __post_init__(self):
        if self.mode not in ("exact", "lossy"):
            raise ValueError(f"unknown merge mode {self.mode!r}")
        if self.tolerance < 0 or self.max_alphabet < 1:
            raise ValueError("tolerance must be >= 0 and max_alphabet >= 1")

    @classmethod
    def lossy(cls, max_alphabet: int = 256, tolerance: float = 1e-3):
        return cls("lossy", tolerance, max_alphabet)


EXACT = MergePolicy()


def parse_path(path) -> list[str]:
    """Accept ``"+-+"`` style strings or any iterable of signs."""
    if isinstance(path, str):
        path = list(path)
    out = []
    for s in path:
        try:
            out.append(_SIGN_ALIASES[str(s)])
        except KeyError:
            raise ValueError(f"bad transform sign {s!r}") from None
    return out


def format_path(path: Iterable[str]) -> str:
    return "".join(parse_path(list(path)))


def _xor_permuted(table: np.ndarray) -> np.ndarray:
    """``out[u2, u1, :] = table[u1 ^ u2, :]``."""
    q = table.shape[0]
    idx = np.arange(q)[:, None] ^ np.arange(q)[None, :]
    return table[idx]


def _raw_minus(mac: Mac) -> np.ndarray:
    shifted = _xor_permuted(mac.table)
    t = np.einsum("bai,bj->aij", shifted, mac.table) / mac.q
    return t.reshape(mac.q, -1)


def _raw_plus(mac: Mac) -> np.ndarray:
    shifted = _xor_permuted(mac.table)
    t = shifted[:, :, :, None] * mac.table[:, None, None, :] / mac.q
    return t.reshape(mac.q, -1)


def _bucket(table: np.ndarray, keys: np.ndarray) -> np.ndarray:
    """Sum the columns of ``table`` whose integer key rows coincide."""
    order = np.lexsort(keys.T)
    sk = keys[order]
    new = np.ones(len(order), dtype=bool)
    new[1:] = np.any(sk[1:] != sk[:-1], axis=1)
    inverse = np.empty(len(order), dtype=np.int64)
    inverse[order] = np.cumsum(new) - 1
    size = int(new.sum())
    return np.stack([np.bincount(inverse, weights=row, minlength=size) for row in table])


def _posteriors(table: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drop null outputs; return (table, posterior matrix of shape (|Y|, q))."""
    mass = table.sum(axis=0)
    keep = mass > 0
    table = table[:, keep]
    return table, (table / mass[keep]).T


def _renormalise(table: np.ndarray) -> np.ndarray:
    return table / table.sum(axis=1, keepdims=True)


def merge_exact(table: np.ndarray) -> np.ndarray:
    table, post = _posteriors(table)
    keys = np.rint(post / EXACT_QUANTUM).astype(np.int64)
    merged = _bucket(table, keys)
    return _renormalise(merged)


def merge_lossy(table: np.ndarray, tolerance: float, max_alphabet: int) -> np.ndarray:
    """Greedy grid merge in square-root posterior coordinates.

    Symbols sharing a grid cell of side ``tolerance`` are fused; the cell is
    doubled until the alphabet fits under ``max_alphabet``.
    """
    table = merge_exact(table)
    if table.shape[1] <= max_alphabet and tolerance == 0:
        return table
    _, post = _posteriors(table)
    root = np.sqrt(post)
    tol = tolerance if tolerance > 0 else 1e-6
    merged = table
    while True:
        keys = np.floor(root / tol).astype(np.int64)
        merged = _bucket(table, keys)
        if merged.shape[1] <= max_alphabet:
            break
        tol *= 2.0
    return _renormalise(merged)


def merge_outputs_report(mac: Mac, policy: MergePolicy = EXACT) -> tuple[Mac, float]:
    """Merge output symbols; also return the sum-rate lost by merging."""
    if policy.mode == "exact":
        t = merge_exact(mac.table)
        if t.shape[1] > policy.max_alphabet:
            raise AlphabetCapacityError(
                f"exact alphabet {t.shape[1]} exceeds cap {policy.max_alphabet}")
        return Mac(mac.m, t, m_max=mac.m_max), 0.0
    t = merge_lossy(mac.table, policy.tolerance, policy.max_alphabet)
    out = Mac(mac.m, t, m_max=mac.m_max)
    loss = mutual_info_subset(mac, mac.full) - mutual_info_subset(out, out.full)
    return out, max(loss, 0.0)


def merge_outputs(mac: Mac, policy: MergePolicy = EXACT) -> Mac:
    return merge_outputs_report(mac, policy)[0]


def minus_transform(mac: Mac, policy: MergePolicy = EXACT) -> Mac:
    raw = Mac(mac.m, _raw_minus(mac), m_max=mac.m_max)
    return merge_outputs(raw, policy)


def plus_transform(mac: Mac, policy: MergePolicy = EXACT) -> Mac:
    raw = Mac(mac.m, _raw_plus(mac), m_max=mac.m_max)
    return merge_outputs(raw, policy)


def transform(mac: Mac, sign: str, policy: MergePolicy = EXACT) -> Mac:
    return minus_transform(mac, policy) if sign == MINUS else plus_transform(mac, policy)


def apply_path(root: Mac, path, policy: MergePolicy = EXACT) -> Mac:
    mac = root
    for sign in parse_path(path):
        mac = transform(mac, sign, policy)
    return mac


def index_path(i: int, depth: int) -> str:
    """Sign path of synthesized channel ``i`` (0-based) at the given depth.

    Bits of ``i`` are read most significant first; 0 is minus, 1 is plus.
    """
    return "".join(PLUS if (i >> (depth - 1 - k)) & 1 else MINUS
                   for k in range(depth))


def synthesize_all(root: Mac, depth: int, policy: MergePolicy = EXACT) -> list[Mac]:
    """All ``2**depth`` synthesized channels, ordered by :func:`index_path`."""
    level = [root]
    for _ in range(depth):
        nxt = []
        for mac in level:
            nxt.append(minus_transform(mac, policy))
            nxt.append(plus_transform(mac, policy))
        level = nxt
    return level


def exhaustive_polarization(root: Mac, depth: int,
                            policy: MergePolicy = EXACT) -> list[np.ndarray]:
    return [rank_profile(mac) for mac in synthesize_all(root, depth, policy)]


def random_paths(depth: int, trials: int, seed) -> list[str]:
    """Independent uniform sign paths, one child seed per trial."""
    children = np.random.SeedSequence(seed).spawn(trials)
    paths = []
    for ss in children:
        bits = np.random.default_rng(ss).integers(0, 2, size=depth)
        paths.append("".join(PLUS if b else MINUS for b in bits))
    return paths


def sample_polarization(root: Mac, depth: int, trials: int, seed=0,
                        policy: MergePolicy = EXACT) -> list[np.ndarray]:
    if trials < 1:
        raise ValueError("need at least one trial")
    cache: dict[str, Mac] = {"": root}

    def reach(path: str) -> Mac:
        if path not in cache:
            cache[path] = transform(reach(path[:-1]), path[-1], policy)
        return cache[path]

    return [rank_profile(reach(p)) for p in random_paths(depth, trials, seed)]


def profiles_to_csv(profiles: Sequence[np.ndarray], paths: Sequence[str] | None = None) -> str:
    lines = ["path,mask,value" if paths is not None else "mask,value"]
    for k, prof in enumerate(profiles):
        for mask, v in enumerate(prof):
            row = f"{mask},{v:.12g}"
            lines.append(f"{paths[k]},{row}" if paths is not None else row)
    return "\n".join(lines) + "\n"
