"""Classification of (near-)extremal MACs and recovery of their linear forms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gf2 import BinaryMatrix, rank_of_ints
from .mac import (Mac, form_information, linear_image_info, mutual_info_unconditioned,
                  rank_profile)
from .matroid import U24, IntRankFunction, integrality_gap


class NotPolarized(ValueError):
    pass


class InvalidProfile(ValueError):
    pass


class InconsistencyError(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


# I-triple (I[1], I[2], I[12]) -> forced (I(X1;Y), I(X2;Y), I(X1+X2;Y))
PAIR_TABLE = {
    (0, 0, 0): (0, 0, 0),
    (0, 1, 1): (0, 1, 0),
    (1, 0, 1): (1, 0, 0),
    (1, 1, 1): (0, 0, 1),
    (1, 1, 2): (1, 1, 1),
}


@dataclass
class TripleClass:
    i_triple: tuple
    j_triple: tuple
    j_measured: tuple
    gap: float
    gamma: float


def classify_pair(mac: Mac, eps: float = 1e-9) -> TripleClass:
    if mac.m != 2:
        raise ValueError("classify_pair needs a 2-user MAC")
    prof = rank_profile(mac)
    i_vals = np.array([prof[1], prof[2], prof[3]])
    gap = integrality_gap(i_vals)
    if gap > eps:
        raise NotPolarized(f"I-triple {i_vals.round(6).tolist()} is {gap:.3g} from integers")
    i_triple = tuple(int(v) for v in np.rint(i_vals))
    if i_triple not in PAIR_TABLE:
        raise InvalidProfile(f"I-triple {i_triple} is not a 2-element matroid")
    forms = form_information(mac)
    measured = (mutual_info_unconditioned(mac, 1), mutual_info_unconditioned(mac, 2), forms[3])
    forced = PAIR_TABLE[i_triple]
    gamma = float(max(abs(a - b) for a, b in zip(measured, forced)))
    return TripleClass(i_triple, forced, tuple(float(x) for x in measured), gap, gamma)


def default_threshold(eps: float) -> float:
    return math.sqrt(eps)


@dataclass
class ExtremalReport:
    rounded: IntRankFunction
    gap: float
    A: BinaryMatrix
    achieved: float | None
    residual: float | None
    threshold: float
    form_info: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "rounded_profile": self.rounded.to_list(),
            "gap": self.gap,
            "A": self.A.to_strings(),
            "rank": self.A.rank(),
            "achieved": self.achieved,
            "residual": self.residual,
            "threshold": self.threshold,
        }


def assemble_linear_forms(form_info, m: int, rank: int, threshold: float) -> BinaryMatrix:
    """Pick the recoverable parities and check that they form a subspace.

    ``form_info[S]`` is I(P^[S]); a form counts as recoverable when its
    value exceeds ``1 - threshold``.
    """
    good = {S for S in range(1, 1 << m) if form_info[S] > 1 - threshold}
    for a in sorted(good):
        for b in sorted(good):
            if a < b and (a ^ b) not in good:
                raise InconsistencyError(
                    f"forms {a:0{m}b}, {b:0{m}b} recoverable but not their sum",
                    witness=(a, b, a ^ b))
    basis = []
    for S in sorted(good):
        if rank_of_ints(basis + [S]) > len(basis):
            basis.append(S)
    if len(good) != (1 << len(basis)) - 1:
        raise InconsistencyError("recoverable forms are not a linear space")
    if len(basis) != rank:
        raise InconsistencyError(
            f"recovered {len(basis)} independent forms, expected {rank}")
    return BinaryMatrix.from_masks(basis, m).reduced()


def recover_linear_forms(mac: Mac, eps: float, threshold: float | None = None) -> ExtremalReport:
    prof = rank_profile(mac)
    gap = integrality_gap(prof)
    if gap > eps:
        raise NotPolarized(f"profile is {gap:.3g} from integers (eps={eps})")
    rounded = IntRankFunction(mac.m, tuple(int(v) for v in np.rint(prof)))
    thr = default_threshold(eps) if threshold is None else threshold
    forms = form_information(mac)
    A = assemble_linear_forms(forms, mac.m, rounded.rank(), thr)
    achieved = linear_image_info(mac, A.bits)
    if achieved < A.rank() * (1 - thr):
        raise InconsistencyError(
            f"I(AX;Y)={achieved:.6f} below {A.rank()}*(1-{thr:.3g})")
    return ExtremalReport(rounded, gap, A, achieved, abs(achieved - prof[mac.full]), thr, forms)


def u24_distance(mac: Mac) -> float:
    if mac.m != 4:
        raise ValueError("U(2,4) comparison needs a 4-user MAC")
    return float(np.max(np.abs(rank_profile(mac) - np.array(U24.values))))


def verify_u24_unreachable(mac: Mac, eps: float = 0.05) -> dict:
    d = u24_distance(mac)
    if d <= eps:
        raise AssertionError(f"rank profile within {d:.3g} of U(2,4)")
    return {"distance": d, "eps": eps}
