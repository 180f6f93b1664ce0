"""Sequence-level algorithm: reciprocal, shift, forward and inverse steps.

The forward step maps ``(s_0..s_m)`` to a length-m sequence via the
reciprocal of the shifted sequence; iterating it yields the stage trace
whose leading entries form the diagonal used by the resolvent polynomials.
The inverse step reconstructs a longer sequence from a seed matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .hankel import MomentSequence
from .matcore import DEFAULT_TOL, PreconditionError, ToleranceConfig

__all__ = [
    "reciprocal",
    "alpha_shift",
    "first_transform",
    "k_th_transform",
    "TransformTrace",
    "transform_trace",
    "inverse_transform",
    "check_inequality_preservation",
]


def reciprocal(seq, tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """Reciprocal sequence: r_0 = s_0^+, r_j = -s_0^+ sum_{l<j} s_{j-l} r_l."""
    mats = [matcore.as_cmat(x) for x in seq]
    if not mats:
        raise ValueError("reciprocal of an empty sequence")
    s0p = matcore.pinv(mats[0], tol)
    out = [s0p]
    for j in range(1, len(mats)):
        acc = sum(mats[j - l] @ out[l] for l in range(j))
        out.append(-s0p @ acc)
    return out


def alpha_shift(alpha: float, seq) -> list:
    """Entrywise -alpha*s_{j-1} + s_j with the convention s_{-1} = 0."""
    mats = [matcore.as_cmat(x) for x in seq]
    out = []
    prev = np.zeros_like(mats[0])
    for s in mats:
        out.append(-alpha * prev + s)
        prev = s
    return out


def first_transform(seq: MomentSequence, tol: ToleranceConfig = DEFAULT_TOL) -> MomentSequence:
    """One algorithm step; shortens the sequence by one.

    Entry j of the output is -s_0 r_{j+1} s_0 where r is the reciprocal of
    the shifted sequence.  Outputs are re-symmetrized (they are Hermitian
    in exact arithmetic for Hermitian input).
    """
    if seq.m < 1:
        raise PreconditionError("transform needs at least two sequence entries")
    rec = reciprocal(alpha_shift(seq.alpha, seq.s), tol)
    s0 = seq.s[0]
    mats = tuple(matcore.hermitize(-s0 @ rec[j + 1] @ s0, tol) for j in range(seq.m))
    return MomentSequence(seq.alpha, mats)


def k_th_transform(seq: MomentSequence, k: int,
                   tol: ToleranceConfig = DEFAULT_TOL) -> MomentSequence:
    """k-fold iteration of :func:`first_transform`; k = 0 is the identity."""
    if not 0 <= k <= seq.m:
        raise PreconditionError(f"stage {k} out of range for m={seq.m}")
    out = seq
    for _ in range(k):
        out = first_transform(out, tol)
    return out


@dataclass(frozen=True)
class TransformTrace:
    """All stages of the algorithm plus the leading-entry diagonal."""

    input: MomentSequence
    stages: tuple  # stage k is a tuple of m-k+1 matrices
    diagonal: tuple  # entry k is stages[k][0]

    def to_json(self) -> dict:
        from . import serialize

        return {
            "input": self.input.to_json(),
            "stages": [[serialize.matrix_to_json(x) for x in st] for st in self.stages],
            "diagonal": [serialize.matrix_to_json(x) for x in self.diagonal],
        }


def transform_trace(seq: MomentSequence, tol: ToleranceConfig = DEFAULT_TOL) -> TransformTrace:
    stages = [seq.s]
    cur = seq
    for _ in range(seq.m):
        cur = first_transform(cur, tol)
        stages.append(cur.s)
    return TransformTrace(
        input=seq,
        stages=tuple(stages),
        diagonal=tuple(st[0] for st in stages),
    )


def inverse_transform(t: MomentSequence, a,
                      tol: ToleranceConfig = DEFAULT_TOL) -> MomentSequence:
    """Reconstruction seeded with ``a``; lengthens the sequence by one.

    Uses the recursion
        r_0 = a,
        r_j = alpha r_{j-1} + a a^+ sum_{k<j} t_{j-1-k} a^+ (shift r)_k,
    which agrees with the literal nested-sum definition (the test suite
    checks them against each other).
    """
    a = matcore.hermitize(a, tol)
    ap = matcore.pinv(a, tol)
    proj = a @ ap
    alpha = t.alpha
    out = [a]
    shifted = [a]  # (shift r)_k, maintained alongside
    for j in range(1, t.m + 2):
        acc = sum(t.s[j - 1 - k] @ ap @ shifted[k] for k in range(j))
        nxt = matcore.hermitize(alpha * out[-1] + proj @ acc, tol)
        shifted.append(-alpha * out[-1] + nxt)
        out.append(nxt)
    return MomentSequence(alpha, tuple(out))


def _prefix_gap(xs, ys) -> float:
    if not xs:
        return 0.0
    return max(matcore.frob(x - y) for x, y in zip(xs, ys))


def check_inequality_preservation(s: MomentSequence, t: MomentSequence,
                                  a=None,
                                  tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Order preservation of the forward and inverse steps.

    Precondition: same alpha, same length, t_j = s_j for j < m, and
    t_m <= s_m in the semidefinite order.  The report then records
      * forward: equality of transformed entries below index m-1, the
        semidefiniteness of the top difference, and its agreement with the
        closed form P^* (s_m - t_m) P for P = s_0^+ s_0;
      * inverse (seeded with ``a``, default s_0): equality through index m
        and the top difference against P_a^* (s_m - t_m) P_a, P_a = a^+ a.
    """
    if s.alpha != t.alpha or s.m != t.m:
        raise PreconditionError("sequences must share alpha and length")
    m = s.m
    gap = _prefix_gap(s.s[:m], t.s[:m])
    if gap > tol.herm * (1.0 + matcore.frob(s.s[0])):
        raise PreconditionError(f"prefixes differ by {gap:.3e}")
    defect = matcore.hermitize(s.s[m] - t.s[m], tol)
    if not matcore.is_psd(defect, tol):
        raise PreconditionError("top entries are not ordered")

    report: dict = {"m": m, "top_defect_margin": matcore.psd_margin(defect, tol)}

    if m >= 1:
        fs = first_transform(s, tol)
        ft = first_transform(t, tol)
        report["forward_prefix_gap"] = _prefix_gap(fs.s[: m - 1], ft.s[: m - 1])
        report["forward_prefix_ok"] = report["forward_prefix_gap"] <= 1e-10 * (
            1.0 + matcore.frob(s.s[0])
        )
        diff = matcore.hermitize(fs.s[m - 1] - ft.s[m - 1], tol)
        report["forward_top_margin"] = matcore.psd_margin(diff, tol)
        report["forward_top_ok"] = matcore.is_psd(diff, tol)
        p = matcore.pinv(s.s[0], tol) @ s.s[0]
        closed = p.conj().T @ defect @ p
        report["forward_closed_form_gap"] = matcore.frob(diff - closed)
        report["forward_closed_form_ok"] = report["forward_closed_form_gap"] <= 1e-9 * (
            1.0 + matcore.frob(closed)
        )

    seed = s.s[0] if a is None else matcore.hermitize(a, tol)
    rs = inverse_transform(s, seed, tol)
    rt = inverse_transform(t, seed, tol)
    report["inverse_prefix_gap"] = _prefix_gap(rs.s[: m + 1], rt.s[: m + 1])
    report["inverse_prefix_ok"] = report["inverse_prefix_gap"] <= 1e-10 * (
        1.0 + matcore.frob(seed)
    )
    idiff = matcore.hermitize(rs.s[m + 1] - rt.s[m + 1], tol)
    report["inverse_top_margin"] = matcore.psd_margin(idiff, tol)
    report["inverse_top_ok"] = matcore.is_psd(idiff, tol)
    pa = matcore.pinv(seed, tol) @ seed
    iclosed = pa.conj().T @ defect @ pa
    report["inverse_closed_form_gap"] = matcore.frob(idiff - iclosed)
    report["inverse_closed_form_ok"] = report["inverse_closed_form_gap"] <= 1e-9 * (
        1.0 + matcore.frob(iclosed)
    )

    keys = [k for k in report if k.endswith("_ok")]
    report["ok"] = all(report[k] for k in keys)
    return report
