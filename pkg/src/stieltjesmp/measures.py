"""Discrete matrix measures on a half-axis [alpha, inf).

A measure here is a finite sum of point masses with positive semidefinite
matrix weights.  It supplies exact moments, an exactly rational
half-axis transform sum_k (x_k - z)^(-1) w_k, and the reverse direction:
reading moments back off a rational function from its decay along the
imaginary axis, which is how candidate solutions get verified.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly

from . import matcore
from .hankel import MomentSequence, classify
from .matcore import (
    DEFAULT_TOL,
    GrowthError,
    PreconditionError,
    ToleranceConfig,
)
from .pairs import RationalMatFun
from .respoly import MatrixPolynomial

__all__ = [
    "DiscreteMeasure",
    "default_ladder",
    "moments",
    "stieltjes_transform",
    "extract_moments",
    "verify_solution",
    "finite_cauchy_schwarz_check",
]


def default_ladder() -> tuple:
    return (1e3, 3e3, 1e4, 3e4, 1e5)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Point masses x_k >= alpha with PSD matrix weights w_k."""

    alpha: float
    nodes: tuple
    weights: tuple

    def __post_init__(self):
        nodes = tuple(float(x) for x in self.nodes)
        weights = tuple(matcore.as_cmat(w) for w in self.weights)
        if len(nodes) != len(weights):
            raise ValueError("nodes and weights must pair up")
        tol = DEFAULT_TOL
        for x in nodes:
            if x < self.alpha - 1e-9 * max(1.0, abs(self.alpha)):
                raise PreconditionError("node below the half-axis endpoint")
        herm = []
        for w in weights:
            w = matcore.hermitize(w, tol)
            if not matcore.is_psd(w, tol):
                raise PreconditionError("weights must be positive semidefinite")
            herm.append(w)
        q = herm[0].shape[0] if herm else 0
        for w in herm:
            if w.shape != (q, q):
                raise ValueError("weights must share one size")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", tuple(herm))

    @property
    def q(self) -> int:
        return self.weights[0].shape[0] if self.weights else 0

    def total(self) -> np.ndarray:
        if not self.weights:
            return np.zeros((0, 0), dtype=complex)
        return sum(self.weights)

    def to_json(self) -> dict:
        from . import serialize

        return serialize.measure_to_json(self.alpha, self.nodes, self.weights)

    @classmethod
    def from_json(cls, obj: dict) -> "DiscreteMeasure":
        from . import serialize

        alpha, nodes, weights = serialize.measure_from_json(obj)
        return cls(alpha, tuple(nodes), tuple(weights))


def moments(mu: DiscreteMeasure, m: int) -> MomentSequence:
    """Power moments s_j = sum_k x_k^j w_k for j = 0..m."""
    if m < 0:
        raise PreconditionError("moment order must be nonnegative")
    q = mu.q
    mats = []
    for j in range(m + 1):
        s = np.zeros((q, q), dtype=complex)
        for x, w in zip(mu.nodes, mu.weights):
            s = s + (x ** j) * w
        mats.append(s)
    return MomentSequence(mu.alpha, tuple(mats))


def stieltjes_transform(mu: DiscreteMeasure) -> RationalMatFun:
    """The rational function sum_k (x_k - z)^(-1) w_k.

    Denominator prod_k (x_k - z); poles exactly at the nodes (up to
    coincident-node merging, which simplify() removes).
    """
    q = mu.q
    k = len(mu.nodes)
    if k == 0:
        return RationalMatFun(MatrixPolynomial.constant(np.zeros((q, q))))
    sign = (-1.0) ** k
    den = sign * npoly.polyfromroots(mu.nodes)
    num = MatrixPolynomial.constant(np.zeros((q, q)))
    for i, w in enumerate(mu.weights):
        others = [x for j, x in enumerate(mu.nodes) if j != i]
        cof = ((-1.0) ** len(others)) * npoly.polyfromroots(others)
        num = num + MatrixPolynomial.constant(w).scale_poly(cof)
    return RationalMatFun(num.trimmed(), tuple(den)).simplify()


def _fit_grid(fun: RationalMatFun, nterms: int, anchors) -> np.ndarray:
    roots = npoly.polyroots(np.asarray(fun.den)) if len(fun.den) > 1 else np.array([])
    pole_scale = float(np.abs(roots).max()) if roots.size else 0.0
    y_lo = max(10.0, 8.0 * (1.0 + pole_scale), min(anchors) / 100.0)
    y_hi = max(max(anchors), 1e3 * y_lo)
    n = max(8 * nterms, 48)
    return np.geomspace(y_lo, y_hi, n)


def extract_moments(fun: RationalMatFun, alpha: float, m: int, ladder=None,
                    tol: ToleranceConfig = DEFAULT_TOL):
    """Recover (s_0..s_m, residual) from the imaginary-axis decay of ``fun``.

    The expansion fun(iy) ~ -sum_j s_j (iy)^(-(j+1)) is fitted entrywise by
    weighted least squares over a log-spaced grid, with guard terms beyond
    index m absorbing the truncation tail.  A function that does not scale
    like a half-axis transform (the sup of y*norm over the ladder is far
    from its inf) raises GrowthError.
    """
    anchors = default_ladder() if ladder is None else tuple(ladder)
    if m < 0:
        raise PreconditionError("moment order must be nonnegative")
    q = fun.q
    growth = [float(y * matcore.specnorm(fun(1j * y))) for y in anchors]
    top = max(growth)
    if top <= 1e-12:
        zero = np.zeros((q, q))
        return MomentSequence(alpha, tuple(zero for _ in range(m + 1))), 0.0
    if top / max(min(growth), 1e-300) > 3.0:
        raise GrowthError(
            "function does not decay like a half-axis transform "
            f"(y*norm spans {min(growth):.3e} .. {top:.3e})")

    nterms = m + 5
    ys = _fit_grid(fun, nterms, anchors)
    powers = -(np.arange(nterms) + 1)
    design = (1j * ys[:, None]) ** powers[None, :]
    # weight rows by y so every row carries moment-sized information
    design_w = design * ys[:, None]
    col = np.linalg.norm(design_w, axis=0)
    design_s = design_w / col[None, :]

    vals = np.stack([fun(1j * y) for y in ys])
    rhs = vals.reshape(len(ys), q * q) * ys[:, None]
    coef_s, *_ = np.linalg.lstsq(design_s, rhs, rcond=None)
    coef = coef_s / col[:, None]

    fit = design_w @ coef
    err = np.abs(rhs - fit).max(axis=1)
    mats = []
    for j in range(m + 1):
        sj = -coef[j].reshape(q, q)
        mats.append(0.5 * (sj + sj.conj().T))
    scale = 1.0 + matcore.frob(mats[0])
    residual = float(err.max() / scale)
    return MomentSequence(alpha, tuple(mats)), residual


def verify_solution(fun: RationalMatFun, seq: MomentSequence, mode: str = "leq",
                    tol: ToleranceConfig = DEFAULT_TOL, ladder=None) -> dict:
    """Compare the moments read off ``fun`` with a prescribed sequence.

    Both modes require the first m moments to match relatively to the
    extraction tolerance; the final moment must match too (eq mode) or sit
    below the prescribed one up to tolerance (leq mode).
    """
    if mode not in ("leq", "eq"):
        raise PreconditionError("mode must be 'leq' or 'eq'")
    if not classify(seq, tol).stieltjes_psd:
        raise PreconditionError("sequence is not solvable (outside the solvability cone)")
    extracted, residual = extract_moments(fun, seq.alpha, seq.m, ladder, tol)

    prefix_gaps = [
        matcore.frob(a - b) / (1.0 + matcore.frob(b))
        for a, b in zip(extracted.s[:-1], seq.s[:-1])
    ]
    prefix_gap = float(max(prefix_gaps)) if prefix_gaps else 0.0
    prefix_ok = prefix_gap <= tol.extraction

    defect = matcore.hermitize(seq.s[-1] - extracted.s[-1], tol)
    if mode == "leq":
        top_margin = matcore.psd_margin(defect, tol)
        top_ok = bool(top_margin >= -tol.extraction)
    else:
        top_margin = float(-matcore.frob(defect) / (1.0 + matcore.frob(seq.s[-1])))
        top_ok = bool(-top_margin <= tol.extraction)
    report = {
        "mode": mode,
        "extracted": extracted,
        "residual": residual,
        "prefix_gap": prefix_gap,
        "prefix_ok": bool(prefix_ok),
        "top_defect": defect,
        "top_margin": float(top_margin),
        "top_ok": top_ok,
        "ok": bool(prefix_ok and top_ok),
    }
    return report


def _integrate(mu: DiscreteMeasure, fvals, gvals) -> np.ndarray:
    q = mu.q
    out = np.zeros((q, q), dtype=complex)
    for f, g, w in zip(fvals, gvals, mu.weights):
        out = out + np.conj(f) * g * w
    return out


def finite_cauchy_schwarz_check(mu: DiscreteMeasure, f, g,
                                tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Finite-sum integration inequalities for scalar node functions f, g.

    With A = sum |f|^2 w, B = sum conj(f) g w, C = sum |g|^2 w and the
    plain sums If = sum f w, Ig = sum g w, T = sum w, the report checks:

      * adjoint symmetry of the cross term,
      * ran B inside ran A (and ran B* inside ran C),
      * nul A inside nul B* (and nul C inside nul B),
      * both sandwich inequalities B* A^+ B <= C and B A^+ B* <= C,
      * nul A inside nul If and nul If*, ran If + ran If* inside ran A,
        If* A^+ If <= T and If A^+ If* <= T,
      * nul T inside nul Ig and nul Ig*, ran Ig + ran Ig* inside ran T,
        Ig T^+ Ig* <= C and Ig* T^+ Ig <= C.
    """
    fvals = [complex(f(x)) for x in mu.nodes]
    gvals = [complex(g(x)) for x in mu.nodes]
    ones = [1.0 + 0.0j] * len(mu.nodes)

    a = _integrate(mu, fvals, fvals)
    b = _integrate(mu, fvals, gvals)
    c = _integrate(mu, gvals, gvals)
    int_f = _integrate(mu, ones, fvals)
    int_g = _integrate(mu, ones, gvals)
    total = _integrate(mu, ones, ones)

    ap = matcore.pinv(a, tol)
    tp = matcore.pinv(total, tol)

    def leq(x, y) -> bool:
        return matcore.is_psd(matcore.hermitize(y - x, tol), tol)

    b_adj = _integrate(mu, gvals, fvals)
    report = {
        "cross_adjoint": bool(
            matcore.frob(b.conj().T - b_adj) <= 1e-10 * (1.0 + matcore.frob(b))),
        "range_cross_in_ff": matcore.range_contains(a, b, tol),
        "range_cross_adj_in_gg": matcore.range_contains(c, b.conj().T, tol),
        "null_ff_in_cross_adj": matcore.null_contains(a, b.conj().T, tol),
        "null_gg_in_cross": matcore.null_contains(c, b, tol),
        "sandwich_fg": leq(b.conj().T @ ap @ b, c),
        "sandwich_fg_swapped": leq(b @ ap @ b.conj().T, c),
        "null_ff_in_mean": (matcore.null_contains(a, int_f, tol)
                            and matcore.null_contains(a, int_f.conj().T, tol)),
        "range_mean_in_ff": (matcore.range_contains(a, int_f, tol)
                             and matcore.range_contains(a, int_f.conj().T, tol)),
        "mean_sandwich": leq(int_f.conj().T @ ap @ int_f, total),
        "mean_sandwich_swapped": leq(int_f @ ap @ int_f.conj().T, total),
        "null_total_in_mean": (matcore.null_contains(total, int_g, tol)
                               and matcore.null_contains(total, int_g.conj().T, tol)),
        "range_mean_in_total": (matcore.range_contains(total, int_g, tol)
                                and matcore.range_contains(total, int_g.conj().T, tol)),
        "total_sandwich": leq(int_g @ tp @ int_g.conj().T, c),
        "total_sandwich_swapped": leq(int_g.conj().T @ tp @ int_g, c),
    }
    report["ok"] = bool(all(report.values()))
    return report
