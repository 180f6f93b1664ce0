"""Dense complex-matrix kernel.

Hermitian handling, Moore-Penrose pseudoinverse, Loewner-order and
range/null-space predicates, and the two 2q x 2q signature matrices used by
the indefinite-metric identities.  Everything downstream threads a single
:class:`ToleranceConfig` through these predicates.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "PreconditionError",
    "SingularDenominatorError",
    "GrowthError",
    "InconsistencyError",
    "as_cmat",
    "hermitize",
    "pinv",
    "is_psd",
    "is_pd",
    "psd_margin",
    "range_contains",
    "null_contains",
    "rank_with_tol",
    "lowner_leq_chain",
    "signature_j",
    "j_form",
    "frob",
    "specnorm",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Shared numeric thresholds.

    pinv_rtol    relative singular-value cutoff for pseudoinverses
    herm         allowed relative asymmetry before symmetrization errors out
    psd          relative eigenvalue slack for semidefiniteness tests
    inclusion    relative residual for range/null-space containment tests
    det_gate     sigma_min/sigma_max gate below which denominators count
                 as singular
    decay        absolute bound for the high-imaginary-axis decay test
    extraction   relative tolerance for moment recovery from samples
    equiv        subspace-distance bound for projective pair comparison
    """

    pinv_rtol: float = 1e-12
    herm: float = 1e-9
    psd: float = 1e-9
    inclusion: float = 1e-9
    det_gate: float = 1e-10
    decay: float = 1e-3
    extraction: float = 1e-4
    equiv: float = 1e-7

    def scaled(self, factor: float) -> "ToleranceConfig":
        return replace(
            self,
            psd=self.psd * factor,
            inclusion=self.inclusion * factor,
            herm=self.herm * factor,
        )


DEFAULT_TOL = ToleranceConfig()


class PreconditionError(ValueError):
    """An operation was called outside its stated domain."""


class SingularDenominatorError(ArithmeticError):
    """A denominator failed the singular-value gate.

    Carries the evaluation point, a stage label for composed transforms,
    and the offending sigma_min/sigma_max estimate.
    """

    def __init__(self, message, *, stage="", point=None, gap=None):
        super().__init__(message)
        self.stage = stage
        self.point = point
        self.gap = gap


class GrowthError(ArithmeticError):
    """A sampled function grows too fast along the imaginary axis."""


class InconsistencyError(RuntimeError):
    """Numerical evidence contradicts a structural guarantee."""


def as_cmat(a) -> np.ndarray:
    """Coerce to a finite 2-d complex ndarray."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def frob(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def specnorm(a) -> float:
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def hermitize(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Return (A + A*)/2, rejecting gross asymmetry.

    Asymmetry beyond ``tol.herm`` relative to the matrix size is treated as
    a construction error rather than silently repaired.
    """
    m = as_cmat(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError("hermitize needs a square matrix")
    asym = frob(m - m.conj().T)
    if asym > tol.herm * (1.0 + frob(m)):
        raise PreconditionError(
            f"matrix is not Hermitian: asymmetry {asym:.3e} exceeds tolerance"
        )
    return 0.5 * (m + m.conj().T)


def pinv(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse with relative singular-value cutoff."""
    m = as_cmat(a)
    if m.size == 0:
        return m.conj().T.copy()
    return np.linalg.pinv(m, rtol=tol.pinv_rtol)


def psd_margin(a, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Smallest eigenvalue of the symmetrized matrix, relative to scale.

    Positive semidefiniteness to tolerance means margin >= -tol.psd.
    """
    m = hermitize(a, tol)
    if m.size == 0:
        return 0.0
    w = np.linalg.eigvalsh(m)
    scale = max(1.0, float(np.abs(w).max()))
    return float(w[0]) / scale


def is_psd(a, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return psd_margin(a, tol) >= -tol.psd


def is_pd(a, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return psd_margin(a, tol) > tol.psd


def range_contains(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff ran B is contained in ran A, via the A A^+ B = B residual."""
    a = as_cmat(a)
    b = as_cmat(b)
    if a.shape[0] != b.shape[0]:
        raise ValueError("row counts differ")
    resid = frob(a @ pinv(a, tol) @ b - b)
    return resid <= tol.inclusion * (1.0 + frob(b))


def null_contains(a, c, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff nul A is contained in nul C, via the C A^+ A = C residual."""
    a = as_cmat(a)
    c = as_cmat(c)
    if a.shape[1] != c.shape[1]:
        raise ValueError("column counts differ")
    resid = frob(c @ pinv(a, tol) @ a - c)
    return resid <= tol.inclusion * (1.0 + frob(c))


def rank_with_tol(a, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Numerical rank with an absolute floor, so exact zeros rank 0."""
    m = as_cmat(a)
    if m.size == 0:
        return 0
    sig = np.linalg.svd(m, compute_uv=False)
    cut = tol.psd * max(1.0, float(sig[0]))
    return int(np.sum(sig > cut))


def _null_space_equal(x, y, tol: ToleranceConfig) -> bool:
    return null_contains(x, y, tol) and null_contains(y, x, tol)


def _range_equal(x, y, tol: ToleranceConfig) -> bool:
    return range_contains(x, y, tol) and range_contains(y, x, tol)


def lowner_leq_chain(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Evaluate four equivalent forms of "0 <= B <= A" and their agreement.

    The four verdicts:
      (i)   O <= B <= A
      (ii)  O <= B^+ B A^+ B B^+ <= B^+  together with nul A <= nul B
      (iii) O <= B A^+ B <= B            together with nul A <= nul B
      (iv)  the stacked block matrix [[A, B],[B, B]] is PSD

    When (i) holds, the report also carries the two derived facts
    nul(B A^+ B) = nul(B) and ran(B A^+ B) = ran(B).
    """
    a = hermitize(a, tol)
    b = hermitize(b, tol)
    ap = pinv(a, tol)
    bp = pinv(b, tol)
    null_dom = null_contains(a, b, tol)

    cond_i = is_psd(b, tol) and is_psd(a - b, tol)

    mid = bp @ b @ ap @ b @ bp
    cond_ii = is_psd(mid, tol) and is_psd(bp - mid, tol) and null_dom

    bab = b @ ap @ b
    cond_iii = is_psd(bab, tol) and is_psd(b - bab, tol) and null_dom

    stacked = np.block([[a, b], [b, b]])
    cond_iv = is_psd(stacked, tol)

    report = {
        "cond_i": cond_i,
        "cond_ii": cond_ii,
        "cond_iii": cond_iii,
        "cond_iv": cond_iv,
        "agree": cond_i == cond_ii == cond_iii == cond_iv,
        "null_consequence": None,
        "range_consequence": None,
    }
    if cond_i:
        report["null_consequence"] = _null_space_equal(bab, b, tol)
        report["range_consequence"] = _range_equal(bab, b, tol)
    return report


def signature_j(q: int, kind: str = "imaginary") -> np.ndarray:
    """Signature matrix: [[0,-iI],[iI,0]] or the real variant [[0,-I],[-I,0]]."""
    z = np.zeros((q, q), dtype=complex)
    eye = np.eye(q, dtype=complex)
    if kind == "imaginary":
        return np.block([[z, -1j * eye], [1j * eye, z]])
    if kind == "real":
        return np.block([[z, -eye], [-eye, z]])
    raise ValueError(f"unknown signature kind {kind!r}")


def j_form(x, j) -> np.ndarray:
    """X^* (-J) X for a stacked 2q-row matrix X."""
    x = as_cmat(x)
    j = as_cmat(j)
    if x.shape[0] != j.shape[0]:
        raise ValueError(
            f"stacked matrix has {x.shape[0]} rows, signature expects {j.shape[0]}"
        )
    return x.conj().T @ (-j) @ x
