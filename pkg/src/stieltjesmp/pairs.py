"""Rational matrix functions and admissible function pairs.

A pair (phi, psi) of q x q rational functions is admissible for the
half-axis [alpha, inf) when the stacked column [phi; psi] has full rank,
the imaginary-signature form of the stack and of [(z-alpha)phi; psi] is
positive semidefinite off the real axis, and the real-signature form is
positive semidefinite left of alpha.  Pairs are considered up to right
multiplication by an invertible rational factor; the quotient phi psi^(-1)
is what enters the solution formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly

from . import matcore
from .matcore import (
    DEFAULT_TOL,
    InconsistencyError,
    PreconditionError,
    SingularDenominatorError,
    ToleranceConfig,
)
from .respoly import MatrixPolynomial, adjugate_poly, det_poly

__all__ = [
    "RationalMatFun",
    "StieltjesPair",
    "default_grid",
    "decay_ladder",
    "pair_from_function",
    "verify_pair",
    "in_class_P_of",
    "equivalent",
    "gamma_U_embed",
    "gamma_U_extract",
    "in_diamond",
]


def _trim_scalar(c, rel: float = 1e-13) -> tuple:
    c = list(np.atleast_1d(np.asarray(c, dtype=complex)))
    top = max(abs(x) for x in c)
    cut = rel * max(1.0, top)
    while len(c) > 1 and abs(c[-1]) <= cut:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class RationalMatFun:
    """Matrix polynomial numerator over a scalar polynomial denominator."""

    num: MatrixPolynomial
    den: tuple = (1.0 + 0.0j,)

    def __post_init__(self):
        den = _trim_scalar(self.den)
        if max(abs(x) for x in den) == 0.0:
            raise ValueError("denominator is identically zero")
        object.__setattr__(self, "den", den)
        # keep evaluation well scaled: unit-size leading data
        top = max(abs(x) for x in den)
        if not (0.5 <= top <= 2.0):
            object.__setattr__(self, "den", tuple(x / top for x in den))
            object.__setattr__(self, "num", self.num.scale(1.0 / top))

    @property
    def shape(self) -> tuple:
        return self.num.shape

    @property
    def q(self) -> int:
        return self.num.shape[0]

    @staticmethod
    def const(a) -> "RationalMatFun":
        return RationalMatFun(MatrixPolynomial.constant(a))

    @staticmethod
    def zero(q: int) -> "RationalMatFun":
        return RationalMatFun(MatrixPolynomial.constant(np.zeros((q, q))))

    def __call__(self, z: complex) -> np.ndarray:
        dv = npoly.polyval(z, np.asarray(self.den))
        bound = float(npoly.polyval(abs(z), np.abs(np.asarray(self.den))))
        if abs(dv) <= 1e-12 * max(bound, 1e-300):
            raise SingularDenominatorError(
                "evaluation point is numerically a pole",
                stage="evaluation", point=z,
            )
        return self.num(z) / dv

    def __add__(self, other: "RationalMatFun") -> "RationalMatFun":
        num = self.num.scale_poly(other.den) + other.num.scale_poly(self.den)
        return RationalMatFun(num.trimmed(), npoly.polymul(self.den, other.den))

    def __sub__(self, other: "RationalMatFun") -> "RationalMatFun":
        return self + other.scale(-1.0)

    def __matmul__(self, other: "RationalMatFun") -> "RationalMatFun":
        return RationalMatFun((self.num @ other.num).trimmed(),
                              npoly.polymul(self.den, other.den))

    def scale(self, c: complex) -> "RationalMatFun":
        return RationalMatFun(self.num.scale(c), self.den)

    def lmul(self, a) -> "RationalMatFun":
        a = matcore.as_cmat(a)
        return RationalMatFun(
            MatrixPolynomial(tuple(a @ c for c in self.num.coeffs)), self.den)

    def rmul(self, a) -> "RationalMatFun":
        a = matcore.as_cmat(a)
        return RationalMatFun(
            MatrixPolynomial(tuple(c @ a for c in self.num.coeffs)), self.den)

    def is_zero(self, rel: float = 1e-12) -> bool:
        top = max(matcore.frob(c) for c in self.num.coeffs)
        return top <= rel

    def det_num(self) -> np.ndarray:
        return np.asarray(_trim_scalar(det_poly(self.num)))

    def inverse(self) -> "RationalMatFun":
        """Rational inverse via determinant and adjugate of the numerator."""
        det = self.det_num()
        if max(abs(x) for x in det) <= 1e-12:
            raise SingularDenominatorError(
                "numerator determinant vanishes identically", stage="inverse")
        adj = adjugate_poly(self.num)
        return RationalMatFun(adj.scale_poly(self.den), tuple(det)).simplify()

    def simplify(self, rel: float = 1e-10) -> "RationalMatFun":
        """Rewrite with the smallest denominator degree that fits the values.

        Cancelling a common polynomial factor by root-finding is fragile at
        multiple roots, so instead the reduced form is reconstructed from
        the coefficients: a reduced pair (N, p) represents the same function
        exactly when N * den = num * p as polynomial identities, which is a
        homogeneous linear system in the unknown coefficients with the
        scalar p shared across entries.  For ascending trial denominator
        degrees the null vector of that system is extracted, the numerator
        is re-polished by least squares against the fitted denominator, and
        the candidate is accepted only if it reproduces the function at
        control points placed near the pole scale (where a spuriously low
        degree shows up first).  If no degree passes, the function is
        returned unchanged.
        """
        num = self.num.trimmed()
        den = np.asarray(_trim_scalar(self.den), dtype=complex)
        dn = len(den) - 1
        rows, cols = num.shape
        if all(not c.any() for c in num.coeffs):
            return RationalMatFun(
                MatrixPolynomial.constant(np.zeros((rows, cols))), (1.0,))
        if dn == 0:
            return RationalMatFun(num, tuple(den))
        nd = num.degree
        num_c = np.zeros((rows, cols, nd + 1), dtype=complex)
        for t, mat in enumerate(num.coeffs):
            num_c[:, :, t] = mat
        pole_scale = 1.0 + float(np.abs(npoly.polyroots(den)).max())

        for d in range(max(0, dn - nd), dn):
            cand = self._refit(num_c, den, nd - (dn - d), d)
            if cand is None:
                continue
            if self._matches(cand, pole_scale, rel):
                return cand
        return RationalMatFun(num, tuple(den))

    @staticmethod
    def _mul_matrix(poly, width: int) -> np.ndarray:
        """Convolution matrix sending a length-``width`` coefficient vector
        to the coefficients of its product with ``poly``."""
        poly = np.asarray(poly, dtype=complex)
        out = np.zeros((len(poly) + width - 1, width), dtype=complex)
        for t in range(width):
            out[t:t + len(poly), t] = poly
        return out

    def _refit(self, num_c, den, red_nd: int, d: int):
        """Coefficient-space reconstruction with numerator degree ``red_nd``
        and denominator degree ``d``; None when no candidate exists."""
        rows, cols, _ = num_c.shape
        dn = len(den) - 1
        n_num = (red_nd + 1) * rows * cols
        blk = red_nd + dn + 1
        den_on_num = self._mul_matrix(den, red_nd + 1)
        design = np.zeros((blk * rows * cols, n_num + d + 1), dtype=complex)
        for i in range(rows):
            for j in range(cols):
                r0 = (i * cols + j) * blk
                c0 = (i * cols + j) * (red_nd + 1)
                design[r0:r0 + blk, c0:c0 + red_nd + 1] = den_on_num
                design[r0:r0 + blk, n_num:] = -self._mul_matrix(
                    num_c[i, j], d + 1)
        scale = np.linalg.norm(design, axis=0)
        scale[scale == 0.0] = 1.0
        design /= scale
        sv, vh = np.linalg.svd(design, compute_uv=True)[1:]
        if sv[-1] > 1e-6 * sv[0]:
            return None
        x = vh[-1].conj() / scale
        new_den = x[n_num:]
        if np.abs(new_den).max() <= 1e-12 * max(1.0, float(np.abs(x).max())):
            return None
        # Polish: with the denominator fixed the numerator solves the
        # well-conditioned linear system N * den = num * new_den exactly.
        rhs = np.stack([np.convolve(num_c[i, j], new_den)
                        for i in range(rows) for j in range(cols)], axis=1)
        fit = np.linalg.lstsq(den_on_num, rhs, rcond=None)[0]
        mats = [np.zeros((rows, cols), dtype=complex) for _ in range(red_nd + 1)]
        for i in range(rows):
            for j in range(cols):
                for t in range(red_nd + 1):
                    mats[t][i, j] = fit[t, i * cols + j]
        try:
            return RationalMatFun(MatrixPolynomial(tuple(mats)).trimmed(),
                                  tuple(new_den))
        except ValueError:
            return None

    def _matches(self, other: "RationalMatFun", pole_scale: float,
                 rel: float) -> bool:
        checked = 0
        for t, ang in ((0.11, 0.77), (0.43, 2.1), (1.19, -1.3), (2.3, 0.4)):
            z = pole_scale * t * np.exp(1j * ang)
            try:
                ref = self(z)
                got = other(z)
            except SingularDenominatorError:
                continue
            checked += 1
            if matcore.frob(got - ref) > max(rel, 1e-12) * (1.0 + matcore.frob(ref)):
                return False
        return checked > 0

    def to_json(self) -> dict:
        from . import serialize

        return serialize.rational_to_json(self)

    @classmethod
    def from_json(cls, obj: dict) -> "RationalMatFun":
        from . import serialize

        return serialize.rational_from_json(obj)


def default_grid(alpha: float) -> tuple:
    """Evaluation points used by the pair checks: three points left of
    alpha on the real axis plus rings of off-axis points around alpha."""
    pts = [alpha - 1.0, alpha - 2.0, alpha - 5.0]
    for r in (0.5, 2.0, 10.0):
        for th in (np.pi / 3, np.pi / 2, 2 * np.pi / 3, -np.pi / 2):
            pts.append(alpha + r * np.exp(1j * th))
    return tuple(pts)


def decay_ladder() -> tuple:
    return (1e2, 1e3, 1e4, 1e5)


@dataclass(frozen=True)
class StieltjesPair:
    """A candidate pair (phi, psi) attached to the half-axis [alpha, inf)."""

    alpha: float
    phi: RationalMatFun
    psi: RationalMatFun

    def __post_init__(self):
        if self.phi.shape != self.psi.shape or self.phi.shape[0] != self.phi.shape[1]:
            raise ValueError("pair components must be square and equally sized")

    @property
    def q(self) -> int:
        return self.phi.q

    def stack(self, z: complex) -> np.ndarray:
        return np.vstack([self.phi(z), self.psi(z)])

    def quotient_at(self, z: complex, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
        """phi(z) psi(z)^(-1) with a conditioning gate."""
        ps = self.psi(z)
        sv = np.linalg.svd(ps, compute_uv=False)
        if sv[0] == 0.0 or sv[-1] < tol.det_gate * sv[0]:
            raise SingularDenominatorError(
                "psi is numerically singular", stage="quotient", point=z)
        return np.linalg.solve(ps.T, self.phi(z).T).T

    def to_json(self) -> dict:
        from . import serialize

        return serialize.pair_to_json(self)

    @classmethod
    def from_json(cls, obj: dict) -> "StieltjesPair":
        from . import serialize

        return serialize.pair_from_json(obj)


def verify_pair(pair: StieltjesPair, tol: ToleranceConfig = DEFAULT_TOL,
                grid=None) -> dict:
    """Check the admissibility conditions on a finite grid.

    Returns margins (least eigenvalue ratios, worst over the grid) and
    booleans per condition plus an overall verdict.  Grid points that land
    on poles are skipped and counted; admissibility only constrains points
    off the exceptional set.
    """
    grid = default_grid(pair.alpha) if grid is None else tuple(grid)
    jt = matcore.signature_j(pair.q, "imaginary")
    jr = matcore.signature_j(pair.q, "real")

    rank_gaps = []
    kd1 = []
    kd2 = []
    real_margins = []
    skipped = 0
    for pt in grid:
        z = complex(pt)
        try:
            ph = pair.phi(z)
            ps = pair.psi(z)
        except SingularDenominatorError:
            skipped += 1
            continue
        stk = np.vstack([ph, ps])
        sv = np.linalg.svd(stk, compute_uv=False)
        rank_gaps.append(float(sv[-1] / max(sv[0], 1e-300)))
        if z.imag != 0.0:
            form1 = matcore.hermitize(
                matcore.j_form(stk, jt) / (2.0 * z.imag), tol)
            kd1.append(matcore.psd_margin(form1, tol))
            stk2 = np.vstack([(z - pair.alpha) * ph, ps])
            form2 = matcore.hermitize(
                matcore.j_form(stk2, jt) / (2.0 * z.imag), tol)
            kd2.append(matcore.psd_margin(form2, tol))
        elif z.real < pair.alpha:
            formr = matcore.hermitize(
                matcore.j_form(stk, jr), tol)
            real_margins.append(matcore.psd_margin(formr, tol))
    if skipped == len(grid):
        raise InconsistencyError("every grid point sits on a pole of the pair")

    det = pair.psi.det_num()
    proper = bool(max(abs(x) for x in det) > 1e-12)

    rank_ok = bool(min(rank_gaps) > 1e-10) if rank_gaps else False
    kd1_m = float(min(kd1)) if kd1 else 0.0
    kd2_m = float(min(kd2)) if kd2 else 0.0
    real_m = float(min(real_margins)) if real_margins else 0.0
    report = {
        "rank_ok": rank_ok,
        "min_rank_gap": float(min(rank_gaps)) if rank_gaps else 0.0,
        "kd1_margin": kd1_m,
        "kd1_ok": bool(kd1_m >= -tol.psd),
        "kd2_margin": kd2_m,
        "kd2_ok": bool(kd2_m >= -tol.psd),
        "real_axis_margin": real_m,
        "real_axis_ok": bool(real_m >= -tol.psd),
        "proper": proper,
        "skipped_points": skipped,
    }
    report["ok"] = bool(report["rank_ok"] and report["kd1_ok"]
                        and report["kd2_ok"] and report["real_axis_ok"])
    return report


def pair_from_function(fun: RationalMatFun, alpha: float,
                       tol: ToleranceConfig = DEFAULT_TOL,
                       grid=None) -> StieltjesPair:
    """Wrap a single rational function as the pair (fun, I) and validate."""
    pair = StieltjesPair(alpha, fun, RationalMatFun.const(np.eye(fun.q)))
    report = verify_pair(pair, tol, grid)
    if not report["ok"]:
        failed = [k for k in ("rank_ok", "kd1_ok", "kd2_ok", "real_axis_ok")
                  if not report[k]]
        raise PreconditionError(
            "function does not define an admissible pair; failed: "
            + ", ".join(failed) + f" (report {report})")
    return pair


def in_class_P_of(pair: StieltjesPair, a,
                  tol: ToleranceConfig = DEFAULT_TOL, grid=None) -> bool:
    """Range condition: ran phi(z) inside ran a at every grid point."""
    a = matcore.as_cmat(a)
    grid = default_grid(pair.alpha) if grid is None else tuple(grid)
    for z in grid:
        try:
            ph = pair.phi(z)
        except SingularDenominatorError:
            continue
        if not matcore.range_contains(a, ph, tol):
            return False
    return True


def equivalent(p1: StieltjesPair, p2: StieltjesPair,
               tol: ToleranceConfig = DEFAULT_TOL, grid=None) -> bool:
    """Same pair up to an invertible rational right factor.

    Tested as equality of the column spans of the stacked pairs at every
    grid point (orthogonal projectors compared in spectral norm).
    """
    if p1.q != p2.q or p1.alpha != p2.alpha:
        return False
    grid = default_grid(p1.alpha) if grid is None else tuple(grid)
    q = p1.q
    for z in grid:
        try:
            s1 = p1.stack(z)
            s2 = p2.stack(z)
        except SingularDenominatorError:
            continue
        u1, sv1, _ = np.linalg.svd(s1, full_matrices=False)
        u2, sv2, _ = np.linalg.svd(s2, full_matrices=False)
        if sv1[0] < 1e-250 or sv2[0] < 1e-250:
            continue
        if sv1[-1] < 1e-10 * sv1[0] or sv2[-1] < 1e-10 * sv2[0]:
            continue
        pr1 = u1[:, :q] @ u1[:, :q].conj().T
        pr2 = u2[:, :q] @ u2[:, :q].conj().T
        if matcore.specnorm(pr1 - pr2) > tol.equiv:
            return False
    return True


def gamma_U_embed(phi: RationalMatFun, psi: RationalMatFun, u,
                  alpha: float, tol: ToleranceConfig = DEFAULT_TOL) -> StieltjesPair:
    """Lift an r x r pair to a q x q pair supported on the span of ``u``.

    ``u`` is a q x r matrix with orthonormal columns.  The lifted pair is
    (u phi u^*, u psi u^* + (I - u u^*)); the complementary identity block
    keeps the second component invertible.
    """
    u = matcore.as_cmat(u)
    q, r = u.shape
    if phi.q != r or psi.q != r:
        raise PreconditionError("pair size must match the number of columns of u")
    gram = u.conj().T @ u
    if matcore.frob(gram - np.eye(r)) > 1e-10 * max(1.0, q):
        raise PreconditionError("columns of u must be orthonormal")
    comp = np.eye(q, dtype=complex) - u @ u.conj().T

    phi_up = RationalMatFun(
        MatrixPolynomial(tuple(u @ c @ u.conj().T for c in phi.num.coeffs)),
        phi.den)
    psi_coeffs = [u @ c @ u.conj().T for c in psi.num.coeffs]
    for k, d in enumerate(np.asarray(psi.den)):
        if k >= len(psi_coeffs):
            psi_coeffs.append(np.zeros((q, q), dtype=complex))
        psi_coeffs[k] = psi_coeffs[k] + d * comp
    psi_up = RationalMatFun(MatrixPolynomial(tuple(psi_coeffs)).trimmed(),
                            psi.den)
    return StieltjesPair(alpha, phi_up, psi_up)


def gamma_U_extract(f: RationalMatFun, g: RationalMatFun, u,
                    tol: ToleranceConfig = DEFAULT_TOL):
    """Invert the lift: compress a q x q pair (f, g) back to r x r.

    Uses the normalizing factor b = g - i f, which is invertible as a
    rational function for admissible range-restricted pairs; returns
    (u^* f b^(-1) u, u^* g b^(-1) u) simplified.
    """
    u = matcore.as_cmat(u)
    b = g - f.scale(1j)
    det = b.det_num()
    if max(abs(x) for x in det) <= 1e-12:
        raise InconsistencyError(
            "normalizing factor of the compression is identically singular")
    binv = b.inverse()
    phi = f @ binv
    psi = g @ binv
    phi_r = phi.lmul(u.conj().T).rmul(u).simplify()
    psi_r = psi.lmul(u.conj().T).rmul(u).simplify()
    return phi_r, psi_r


def in_diamond(pair: StieltjesPair, tol: ToleranceConfig = DEFAULT_TOL,
               ladder=None) -> dict:
    """Check that the quotient phi psi^(-1) decays along the imaginary axis.

    The quotient must shrink up the ladder (no plateau above rounding) and
    end below the decay tolerance.  Pairs whose second component is
    singular at a ladder point fail with SingularDenominatorError.
    """
    ladder = decay_ladder() if ladder is None else tuple(ladder)
    norms = []
    for y in ladder:
        norms.append(float(matcore.specnorm(pair.quotient_at(1j * y, tol))))
    decreasing = all(
        b <= max(0.95 * a, 1e-14) for a, b in zip(norms, norms[1:]))
    final_small = norms[-1] <= tol.decay
    return {
        "norms": norms,
        "decreasing": bool(decreasing),
        "final_small": bool(final_small),
        "ok": bool(decreasing and final_small),
    }
