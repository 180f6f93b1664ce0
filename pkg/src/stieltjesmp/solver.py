"""End-to-end solution of the truncated half-axis moment problem.

The pipeline: classify the sequence, run the transform algorithm to get
the diagonal, build the descent resolvent, gate the parameter pair
(admissibility, range condition against the top diagonal entry, decay for
the equality problem), then synthesize the solution

    F = (V_nw phi + V_ne psi) (V_sw phi + V_se psi)^(-1)

as one rational matrix function and certify its denominator on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore, pairs, respoly, schur
from .hankel import MomentSequence, classify
from .matcore import (
    DEFAULT_TOL,
    InconsistencyError,
    PreconditionError,
    SingularDenominatorError,
    ToleranceConfig,
)
from .pairs import RationalMatFun, StieltjesPair
from .respoly import MatrixPolynomial, adjugate_poly, det_poly

__all__ = [
    "SolutionRequest",
    "case_of",
    "schur_stieltjes_transform",
    "inverse_schur_stieltjes_transform",
    "solve",
    "solve_degenerate_embedded",
    "solve_equality_subset",
    "m0_base_case_check",
]

CASE_NONDEGENERATE = "NonDegenerate"
CASE_COMPLETELY_DEGENERATE = "CompletelyDegenerate"
CASE_PARTIALLY_DEGENERATE = "PartiallyDegenerate"


@dataclass(frozen=True)
class SolutionRequest:
    """A sequence, a parameter pair, and which problem (leq or eq) to solve."""

    seq: MomentSequence
    parameter: StieltjesPair
    mode: str = "leq"

    def __post_init__(self):
        if self.mode not in ("leq", "eq"):
            raise PreconditionError("mode must be 'leq' or 'eq'")
        if self.parameter.q != self.seq.q:
            raise PreconditionError("parameter size must match the sequence")
        if self.parameter.alpha != self.seq.alpha:
            raise PreconditionError("parameter and sequence endpoints differ")


def case_of(seq: MomentSequence, tol: ToleranceConfig = DEFAULT_TOL):
    """(case tag, rank r, top diagonal entry) for a sequence."""
    diag = schur.transform_trace(seq, tol).diagonal
    top = diag[-1]
    r = matcore.rank_with_tol(top, tol)
    if r == seq.q:
        tag = CASE_NONDEGENERATE
    elif r == 0:
        tag = CASE_COMPLETELY_DEGENERATE
    else:
        tag = CASE_PARTIALLY_DEGENERATE
    return tag, r, top


def schur_stieltjes_transform(fun: RationalMatFun, a, alpha: float,
                              tol: ToleranceConfig = DEFAULT_TOL,
                              grid=None) -> RationalMatFun:
    """One descent step: the transform with seed ``a`` applied to ``fun``.

    Computed as the linear-fractional action of the degree-1 ascent
    generator, G = [(z-a)F + A][-(z-a)A^+ F + (I - A^+A)]^(-1), which only
    matches the pointwise pseudoinverse formula under the range/null
    compatibility checked on the grid.
    """
    a = matcore.as_cmat(a)
    ap = matcore.pinv(a, tol)
    grid = pairs.default_grid(alpha) if grid is None else tuple(grid)
    for z in grid:
        try:
            fz = fun(complex(z))
        except SingularDenominatorError:
            continue
        if not matcore.range_contains(a, fz, tol):
            raise PreconditionError(
                f"range of the function at {z} escapes the range of the seed")
        if not matcore.null_contains(fz, a, tol):
            raise PreconditionError(
                f"null space of the function at {z} is not killed by the seed")
    shift = (-alpha, 1.0)
    num = fun.num.scale_poly(shift) + MatrixPolynomial.constant(a).scale_poly(fun.den)
    eye = np.eye(fun.q, dtype=complex)
    den = (MatrixPolynomial(tuple(-ap @ c for c in fun.num.coeffs)).scale_poly(shift)
           + MatrixPolynomial.constant(eye - ap @ a).scale_poly(fun.den))
    num, den = num.trimmed(), den.trimmed()
    det = np.asarray(pairs._trim_scalar(det_poly(den)))
    if max(abs(x) for x in det) <= 1e-12:
        raise PreconditionError("transform denominator vanishes identically")
    return RationalMatFun(num @ adjugate_poly(den), tuple(det)).simplify()


def inverse_schur_stieltjes_transform(fun: RationalMatFun, a, alpha: float,
                                      tol: ToleranceConfig = DEFAULT_TOL,
                                      grid=None, ladder=None) -> RationalMatFun:
    """One ascent step: F = -A [(z-alpha)(A^+ G + I)]^(-1).

    Requires a PSD seed and an input that decays along the imaginary axis
    with range inside the range of the seed.
    """
    a = matcore.hermitize(a, tol)
    if not matcore.is_psd(a, tol):
        raise PreconditionError("seed of the ascent transform must be PSD")
    ap = matcore.pinv(a, tol)
    grid = pairs.default_grid(alpha) if grid is None else tuple(grid)
    for z in grid:
        try:
            gz = fun(complex(z))
        except SingularDenominatorError:
            continue
        if not matcore.range_contains(a, gz, tol):
            raise PreconditionError(
                f"range of the function at {z} escapes the range of the seed")
    decay = pairs.in_diamond(
        StieltjesPair(alpha, fun, RationalMatFun.const(np.eye(fun.q))),
        tol, ladder)
    if not decay["ok"]:
        raise PreconditionError(
            f"function does not decay along the imaginary axis: {decay['norms']}")
    eye = np.eye(fun.q, dtype=complex)
    inner = (MatrixPolynomial(tuple(ap @ c for c in fun.num.coeffs))
             + MatrixPolynomial.constant(eye).scale_poly(fun.den))
    inner = inner.scale_poly((-alpha, 1.0)).trimmed()
    det = np.asarray(pairs._trim_scalar(det_poly(inner)))
    if max(abs(x) for x in det) <= 1e-12:
        raise PreconditionError("transform denominator vanishes identically")
    num = (MatrixPolynomial.constant(-a) @ adjugate_poly(inner)).scale_poly(fun.den)
    return RationalMatFun(num.trimmed(), tuple(det)).simplify()


def _synthesize(blocks: respoly.ResolventBlocks, phi: RationalMatFun,
                psi: RationalMatFun, alpha: float,
                tol: ToleranceConfig, grid) -> RationalMatFun:
    num = ((blocks.nw @ phi.num).scale_poly(psi.den)
           + (blocks.ne @ psi.num).scale_poly(phi.den)).trimmed()
    den = ((blocks.sw @ phi.num).scale_poly(psi.den)
           + (blocks.se @ psi.num).scale_poly(phi.den)).trimmed()
    det = np.asarray(pairs._trim_scalar(det_poly(den)))
    top = max(abs(x) for x in det)
    den_scale = max(matcore.frob(c) for c in den.coeffs)
    if top <= 1e-12 * max(1.0, den_scale ** den.size):
        raise InconsistencyError(
            "solution denominator vanishes identically; the parameter "
            "should not admit this")
    for z in grid:
        dz = den(complex(z))
        sv = np.linalg.svd(dz, compute_uv=False)
        if sv[0] == 0.0 or sv[-1] < tol.det_gate * sv[0]:
            raise InconsistencyError(
                f"solution denominator is numerically singular at {z}")
    return RationalMatFun(num @ adjugate_poly(den), tuple(det)).simplify()


def solve(req: SolutionRequest, tol: ToleranceConfig = DEFAULT_TOL,
          grid=None) -> RationalMatFun:
    """All solutions of the truncated problem, one per parameter pair.

    Gates: the sequence must classify as extendable (candidate yes); the
    pair must be admissible; unless the top diagonal entry has full rank
    the pair must satisfy the range condition against it; the equality
    problem additionally requires the decaying subclass.  Equivalent
    parameters give the same function.
    """
    seq = req.seq
    grid = pairs.default_grid(seq.alpha) if grid is None else tuple(grid)
    report = classify(seq, tol)
    if report.extendable_candidate != "yes":
        raise PreconditionError(
            "sequence is not certified extendable "
            f"(candidate: {report.extendable_candidate}); "
            "the resolvent construction needs every algorithm stage in the cone")

    tag, r, top = case_of(seq, tol)
    pre = pairs.verify_pair(req.parameter, tol, grid)
    if not pre["ok"]:
        raise PreconditionError(f"parameter pair is not admissible: {pre}")
    if r < seq.q and not pairs.in_class_P_of(req.parameter, top, tol, grid):
        raise PreconditionError(
            "parameter range escapes the range of the top diagonal entry "
            f"(rank {r} case '{tag}')")
    if req.mode == "eq":
        decay = pairs.in_diamond(req.parameter, tol)
        if not decay["ok"]:
            raise PreconditionError(
                "equality problem needs a decaying parameter; quotient norms "
                f"{decay['norms']}")

    blocks, _ = respoly.compose_resolvent(seq, tol)
    return _synthesize(blocks, req.parameter.phi, req.parameter.psi,
                       seq.alpha, tol, grid)


def _range_basis(a, r: int, tol: ToleranceConfig) -> np.ndarray:
    vals, vecs = np.linalg.eigh(a)
    order = np.argsort(vals)[::-1]
    cut = tol.psd * max(1.0, float(abs(vals).max()))
    keep = [i for i in order if vals[i] > cut]
    if len(keep) != r:
        raise InconsistencyError(
            f"rank of the top diagonal entry changed under the eigensplit "
            f"({len(keep)} vs {r})")
    return vecs[:, keep]


def solve_degenerate_embedded(seq: MomentSequence, pair: StieltjesPair,
                              u=None, w=None, mode: str = "leq",
                              tol: ToleranceConfig = DEFAULT_TOL,
                              grid=None) -> RationalMatFun:
    """Solve with a low-rank r x r parameter lifted into the full size.

    ``u`` (q x r, orthonormal columns spanning the range of the top
    diagonal entry) defaults to its eigenbasis.  If a full orthonormal
    ``w`` = [u, complement] is supplied, the lift uses the conjugated
    block-diagonal form, which agrees with the u-form.
    """
    tag, r, top = case_of(seq, tol)
    if pair.q > seq.q or pair.q != r:
        raise PreconditionError(
            f"parameter size {pair.q} must equal the degeneracy rank {r}")
    if pair.alpha != seq.alpha:
        raise PreconditionError("parameter and sequence endpoints differ")
    if w is not None:
        w = matcore.as_cmat(w)
        if w.shape != (seq.q, seq.q) or \
                matcore.frob(w.conj().T @ w - np.eye(seq.q)) > 1e-9 * seq.q:
            raise PreconditionError("w must be unitary of the full size")
        u_eff = w[:, :r]
    elif u is not None:
        u_eff = matcore.as_cmat(u)
    else:
        u_eff = _range_basis(top, r, tol)
    if not matcore.range_contains(top, u_eff, tol):
        raise PreconditionError(
            "columns of u must span the range of the top diagonal entry")
    lifted = pairs.gamma_U_embed(pair.phi, pair.psi, u_eff, seq.alpha, tol)
    return solve(SolutionRequest(seq, lifted, mode), tol, grid)


def solve_equality_subset(seq: MomentSequence, f: RationalMatFun,
                          tol: ToleranceConfig = DEFAULT_TOL,
                          grid=None) -> RationalMatFun:
    """Parametrize the equality problem by a decaying r x r function.

    r is the rank of the top diagonal entry; the completely degenerate
    case has no free parameter and is redirected to the unique solution.
    """
    tag, r, top = case_of(seq, tol)
    if r == 0:
        raise PreconditionError(
            "completely degenerate sequence: the problem has a unique "
            "solution; call solve with the parameter (O, I)")
    if f.q != r:
        raise PreconditionError(f"parameter must be {r} x {r}")
    small = StieltjesPair(seq.alpha, f, RationalMatFun.const(np.eye(r)))
    decay = pairs.in_diamond(small, tol)
    if not decay["ok"]:
        raise PreconditionError(
            f"parameter does not decay along the imaginary axis: {decay['norms']}")
    u = _range_basis(top, r, tol)
    lifted = pairs.gamma_U_embed(small.phi, small.psi, u, seq.alpha, tol)
    return solve(SolutionRequest(seq, lifted, "eq"), tol, grid)


def m0_base_case_check(fun: RationalMatFun, s0, alpha: float = 0.0,
                       tol: ToleranceConfig = DEFAULT_TOL,
                       grid=None) -> dict:
    """Length-one roundtrip: solution -> pair -> solution.

    Builds the pair (phi, psi) = ((z-alpha)F + s_0,
    -(z-alpha)s_0^+ F + (I - s_0^+ s_0)), checks admissibility and the
    range condition against s_0, reconstructs F from the pair through the
    degree-1 descent generator, and reports the worst grid mismatch.
    """
    s0 = matcore.hermitize(s0, tol)
    s0p = matcore.pinv(s0, tol)
    q = fun.q
    grid = pairs.default_grid(alpha) if grid is None else tuple(grid)

    zshift = RationalMatFun(fun.num.scale_poly((-alpha, 1.0)), fun.den)
    phi = zshift + RationalMatFun.const(s0)
    psi = zshift.lmul(-s0p) + RationalMatFun.const(np.eye(q) - s0p @ s0)
    pair = StieltjesPair(alpha, phi, psi)

    rep = pairs.verify_pair(pair, tol, grid)
    in_range = pairs.in_class_P_of(pair, s0, tol, grid)

    inner = phi.lmul(s0p) + psi
    inner = RationalMatFun(inner.num.scale_poly((-alpha, 1.0)), inner.den)
    recon = (psi.lmul(-s0) @ inner.inverse()).simplify()

    gaps = []
    for z in grid:
        try:
            gaps.append(matcore.frob(fun(complex(z)) - recon(complex(z)))
                        / (1.0 + matcore.frob(fun(complex(z)))))
        except SingularDenominatorError:
            continue
    gap = float(max(gaps)) if gaps else float("inf")
    return {
        "pair_ok": bool(rep["ok"]),
        "pair_report": rep,
        "in_range_class": bool(in_range),
        "reconstruction_gap": gap,
        "pair": pair,
        "reconstructed": recon,
        "ok": bool(rep["ok"] and in_range and gap <= 1e-9),
    }
