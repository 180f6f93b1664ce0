"""Linear-fractional transforms with 2q x 2q block generators.

A generator E = [[a, b], [c, d]] acts on a single matrix x as
(ax + b)(cx + d)^(-1) and on a column pair (x, y) as
(ax + by)(cx + dy)^(-1).  The lower block row [c, d] must have full row
rank, otherwise no input can ever make the denominator invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .matcore import (
    DEFAULT_TOL,
    PreconditionError,
    SingularDenominatorError,
    ToleranceConfig,
)

__all__ = ["BlockGenerator", "lft_matrix", "lft_pair", "compose"]


@dataclass(frozen=True)
class BlockGenerator:
    """Four q x q blocks of a linear-fractional generator."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        blocks = {}
        q = None
        for name in ("a", "b", "c", "d"):
            m = matcore.as_cmat(getattr(self, name))
            if q is None:
                q = m.shape[0]
            if m.shape != (q, q):
                raise ValueError("generator blocks must be square, equal size")
            blocks[name] = m
        for name, m in blocks.items():
            object.__setattr__(self, name, m)
        lower = np.hstack([blocks["c"], blocks["d"]])
        if np.linalg.matrix_rank(lower, tol=1e-12 * max(1.0, matcore.specnorm(lower))) < q:
            raise PreconditionError("lower block row of generator is rank deficient")

    @property
    def q(self) -> int:
        return self.a.shape[0]

    def as_matrix(self) -> np.ndarray:
        return np.block([[self.a, self.b], [self.c, self.d]])

    @classmethod
    def from_matrix(cls, e) -> "BlockGenerator":
        e = matcore.as_cmat(e)
        if e.shape[0] != e.shape[1] or e.shape[0] % 2:
            raise ValueError("generator matrix must be square of even size")
        q = e.shape[0] // 2
        return cls(e[:q, :q], e[:q, q:], e[q:, :q], e[q:, q:])

    def __matmul__(self, other: "BlockGenerator") -> "BlockGenerator":
        return BlockGenerator.from_matrix(self.as_matrix() @ other.as_matrix())


def _solve_right(num: np.ndarray, den: np.ndarray,
                 tol: ToleranceConfig, stage: str) -> np.ndarray:
    """num @ den^(-1) with a conditioning gate on the denominator."""
    sv = np.linalg.svd(den, compute_uv=False)
    top = sv[0] if sv.size else 0.0
    if top == 0.0 or sv[-1] < tol.det_gate * top:
        gap = float(sv[-1] / top) if top else 0.0
        raise SingularDenominatorError(
            "linear-fractional denominator is numerically singular",
            stage=stage, gap=gap,
        )
    return np.linalg.solve(den.T, num.T).T


def lft_matrix(e: BlockGenerator, x, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """(a x + b)(c x + d)^(-1)."""
    x = matcore.as_cmat(x)
    return _solve_right(e.a @ x + e.b, e.c @ x + e.d, tol, "matrix-input")


def lft_pair(e: BlockGenerator, x, y, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """(a x + b y)(c x + d y)^(-1)."""
    x = matcore.as_cmat(x)
    y = matcore.as_cmat(y)
    return _solve_right(e.a @ x + e.b @ y, e.c @ x + e.d @ y, tol, "pair-input")


def compose(e2: BlockGenerator, e1: BlockGenerator, x, y=None,
            tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Apply e1 then e2 three equivalent ways and report agreement.

    * chained: feed the first transform's value into the second;
    * product: one transform with the matrix product generator e2 @ e1;
    * pushed: track the numerator/denominator column pair through e1 and
      only invert at the very end.

    Raises SingularDenominatorError (tagged with the failing stage) when a
    denominator degenerates; both orders of failure are possible and the
    caller sees which stage died first.
    """
    x = matcore.as_cmat(x)
    y = np.eye(e1.q, dtype=complex) if y is None else matcore.as_cmat(y)

    u = e1.a @ x + e1.b @ y
    v = e1.c @ x + e1.d @ y

    mid = _solve_right(u, v, tol, "inner")
    chained = lft_matrix(e2, mid, tol)

    product = lft_pair(e2 @ e1, x, y, tol)

    pushed = _solve_right(e2.a @ u + e2.b @ v, e2.c @ u + e2.d @ v, tol, "outer")

    scale = 1.0 + matcore.frob(chained)
    return {
        "value": chained,
        "product_gap": matcore.frob(chained - product) / scale,
        "pushed_gap": matcore.frob(chained - pushed) / scale,
    }
