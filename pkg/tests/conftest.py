"""Shared builders for randomized fixtures.

Everything is driven by an explicit ``numpy.random.Generator`` so each
test controls its own seed; nothing here touches global state.
"""

import numpy as np

from stieltjesmp.hankel import MomentSequence
from stieltjesmp.measures import DiscreteMeasure, moments
from stieltjesmp.pairs import RationalMatFun, StieltjesPair
from stieltjesmp.respoly import MatrixPolynomial


def random_psd(rng, q, rank=None, scale=1.0):
    """Random PSD matrix; ``rank`` limits the number of nonzero directions."""
    r = q if rank is None else rank
    if r == 0:
        return np.zeros((q, q), dtype=complex)
    b = rng.normal(size=(q, r)) + 1j * rng.normal(size=(q, r))
    return scale * (b @ b.conj().T)


def random_hermitian(rng, q, scale=1.0):
    b = rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))
    return scale * (b + b.conj().T) / 2


def random_measure(rng, q, atoms, alpha=0.0, spread=6.0, ranks=None,
                   offset=0.3):
    """Discrete measure with ``atoms`` nodes in (alpha+offset, alpha+spread)."""
    nodes = np.sort(alpha + rng.uniform(offset, spread, size=atoms))
    if ranks is None:
        ranks = [None] * atoms
    weights = tuple(random_psd(rng, q, rank=r) + (0.05 * np.eye(q) if r is None else 0)
                    for r in ranks)
    return DiscreteMeasure(float(alpha), tuple(float(x) for x in nodes), weights)


def measure_seq(rng, q, m, atoms=None, alpha=0.0, ranks=None):
    """A measure together with its first m+1 moments."""
    mu = random_measure(rng, q, atoms if atoms is not None else m + 1,
                        alpha=alpha, ranks=ranks)
    return mu, moments(mu, m)


def nondegenerate_seq(rng, q, m, alpha=0.0):
    """m+1 atoms with PD weights: top diagonal entry has full rank."""
    return measure_seq(rng, q, m, atoms=m + 1, alpha=alpha)


def completely_degenerate_seq(rng, q, m, alpha=0.0):
    """Top diagonal entry vanishes: one atom for m >= 2, atom at alpha for m=1."""
    if m >= 2:
        mu = random_measure(rng, q, 1, alpha=alpha)
    elif m == 1:
        w = random_psd(rng, q) + 0.05 * np.eye(q)
        mu = DiscreteMeasure(alpha, (alpha,), (w,))
    else:
        mu = DiscreteMeasure(alpha, (), ())
    return mu, moments(mu, m)


def partially_degenerate_seq(rng, q, r, alpha=0.0):
    """m=1 fixture whose top diagonal entry has rank exactly r (0 < r < q)."""
    w1 = random_psd(rng, q) + 0.05 * np.eye(q)
    w2 = random_psd(rng, q, rank=r)
    x2 = alpha + rng.uniform(0.5, 4.0)
    mu = DiscreteMeasure(alpha, (alpha, float(x2)), (w1, w2))
    return mu, moments(mu, 1)


def identity_pair(alpha, q):
    """(O, I): always admissible, decaying, range condition trivial."""
    return StieltjesPair(alpha, RationalMatFun.zero(q),
                         RationalMatFun.const(np.eye(q)))


def const_psi_pair(alpha, q, shift=4.0):
    """(O, (shift + (z - alpha)) I): equivalent to (O, I)."""
    eye = np.eye(q, dtype=complex)
    psi = RationalMatFun(MatrixPolynomial(((shift - alpha) * eye, eye)), (1.0,))
    return StieltjesPair(alpha, RationalMatFun.zero(q), psi)


def cauchy_pair(alpha, q, t=None, c=None):
    """(c/(t - z) I-ish, I) with t > alpha: admissible and decaying."""
    t = alpha + 1.0 if t is None else t
    cmat = np.eye(q, dtype=complex) if c is None else np.asarray(c, dtype=complex)
    phi = RationalMatFun(MatrixPolynomial.constant(cmat), (t, -1.0))
    return StieltjesPair(alpha, phi, RationalMatFun.const(np.eye(q)))


def const_pair(alpha, q, c=1.0):
    """(c I, I) with c >= 0: admissible but NOT decaying."""
    return StieltjesPair(alpha, RationalMatFun.const(c * np.eye(q)),
                         RationalMatFun.const(np.eye(q)))


def sample_points(rng, alpha, n, radius=3.0):
    """Random points off [alpha, inf): upper/lower half-plane mix."""
    zs = []
    for _ in range(n):
        re = alpha + rng.uniform(-radius, radius)
        im = rng.uniform(0.2, radius) * rng.choice([-1.0, 1.0])
        zs.append(complex(re, im))
    return zs
