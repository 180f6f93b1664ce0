#!/usr/bin/env python3
"""Solve truncated moment problems across their degeneracy cases.

Different parameter pairs give different solutions of the same relaxed
problem; pairs that differ by an invertible rational factor give the same
one. A completely degenerate sequence admits exactly one solution no
matter the parameter, and a function that undershoots the prescribed top
moment is caught by the verifier.
"""

import numpy as np

from stieltjesmp import matcore
from stieltjesmp.hankel import MomentSequence
from stieltjesmp.measures import (
    DiscreteMeasure,
    moments,
    stieltjes_transform,
    verify_solution,
)
from stieltjesmp.pairs import (
    MatrixPolynomial,
    RationalMatFun,
    StieltjesPair,
    equivalent,
)
from stieltjesmp.solver import SolutionRequest, case_of, solve

POINTS = (1.3 + 1.1j, -2.0 + 0.4j, 0.2 - 1.7j, -0.8 - 0.9j, 3.1 + 2.2j)


def const_pair(alpha, q, phi_mat, psi_coeffs):
    phi = RationalMatFun(MatrixPolynomial.constant(phi_mat))
    psi = RationalMatFun(MatrixPolynomial(tuple(psi_coeffs)))
    return StieltjesPair(alpha, phi, psi)


def sample_gap(f, g):
    return max(matcore.frob(f(z) - g(z)) for z in POINTS)


def main():
    rng = np.random.default_rng(9)
    q, m, alpha = 2, 2, 0.25

    nodes = tuple(sorted(alpha + rng.uniform(0.5, 5.0, size=m + 1)))
    weights = tuple((lambda c: c @ c.conj().T + 0.1 * np.eye(q))(
        rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))) for _ in nodes)
    seq = moments(DiscreteMeasure(alpha, nodes, weights), m)
    tag, rank, _ = case_of(seq)
    print(f"sequence: q={q}, m={m}, case '{tag}', top rank {rank}")

    zero, eye = np.zeros((q, q)), np.eye(q)
    free = const_pair(alpha, q, zero, [eye])
    # A decaying pair: phi = I/(t - z) with a pole to the right of alpha.
    cauchy = StieltjesPair(
        alpha,
        RationalMatFun(MatrixPolynomial.constant(eye), (alpha + 1.5, -1.0)),
        RationalMatFun(MatrixPolynomial.constant(eye)),
    )

    f0 = solve(SolutionRequest(seq, free, "leq"))
    f1 = solve(SolutionRequest(seq, cauchy, "leq"))
    print(f"two parameters, two solutions: sample gap {sample_gap(f0, f1):.3e}")
    for name, fun in (("free", f0), ("cauchy", f1)):
        rep = verify_solution(fun, seq, "leq")
        print(f"  {name:8s} verifies: ok={rep['ok']}, "
              f"prefix gap {rep['prefix_gap']:.2e}, "
              f"top margin {rep['top_margin']:+.2e}")

    # The parameter matters only through the rational span of (phi, psi):
    # an invertible right factor, or any other invertible psi paired with
    # phi = O, leaves the solution unchanged.
    factor = (3.0, 1.0)  # the scalar polynomial 3 + z
    scaled = StieltjesPair(
        alpha,
        RationalMatFun(free.phi.num.scale_poly(factor), free.phi.den),
        RationalMatFun(free.psi.num.scale_poly(factor), free.psi.den),
    )
    shifted = const_pair(alpha, q, zero, [(4.0 - alpha) * eye, eye])
    print(f"\nscaling the pair by (3 + z): equivalent={equivalent(free, scaled)}, "
          f"solution gap {sample_gap(f0, solve(SolutionRequest(seq, scaled, 'leq'))):.3e}")
    print(f"(O, (4 + z - alpha) I) also collapses onto (O, I): "
          f"equivalent={equivalent(free, shifted)}, "
          f"gap {sample_gap(f0, solve(SolutionRequest(seq, shifted, 'leq'))):.3e}")

    # Completely degenerate data: a single atom sitting at the endpoint.
    s0 = (lambda c: c @ c.conj().T + 0.2 * np.eye(q))(rng.normal(size=(q, q)))
    cd = moments(DiscreteMeasure(0.0, (0.0,), (s0,)), 1)
    tag, rank, _ = case_of(cd)
    print(f"\nendpoint atom: case '{tag}', top rank {rank}")
    g0 = solve(SolutionRequest(cd, const_pair(0.0, q, zero, [eye]), "leq"))
    g1 = solve(SolutionRequest(cd, const_pair(0.0, q, zero, [4.0 * eye, eye]), "leq"))
    unique = max(sample_gap(g0, g1),
                 max(matcore.frob(g0(z) + s0 / z) for z in POINTS))
    print(f"every parameter returns -s_0/z; worst deviation {unique:.3e}")

    # A candidate whose top moment falls short of the prescribed one.
    corner = MomentSequence(0.0, (np.diag([1.0, 0.0]), np.ones((q, q))))
    candidate = stieltjes_transform(DiscreteMeasure(0.0, (1.0,), (corner.s[0],)))
    rep = verify_solution(candidate, corner, "leq")
    print(f"\nshort candidate against the corner sequence: ok={rep['ok']}")
    print("top defect (must be psd, is not):")
    print(np.array_str(rep["top_defect"].real, precision=3, suppress_small=True))


if __name__ == "__main__":
    main()
