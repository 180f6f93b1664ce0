"""Independent reference implementations used to pin expected test values.

Everything here is written in the most literal way available -- explicit
loops, nested sums, dense block assembly -- and imports nothing from the
package under test.  Tests compare the optimized library code against these
second opinions, and several hand-derived constants below are frozen into
the test modules.
"""

from __future__ import annotations

import numpy as np


def oracle_pinv(a, rtol=1e-12):
    """Moore-Penrose inverse assembled rank-by-rank from the SVD."""
    a = np.asarray(a, dtype=complex)
    u, sig, vh = np.linalg.svd(a)
    cut = rtol * (sig[0] if sig.size else 0.0)
    plus = np.zeros((a.shape[1], a.shape[0]), dtype=complex)
    for k in range(sig.size):
        if sig[k] > cut:
            plus += (1.0 / sig[k]) * np.outer(vh[k].conj(), u[:, k].conj())
    return plus


def oracle_reciprocal(seq, rtol=1e-12):
    """Reciprocal sequence by the literal recursion.

    r_0 = s_0^+ and r_j = -s_0^+ * sum_{l=0}^{j-1} s_{j-l} r_l.
    """
    seq = [np.asarray(s, dtype=complex) for s in seq]
    s0p = oracle_pinv(seq[0], rtol)
    out = [s0p]
    for j in range(1, len(seq)):
        acc = np.zeros_like(s0p @ seq[0])
        for l in range(j):
            acc = acc + seq[j - l] @ out[l]
        out.append(-s0p @ acc)
    return out


def oracle_alpha_shift(alpha, seq):
    """Shifted sequence: entry j is -alpha*s_{j-1} + s_j with s_{-1} = 0."""
    seq = [np.asarray(s, dtype=complex) for s in seq]
    out = []
    prev = np.zeros_like(seq[0])
    for s in seq:
        out.append(-alpha * prev + s)
        prev = s
    return out


def oracle_first_transform(alpha, seq, rtol=1e-12):
    """One algorithm step: -s_0 * r_{j+1} * s_0 with r the reciprocal of
    the shifted sequence."""
    seq = [np.asarray(s, dtype=complex) for s in seq]
    rec = oracle_reciprocal(oracle_alpha_shift(alpha, seq), rtol)
    s0 = seq[0]
    return [-s0 @ rec[j + 1] @ s0 for j in range(len(seq) - 1)]


def oracle_inverse_transform(alpha, a, t, n, rtol=1e-12):
    """Literal nested-sum form of the inverse algorithm step.

    Returns the first n+1 entries r_0..r_n of the reconstruction seeded
    with ``a``:

        r_0 = a
        r_j = alpha^j a
              + sum_{l=1}^{j} alpha^(j-l) a a^+ [ sum_{k=0}^{l-1}
                    t_{l-1-k} a^+ (shift r)_k ]

    where (shift r)_k = -alpha*r_{k-1} + r_k (and (shift r)_0 = r_0).
    """
    a = np.asarray(a, dtype=complex)
    t = [np.asarray(x, dtype=complex) for x in t]
    ap = oracle_pinv(a, rtol)
    out = [a.copy()]
    for j in range(1, n + 1):
        total = (alpha ** j) * a
        for l in range(1, j + 1):
            inner = np.zeros_like(a)
            for k in range(l):
                if k == 0:
                    shifted = out[0]
                else:
                    shifted = -alpha * out[k - 1] + out[k]
                inner = inner + t[l - 1 - k] @ ap @ shifted
            total = total + (alpha ** (j - l)) * (a @ ap @ inner)
        out.append(total)
    return out


def oracle_block_hankel(seq, n):
    """Dense (n+1)x(n+1) block Hankel matrix with block (j,k) = s_{j+k}."""
    seq = [np.asarray(s, dtype=complex) for s in seq]
    q = seq[0].shape[0]
    h = np.zeros(((n + 1) * q, (n + 1) * q), dtype=complex)
    for j in range(n + 1):
        for k in range(n + 1):
            h[j * q:(j + 1) * q, k * q:(k + 1) * q] = seq[j + k]
    return h


def oracle_schur_complement(seq, n, rtol=1e-12):
    """L_n = s_{2n} - [s_n .. s_{2n-1}] H_{n-1}^+ [s_n ; .. ; s_{2n-1}]."""
    seq = [np.asarray(s, dtype=complex) for s in seq]
    if n == 0:
        return seq[0].copy()
    z = np.hstack([seq[j] for j in range(n, 2 * n)])
    y = np.vstack([seq[j] for j in range(n, 2 * n)])
    return seq[2 * n] - z @ oracle_pinv(oracle_block_hankel(seq, n - 1), rtol) @ y


def oracle_moments(alpha, nodes, weights, m):
    """Power moments of a finite atomic measure by direct summation."""
    weights = [np.asarray(w, dtype=complex) for w in weights]
    out = []
    for j in range(m + 1):
        acc = np.zeros_like(weights[0]) if weights else None
        for x, w in zip(nodes, weights):
            acc = acc + (x ** j) * w
        out.append(acc)
    return out


def oracle_stieltjes_value(nodes, weights, z):
    """Pointwise Cauchy-kernel sum: sum_k w_k / (x_k - z)."""
    weights = [np.asarray(w, dtype=complex) for w in weights]
    acc = np.zeros_like(weights[0])
    for x, w in zip(nodes, weights):
        acc = acc + w / (x - z)
    return acc


def oracle_jtilde(q):
    """The 2q x 2q signature matrix [[0, -iI],[iI, 0]]."""
    j = np.zeros((2 * q, 2 * q), dtype=complex)
    j[:q, q:] = -1j * np.eye(q)
    j[q:, :q] = 1j * np.eye(q)
    return j


def oracle_jform(x, j):
    """X^* (-J) X by plain matrix products."""
    x = np.asarray(x, dtype=complex)
    return x.conj().T @ (-j) @ x


def oracle_v_at(alpha, a, z, rtol=1e-12):
    """Direct evaluation of the descent generator at a point."""
    a = np.asarray(a, dtype=complex)
    ap = oracle_pinv(a, rtol)
    q = a.shape[0]
    zero = np.zeros((q, q), dtype=complex)
    eye = np.eye(q, dtype=complex)
    return np.block([[zero, -a], [(z - alpha) * ap, (z - alpha) * eye]])


def oracle_w_at(alpha, a, z, rtol=1e-12):
    """Direct evaluation of the ascent generator at a point."""
    a = np.asarray(a, dtype=complex)
    ap = oracle_pinv(a, rtol)
    q = a.shape[0]
    eye = np.eye(q, dtype=complex)
    return np.block([[(z - alpha) * eye, a], [-(z - alpha) * ap, eye - ap @ a]])


def oracle_w_metric_correction(alpha, a, z, rtol=1e-12):
    """Closed form of diag((z-a)I, I)W(z) conjugated into the J-metric.

    Block entries derived by hand from the generator definition:
      E11 = -2|z-alpha|^2 Im(z) a^+
      E12 =  i|z-alpha|^2 aa^+ + i conj(z-alpha)^2 (I - aa^+)
      E21 = -i(z-alpha)^2 (I - aa^+) - i|z-alpha|^2 aa^+
      E22 =  0
    """
    a = np.asarray(a, dtype=complex)
    ap = oracle_pinv(a, rtol)
    q = a.shape[0]
    eye = np.eye(q, dtype=complex)
    proj = a @ ap
    u = z - alpha
    e11 = -2.0 * abs(u) ** 2 * np.imag(z) * ap
    e12 = 1j * abs(u) ** 2 * proj + 1j * np.conj(u) ** 2 * (eye - proj)
    e21 = -1j * u ** 2 * (eye - proj) - 1j * abs(u) ** 2 * proj
    e22 = np.zeros((q, q), dtype=complex)
    return np.block([[e11, e12], [e21, e22]])


def oracle_adjugate(m):
    """Adjugate by explicit cofactor minors (slow; test sizes only)."""
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    adj = np.zeros_like(m)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(m, i, axis=0), j, axis=1)
            adj[j, i] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


def random_hermitian(rng, q, scale=1.0):
    a = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
    return scale * 0.5 * (a + a.conj().T)


def random_psd(rng, q, rank=None, scale=1.0):
    rank = q if rank is None else rank
    b = rng.standard_normal((q, rank)) + 1j * rng.standard_normal((q, rank))
    return scale * (b @ b.conj().T) / max(rank, 1)


def random_measure(rng, q, n_atoms, alpha=0.0, spread=2.0, ranks=None):
    """Seeded atomic measure with nodes in [alpha, alpha+spread]."""
    nodes = np.sort(alpha + spread * rng.random(n_atoms))
    if ranks is None:
        ranks = [q] * n_atoms
    weights = [random_psd(rng, q, rank=r) for r in ranks]
    return list(nodes), weights
