"""Independent high-precision oracles used by the tests."""

from __future__ import annotations

import mpmath as mp
import numpy as np


def monomial_gram(atoms, weights, n, dps=50):
    """G[j, k] = sum_i t_i conj(z_i^j) z_i^k in ``dps``-digit arithmetic (univariate)."""
    with mp.workdps(dps):
        G = mp.zeros(n + 1, n + 1)
        for z, t in zip(np.ravel(atoms), np.ravel(weights)):
            z, t = mp.mpc(complex(z)), mp.mpf(float(t))
            p = [mp.mpf(1)]
            for _ in range(n):
                p.append(p[-1] * z)
            for j in range(n + 1):
                cj = t * mp.conj(p[j])
                for k in range(j, n + 1):
                    G[j, k] += cj * p[k]
        for j in range(n + 1):
            for k in range(j):
                G[j, k] = mp.conj(G[k, j])
    return G


def gram_kernel_diagonal(G, z, dps=50):
    """K_n(z, z) = v(z)^T G^{-1} conj(v(z)) for monomial vector v."""
    n = G.rows - 1
    with mp.workdps(dps):
        z = mp.mpc(complex(z))
        v = [z**k for k in range(n + 1)]
        x = mp.lu_solve(G, mp.matrix([mp.conj(c) for c in v]))
        return float(mp.re(mp.fsum(v[k] * x[k] for k in range(n + 1))))


def gram_add(G1, G2, dps=50):
    """Entrywise sum at ``dps`` digits (mpmath arithmetic outside a context rounds to 15)."""
    with mp.workdps(dps):
        return G1 + G2


def gram_schmidt_values(atoms, weights, exponents, dps=32):
    """Two-pass classical Gram-Schmidt of weighted monomials at ``dps`` digits.

    Returns p_j(z_i) as a complex (N, len(exponents)) array; assumes no
    monomial is dependent on the support.
    """
    atoms = np.asarray(atoms, dtype=complex).reshape(len(weights), -1)
    with mp.workdps(dps):
        sq = [mp.sqrt(mp.mpf(float(t))) for t in weights]
        pts = [[mp.mpc(complex(v)) for v in row] for row in atoms]
        Q = []
        for alpha in exponents:
            v = []
            for i, row in enumerate(pts):
                m = sq[i]
                for x, a in zip(row, alpha):
                    m *= x**a
                v.append(m)
            for _ in range(2):
                for q in Q:
                    h = mp.fsum(mp.conj(a) * b for a, b in zip(q, v))
                    v = [b - h * a for a, b in zip(q, v)]
            r = mp.sqrt(mp.fsum(abs(b) ** 2 for b in v))
            Q.append([b / r for b in v])
        out = np.array([[complex(Q[j][i] / sq[i]) for j in range(len(Q))] for i in range(len(pts))])
    return out
