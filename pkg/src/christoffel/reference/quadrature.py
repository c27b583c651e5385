"""Discrete stand-ins for the continuous measures of the closed-form catalog."""

from __future__ import annotations

import numpy as np
from scipy.special import roots_legendre

from ..measures import DiscreteMeasure, QuadratureMeasure


def disk_quadrature(n: int, radius: float = 1.0, center: complex = 0.0) -> QuadratureMeasure:
    """Area measure on a disk, exact for z^j conj(z)^k with j, k <= n.

    Gauss-Legendre in r (weight r dr, n + 1 nodes) times a (2n + 1)-point
    trapezoid rule in the angle.
    """
    m = n + 1
    M = 2 * n + 1
    x, wx = roots_legendre(m)
    r = 0.5 * (x + 1)
    wr = 0.5 * wx * r
    th = 2 * np.pi * np.arange(M) / M
    Z = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
    W = np.repeat(wr * 2 * np.pi / M, M)
    return QuadratureMeasure(
        center + radius * Z,
        W * radius**2,
        label="area-disk" if radius != 1 or center != 0 else "area-unit-disk",
        target_mass=np.pi * radius**2,
    )


def ellipse_quadrature(n: int, a: float, b: float) -> QuadratureMeasure:
    """Area measure on x^2/a^2 + y^2/b^2 <= 1, exact for bivariate degree <= 2n."""
    base = disk_quadrature(n)
    Z = base.atoms[:, 0]
    return QuadratureMeasure(
        a * Z.real + 1j * b * Z.imag,
        base.weights * a * b,
        label=f"area-ellipse({a},{b})",
        target_mass=np.pi * a * b,
    )


def chebyshev_nodes(m: int) -> np.ndarray:
    return np.cos((2 * np.arange(1, m + 1) - 1) * np.pi / (2 * m))


def chebyshev_tensor_quadrature(n: int, d: int = 2, extra: int = 1) -> QuadratureMeasure:
    """Product of arcsine measures on [-1, 1]^d via Gauss-Chebyshev grids.

    With m = n + 1 + extra nodes per axis products of two polynomials of
    partial degree n are integrated exactly.
    """
    m = n + 1 + extra
    x = chebyshev_nodes(m)
    grids = np.meshgrid(*([x] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1).astype(complex)
    w = np.full(pts.shape[0], 1.0 / m**d)
    return QuadratureMeasure(pts, w, label="chebyshev-tensor-square" if d == 2 else "chebyshev-tensor", target_mass=1.0)


def disk_moment_error(measure: DiscreteMeasure, n: int, radius: float = 1.0) -> float:
    """max |int z^k conj(z)^j - pi r^(2j+2)/(j+1) delta_jk| over j, k <= n (centred disk)."""
    z = measure.atoms[:, 0]
    V = z[:, None] ** np.arange(n + 1)[None, :]
    M = (V.conj().T * measure.weights) @ V
    j = np.arange(n + 1)
    exact = np.diag(np.pi * radius ** (2 * j + 2) / (j + 1))
    return float(np.max(np.abs(M - exact)))
