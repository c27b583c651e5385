"""Closed-form Christoffel-Darboux kernels and Bergman-space predictors."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .conformal import ConformalMap


def _series(coef_fn, x, n):
    # sum_{k=0}^n coef_fn(k) x^k by Horner, vectorized over x
    x = np.asarray(x, dtype=complex)
    acc = np.zeros_like(x)
    for k in range(n, -1, -1):
        acc = acc * x + coef_fn(k)
    return acc


def _scalar(v):
    return complex(v) if np.ndim(v) == 0 else v


# -- Bergman disk ------------------------------------------------------------


def bergman_disk_kernel(n: int, z, w):
    """sum_{j<=n} (j+1)/pi (z conj(w))^j for area measure on the unit disk."""
    x = np.asarray(z, dtype=complex) * np.conj(np.asarray(w, dtype=complex))
    return _scalar(_series(lambda k: (k + 1) / np.pi, x, n))


def bergman_disk_max(n: int) -> float:
    """max of K_n(z, z) over the closed disk, attained on |z| = 1."""
    return (n + 1) * (n + 2) / (2 * np.pi)


def bergman_disk_asymptote(n: int, z) -> float | np.ndarray:
    """(n+1)/pi |z|^(2n+2) / (|z|^2 - 1) for |z| > 1."""
    r2 = np.abs(np.asarray(z, dtype=complex)) ** 2
    out = (n + 1) / np.pi * r2 ** (n + 1) / (r2 - 1)
    return float(out) if np.ndim(out) == 0 else out


def bergman_disk_orthonormal(n: int, z):
    """p_n(z) = sqrt((n+1)/pi) z^n."""
    return np.sqrt((n + 1) / np.pi) * np.asarray(z, dtype=complex) ** n


# -- Theorem-style predictors for area measure on a Jordan domain -------------


@dataclass(frozen=True)
class BergmanPredictors:
    exterior_kernel: float | None
    ratio_g: complex | None
    interior_bound: float | None
    gamma: float | None
    r_n: float


def level_radius(n: int) -> float:
    """r(n) = sqrt(1 + 1/(n+1))."""
    return float(np.sqrt(1 + 1 / (n + 1)))


def gamma_shape(n: int, c1: float, level_distance: float) -> float:
    """gamma_n = c1 / dist(Gamma, boundary of G_r(n))^2."""
    return c1 / level_distance**2


def bergman_predictors(
    cmap: ConformalMap,
    n: int,
    z=None,
    dist_to_boundary: float | None = None,
    c1: float | None = None,
    level_distance: float | None = None,
) -> BergmanPredictors:
    """Exterior kernel asymptote, ratio limit, interior bound and gamma_n.

    ``z`` outside the closed domain gives the exterior kernel
    (n+1)/pi |Phi'|^2/(|Phi|^2 - 1) |Phi|^(2n+2) and g = 1/Phi. The interior
    bound 1/(pi dist^2) needs ``dist_to_boundary``; gamma_n needs ``c1`` and
    uses ``level_distance`` or, if absent, the distance computed from the map.
    """
    ext = g = None
    if z is not None:
        phi = complex(cmap.phi(z))
        if abs(phi) <= 1:
            raise ValueError(f"|Phi(z)| = {abs(phi):.6g} <= 1, z is not exterior")
        dphi = complex(cmap.dphi(z))
        ext = (n + 1) / np.pi * abs(dphi) ** 2 / (abs(phi) ** 2 - 1) * abs(phi) ** (2 * n + 2)
        g = 1 / phi
    interior = None
    if dist_to_boundary is not None:
        interior = 1.0 / (np.pi * dist_to_boundary**2)
    r = level_radius(n)
    gamma = None
    if c1 is not None:
        if level_distance is None:
            level_distance = cmap.distance_to_level(r)
        gamma = gamma_shape(n, c1, level_distance)
    return BergmanPredictors(ext, g, interior, gamma, r)


def calibrate_disk_c1(nmax: int = 400) -> float:
    """Smallest c1 with max over |z| <= r(n) of K_n(z, z) <= gamma_n for all n <= nmax.

    For the unit disk dist(Gamma, {|z| = r}) = r - 1 and the maximum sits on
    |z| = r(n). The product K_n(r(n)) (r(n) - 1)^2 increases towards 1/(4 pi).
    """
    best = 0.0
    for n in range(nmax + 1):
        r = level_radius(n)
        best = max(best, bergman_disk_kernel(n, r, r).real * (r - 1) ** 2)
    return best


# -- Chebyshev tensor kernel -------------------------------------------------


def chebyshev_t(k: int, x):
    x = np.asarray(x, dtype=complex)
    t0, t1 = np.ones_like(x), x
    if k == 0:
        return t0
    for _ in range(k - 1):
        t0, t1 = t1, 2 * x * t1 - t0
    return t1


def chebyshev_kernel_1d(n: int, z, w):
    """1 + 2 sum_{k=1}^n T_k(z) conj(T_k(w)) for the arcsine measure on [-1, 1]."""
    z = np.asarray(z, dtype=complex)
    wc = np.conj(np.asarray(w, dtype=complex))
    acc = np.ones(np.broadcast(z, wc).shape, dtype=complex)
    tz0, tz1 = np.ones_like(z), z
    tw0, tw1 = np.ones_like(wc), wc
    for k in range(1, n + 1):
        acc = acc + 2 * tz1 * tw1
        tz0, tz1 = tz1, 2 * z * tz1 - tz0
        tw0, tw1 = tw1, 2 * wc * tw1 - tw0
    return acc


def chebyshev_kernel_1d_exact(n: int, x, y) -> Fraction:
    """Same sum in exact rational arithmetic for rational real x, y."""
    x, y = Fraction(x), Fraction(y)
    acc = Fraction(1)
    tx0, tx1, ty0, ty1 = Fraction(1), x, Fraction(1), y
    for _ in range(1, n + 1):
        acc += 2 * tx1 * ty1
        tx0, tx1 = tx1, 2 * x * tx1 - tx0
        ty0, ty1 = ty1, 2 * y * ty1 - ty0
    return acc


def chebyshev_tensor_kernel(n: int, z, w):
    """Product over coordinates of univariate Chebyshev kernels (box {0..n}^d)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    out = 1.0 + 0j
    for j in range(z.shape[-1]):
        out = out * chebyshev_kernel_1d(n, z[..., j], w[..., j])
    return _scalar(out)


def chebyshev_tensor_corner(n: int, d: int = 2) -> int:
    """K((1,..,1), (1,..,1)) in exact arithmetic; equals (2n+1)^d."""
    val = chebyshev_kernel_1d_exact(n, 1, 1) ** d
    if val.denominator != 1:
        raise ArithmeticError("corner value is not an integer")
    return int(val)


def chebyshev_tensor_asymptote(n: int, x) -> float:
    """Corner-case asymptote prod_j |u_j|^(2n) / (2 (1 - |u_j|^-2)), |x_j| > 1."""
    from .green import joukowski_inverse

    u = np.abs(joukowski_inverse(np.atleast_1d(np.asarray(x, dtype=complex))))
    return float(np.prod(u ** (2 * n) / (2 * (1 - u**-2))))


# -- Complex ball and polydisk -----------------------------------------------


def pochhammer(a: float, k: int) -> float:
    """(a)_k = a (a+1) ... (a+k-1) as a running product."""
    out = 1.0
    for i in range(k):
        out *= a + i
    return out


def _pairing(z, w):
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.sum(np.conj(w) * z, axis=-1)


def complex_ball_kernel(d: int, n: int, z, w):
    """(1/pi^d) sum_{k<=n} (k+1)_d (w* z)^k for volume measure on the unit ball of C^d."""
    s = _pairing(z, w)
    coefs = [1.0]
    for k in range(n):
        # (k+2)_d = (k+1)_d (k+1+d) / (k+1)
        coefs.append(coefs[-1] * (k + 1 + d) / (k + 1))
    coefs = [c * pochhammer(1, d) for c in coefs]
    return _scalar(_series(lambda k: coefs[k], s, n) / np.pi**d)


def complex_ball_bergman(d: int, z, w):
    """d!/pi^d (1 - w* z)^(-d-1), the n -> infinity limit for |w* z| < 1."""
    s = _pairing(z, w)
    return _scalar(factorial(d) / np.pi**d * (1 - s) ** (-d - 1))


def complex_ball_peak(d: int, n: int) -> float:
    """Kernel value at w* z = 1: (n+1)_{d+1} / (pi^d (d+1))."""
    return pochhammer(n + 1, d + 1) / (np.pi**d * (d + 1))


def complex_ball_asymptote(d: int, n: int, z) -> float:
    """(n+1)_d/pi^d ||z||^(2n+2) / (||z||^2 - 1) for ||z|| > 1."""
    r2 = float(np.sum(np.abs(np.asarray(z, dtype=complex)) ** 2))
    return pochhammer(n + 1, d) / np.pi**d * r2 ** (n + 1) / (r2 - 1)


def complex_ball_cosine(d: int, n: int, z, w) -> complex:
    k = complex_ball_kernel(d, n, z, w)
    return k / np.sqrt(complex_ball_kernel(d, n, z, z).real * complex_ball_kernel(d, n, w, w).real)


def polydisk_kernel(d: int, n: int, z, w):
    """(1/pi^d) sum_{|alpha|<=n} prod_j (alpha_j+1) (z_j conj(w_j))^alpha_j."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if z.shape[-1] != d or w.shape[-1] != d:
        raise ValueError(f"points must lie in C^{d}")
    x = z * np.conj(w)
    k = np.arange(n + 1)
    # truncated product of the univariate series, graded by total degree
    poly = (k + 1) * x[0] ** k
    for j in range(1, d):
        fac = (k + 1) * x[j] ** k
        poly = np.convolve(poly, fac)[: n + 1]
    return complex(poly.sum() / np.pi**d)


def polydisk_bergman(z, w) -> complex:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    return complex(np.prod(1 / (1 - z * np.conj(w)) ** 2) / np.pi ** z.size)
