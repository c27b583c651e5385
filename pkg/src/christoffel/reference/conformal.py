"""Exterior conformal maps Phi of planar compact sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class ConformalMap:
    """Phi maps the exterior of a compact set onto |w| > 1, Phi(inf) = inf.

    ``psi`` is the inverse map (from |w| > 1 back to the exterior) when known.
    """

    label: str
    phi: Callable = field(repr=False)
    dphi: Callable = field(repr=False)
    psi: Callable | None = field(default=None, repr=False)
    capacity: float = 1.0

    def g(self, z):
        """Ratio-asymptotic function 1 / Phi(z)."""
        return 1.0 / self.phi(z)

    def distance_to_level(self, r: float, samples: int = 4096) -> float:
        """Distance from the boundary (|Phi| = 1) to the level curve |Phi| = r."""
        if self.psi is None:
            raise ValueError("distance needs the inverse map")
        t = np.exp(2j * np.pi * np.arange(samples) / samples)
        gam = self.psi(t * (1 + 1e-12))
        lev = self.psi(r * t)
        from scipy.spatial import cKDTree

        dist, _ = cKDTree(np.c_[gam.real, gam.imag]).query(np.c_[lev.real, lev.imag])
        return float(dist.min())


def disk_map(center: complex = 0.0, radius: float = 1.0) -> ConformalMap:
    c = complex(center)
    return ConformalMap(
        f"disk(center={c}, radius={radius})",
        lambda z: (np.asarray(z, dtype=complex) - c) / radius,
        lambda z: np.full(np.shape(z), 1.0 / radius, dtype=complex),
        lambda w: c + radius * np.asarray(w, dtype=complex),
        radius,
    )


def ellipse_map(a: float, b: float) -> ConformalMap:
    """Exterior map of the ellipse x^2/a^2 + y^2/b^2 <= 1 with a > b > 0.

    With c = sqrt(a^2 - b^2) and R = (a + b)/c, Phi(z) = u / R where
    z / c = (u + 1/u) / 2 and |u| >= 1.
    """
    if not a > b > 0:
        raise ValueError("ellipse map needs a > b > 0")
    c = np.sqrt(a * a - b * b)
    R = (a + b) / c

    def branch(z):
        x = np.asarray(z, dtype=complex) / c
        s = np.sqrt(x * x - 1)
        flip = np.abs(x + s) < 1
        s = np.where(flip, -s, s)
        return x + s, s

    def phi(z):
        u, _ = branch(z)
        return u / R

    def dphi(z):
        u, s = branch(z)
        return u / (s * c * R)

    def psi(w):
        v = R * np.asarray(w, dtype=complex)
        return c * (v + 1 / v) / 2

    return ConformalMap(f"ellipse(a={a}, b={b})", phi, dphi, psi, (a + b) / 2)
