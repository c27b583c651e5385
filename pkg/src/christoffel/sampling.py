"""Seeded point-cloud generators for the outlier-detection experiments."""

from __future__ import annotations

import numpy as np

from .measures import DiscreteMeasure


def disk_samples(rng: np.random.Generator, count: int, radius: float = 1.0) -> np.ndarray:
    return radius * np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count))


def ring_outliers(
    rng: np.random.Generator, count: int, rmin: float = 1.2, rmax: float = 1.6
) -> np.ndarray:
    """Points at radii in [rmin, rmax], angles stratified so they are spread out."""
    r = rng.uniform(rmin, rmax, count)
    th = 2 * np.pi * (np.arange(count) + rng.random(count)) / count
    return r * np.exp(1j * th)


def disk_with_outliers(seed: int, bulk: int = 593, outliers: int = 7) -> tuple[DiscreteMeasure, np.ndarray]:
    """Uniform samples of the unit disk plus planted exterior points, equal weights.

    Returns the measure and the indices of the planted points (the last ones).
    """
    rng = np.random.default_rng(seed)
    z = np.r_[disk_samples(rng, bulk), ring_outliers(rng, outliers)]
    return DiscreteMeasure.uniform(z), np.arange(bulk, bulk + outliers)


def square_grid_with_outliers(seed: int, side: int = 24, outliers: int = 7) -> tuple[DiscreteMeasure, np.ndarray]:
    """Regular side x side grid on [-1, 1]^2 (as complex numbers) plus exterior points.

    The grid replaces ``outliers`` of its own points so the cloud has side^2 atoms.
    """
    rng = np.random.default_rng(seed)
    x = np.linspace(-1, 1, side)
    grid = (x[:, None] + 1j * x[None, :]).ravel()
    keep = np.sort(rng.choice(grid.size, grid.size - outliers, replace=False))
    ang = 2 * np.pi * (np.arange(outliers) + rng.random(outliers)) / outliers
    r = rng.uniform(1.7, 2.2, outliers)
    out = r * np.exp(1j * ang)
    z = np.r_[grid[keep], out]
    return DiscreteMeasure.uniform(z), np.arange(keep.size, z.size)


def cusp_curve(points_per_axis: int = 15) -> DiscreteMeasure:
    """(u^3, u^2) for u on a grid of the unit disk: z1^2 = z2^3 on the support."""
    t = np.linspace(-1, 1, points_per_axis)
    u = (t[:, None] + 1j * t[None, :]).ravel()
    u = u[np.abs(u) <= 1]
    return DiscreteMeasure.uniform(np.c_[u**3, u**2])


def roots_of_unity(N: int) -> DiscreteMeasure:
    return DiscreteMeasure.uniform(np.exp(2j * np.pi * np.arange(N) / N))


def random_cloud(rng: np.random.Generator, N: int, d: int) -> DiscreteMeasure:
    """Gaussian atoms in C^d with random positive weights."""
    z = rng.normal(size=(N, d)) + 1j * rng.normal(size=(N, d))
    return DiscreteMeasure(z, rng.uniform(0.2, 1.0, N))


GENERATORS = {
    "disk-outliers": lambda seed: disk_with_outliers(seed)[0],
    "square-outliers": lambda seed: square_grid_with_outliers(seed)[0],
    "cusp": lambda seed: cusp_curve(),
    "roots": lambda seed: roots_of_unity(16),
}
