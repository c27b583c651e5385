"""Closed-form pluripotential Green functions with pole at infinity."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


def _logplus(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x > 1, np.log(np.where(x > 1, x, 1.0)), 0.0)


def interval_green(z):
    """g(z) = log|z + sqrt(z^2 - 1)| for [-1, 1], with the branch giving |.| >= 1."""
    z = np.asarray(z, dtype=complex)
    s = np.sqrt(z * z - 1)
    u = z + s
    u = np.where(np.abs(u) >= 1, u, z - s)
    return _logplus(np.abs(u))


def joukowski_inverse(z):
    """u with z = (u + 1/u)/2 and |u| >= 1."""
    z = np.asarray(z, dtype=complex)
    s = np.sqrt(z * z - 1)
    u = z + s
    return np.where(np.abs(u) >= 1, u, z - s)


@dataclass(frozen=True)
class GreenFunction:
    """Green function g of the complement of a compact set in C^d.

    ``dims`` is the ambient dimension d; ``func`` maps an (M, d) array of
    points to M values.
    """

    kind: str
    dims: int
    func: Callable = field(repr=False)
    params: dict = field(default_factory=dict)

    def __call__(self, z):
        return green_eval(self, z)


def _points(z, d):
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if d == 1 else arr.reshape(1, -1)
    if arr.shape[1] != d:
        raise ValueError(f"expected points in C^{d}, got shape {arr.shape}")
    return arr


def green_eval(gf: GreenFunction, z):
    """Evaluate ``gf`` at one point (returns float) or at an (M, d) array."""
    single = np.ndim(z) == 0 or (np.ndim(z) == 1 and gf.dims > 1 and np.shape(z)[0] == gf.dims)
    vals = np.asarray(gf.func(_points(z, gf.dims)), dtype=float)
    vals = np.maximum(vals, 0.0)
    return float(vals[0]) if single else vals


# -- constructors ------------------------------------------------------------


def interval() -> GreenFunction:
    return GreenFunction("interval", 1, lambda Z: interval_green(Z[:, 0]))


def complex_ball(a=None, r: float = 1.0, norm: str | Callable = "euclidean", d: int | None = None) -> GreenFunction:
    """log+([z - a] / r) for a complex norm [.]; ``norm`` is 'euclidean', 'max' or a callable on rows."""
    if a is None:
        a = np.zeros(d or 1)
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    if r <= 0:
        raise ValueError("radius must be positive")
    if norm == "euclidean":
        nf = lambda X: np.linalg.norm(X, axis=1)
    elif norm == "max":
        nf = lambda X: np.max(np.abs(X), axis=1)
    elif callable(norm):
        nf = lambda X: np.array([norm(x) for x in X])
    else:
        raise ValueError(f"unknown norm {norm!r}")
    return GreenFunction(
        "complex-ball", a.size, lambda Z: _logplus(nf(Z - a) / r), {"a": a, "r": r, "norm": norm}
    )


def polyhedron(polys: Sequence[tuple[Callable, int]], d: int) -> GreenFunction:
    """max_j log+|p_j(z)| / deg p_j; ``polys`` holds (callable on rows, degree) pairs."""
    polys = list(polys)

    def f(Z):
        vals = [_logplus(np.abs(np.array([p(z) for z in Z]))) / deg for p, deg in polys]
        return np.max(vals, axis=0)

    return GreenFunction("polyhedron", d, f, {"degrees": [deg for _, deg in polys]})


def polydisk(d: int) -> GreenFunction:
    return GreenFunction("polydisk", d, lambda Z: _logplus(np.max(np.abs(Z), axis=1)))


def product(factors: Sequence[GreenFunction]) -> GreenFunction:
    """Green function of K_1 x K_2 x ...: the maximum of the factors."""
    factors = list(factors)
    dims = [f.dims for f in factors]
    cuts = np.cumsum([0] + dims)

    def f(Z):
        vals = [green_eval(g, Z[:, cuts[i] : cuts[i + 1]]) for i, g in enumerate(factors)]
        return np.max(np.vstack([np.atleast_1d(v) for v in vals]), axis=0)

    return GreenFunction("product", int(cuts[-1]), f, {"factors": factors})


def cube(d: int) -> GreenFunction:
    """[-1, 1]^d: max_j g_interval(z_j)."""
    return GreenFunction("cube", d, lambda Z: np.max(interval_green(Z), axis=1))


def real_ball(d: int) -> GreenFunction:
    """Real unit ball of R^d: (1/2) g_interval(||z||^2 + |z.z - 1|)."""

    def f(Z):
        t = np.sum(np.abs(Z) ** 2, axis=1) + np.abs(np.sum(Z * Z, axis=1) - 1)
        return 0.5 * interval_green(t)

    return GreenFunction("real-ball", d, f)


def simplex(d: int) -> GreenFunction:
    """Standard simplex: g_interval(sum |z_j| + |sum z_j - 1|)."""

    def f(Z):
        t = np.sum(np.abs(Z), axis=1) + np.abs(np.sum(Z, axis=1) - 1)
        return interval_green(t)

    return GreenFunction("simplex", d, f)


def tensor_square() -> GreenFunction:
    """Growth exponent of the tensor Chebyshev kernel on [-1, 1]^2.

    The tensor kernel factors into univariate kernels, so its n-th root growth
    adds the two interval Green functions.
    """
    return GreenFunction("tensor-square", 2, lambda Z: interval_green(Z[:, 0]) + interval_green(Z[:, 1]))


def external_conformal(cmap) -> GreenFunction:
    """log+|Phi(z)| for a planar compact set with exterior map Phi."""
    return GreenFunction(
        "external-conformal", 1, lambda Z: _logplus(np.abs(cmap.phi(Z[:, 0]))), {"map": cmap}
    )


KINDS = {
    "interval": lambda d: interval(),
    "complex-ball": lambda d: complex_ball(d=d),
    "polydisk": polydisk,
    "cube": cube,
    "real-ball": real_ball,
    "simplex": simplex,
    "tensor-square": lambda d: tensor_square(),
}


def by_name(kind: str, d: int = 1) -> GreenFunction:
    try:
        return KINDS[kind](d)
    except KeyError:
        raise ValueError(f"unknown Green function kind {kind!r}") from None


def boundary_samples(kind: str, d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Points on the boundary (or on the set itself for real sets) where g vanishes."""
    if kind == "interval":
        return rng.uniform(-1, 1, (count, 1)).astype(complex)
    if kind == "complex-ball":
        X = rng.normal(size=(count, d)) + 1j * rng.normal(size=(count, d))
        return X / np.linalg.norm(X, axis=1, keepdims=True)
    if kind == "polydisk":
        Z = rng.uniform(0, 1, (count, d)) * np.exp(2j * np.pi * rng.random((count, d)))
        j = rng.integers(0, d, count)
        Z[np.arange(count), j] = np.exp(2j * np.pi * rng.random(count))
        return Z
    if kind in ("cube", "tensor-square"):
        return rng.uniform(-1, 1, (count, d)).astype(complex)
    if kind == "real-ball":
        X = rng.normal(size=(count, d))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        return (X * rng.random((count, 1)) ** (1 / d)).astype(complex)
    if kind == "simplex":
        E = rng.exponential(size=(count, d + 1))
        return (E / E.sum(axis=1, keepdims=True))[:, :d].astype(complex)
    raise ValueError(f"no boundary sampler for {kind!r}")
