"""Christoffel-Darboux kernels, cosines, leverage scores and level sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .measures import DiscreteMeasure, MonomialOrdering, as_points
from .orthopoly import DEFAULT_RANK_TOL, OrthoBasis, evaluate_basis, orthonormalize


class UndefinedCosineError(ValueError):
    """Raised when a cosine is requested at a point where the kernel diagonal vanishes."""


class SingularCovarianceError(np.linalg.LinAlgError):
    """Raised when the covariance matrix of a measure is not invertible."""


@dataclass(frozen=True, eq=False)
class KernelEngine:
    """Evaluator of K_n(z, w) = sum_j p_j(z) conj(p_j(w)) for a fixed basis."""

    basis: OrthoBasis

    @classmethod
    def fit(
        cls,
        measure: DiscreteMeasure,
        n: int,
        ordering: MonomialOrdering | None = None,
        rank_tol: float = DEFAULT_RANK_TOL,
        **kwargs,
    ) -> "KernelEngine":
        return cls(orthonormalize(measure, ordering, n, rank_tol, **kwargs))

    @property
    def measure(self) -> DiscreteMeasure | None:
        return self.basis.measure

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def d(self) -> int:
        return self.basis.d

    def values(self, z) -> np.ndarray:
        """Basis values as an (M, n+1) array.

        Points that coincide with an atom of the fitted measure reuse the
        stored sample values; replaying the recurrence far outside the bulk
        of the support loses all accuracy once the true values become tiny.
        """
        pts = as_points(z, self.d)
        V = evaluate_basis(self.basis, pts).reshape(pts.shape[0], self.basis.size)
        lookup = self._atom_lookup()
        if lookup:
            for i, row in enumerate(pts):
                j = lookup.get(row.tobytes())
                if j is not None:
                    V[i] = self.basis.sample_values[j]
        return V

    def _atom_lookup(self) -> dict:
        cached = self.__dict__.get("_lookup")
        if cached is None:
            b = self.basis
            cached = {}
            if b.measure is not None and b.sample_values is not None:
                atoms = np.ascontiguousarray(b.measure.atoms, dtype=complex)
                cached = {row.tobytes(): j for j, row in enumerate(atoms)}
            object.__setattr__(self, "_lookup", cached)
        return cached

    def diagonal(self, z) -> np.ndarray:
        """K_n(z, z) as a squared norm, one value per point."""
        V = self.values(z)
        return np.einsum("ij,ij->i", V, V.conj()).real


def _is_single(z, d):
    return np.ndim(z) == 0 or (np.ndim(z) == 1 and d > 1 and np.shape(z)[0] == d)


def kernel(engine: KernelEngine, z, w) -> complex | np.ndarray:
    """K_n(z, w); arrays of points give elementwise values."""
    if _is_single(z, engine.d) and _is_single(w, engine.d):
        vz = engine.values(z)[0]
        vw = engine.values(w)[0]
        if np.array_equal(as_points(z, engine.d), as_points(w, engine.d)):
            return complex(np.vdot(vz, vz).real)
        return complex(np.dot(vz, vw.conj()))
    Vz = engine.values(z)
    Vw = engine.values(w)
    return np.einsum("ij,ij->i", Vz, Vw.conj())


def christoffel(engine: KernelEngine, z) -> float | np.ndarray:
    """lambda_n(z) = 1 / K_n(z, z); ``inf`` where the diagonal vanishes."""
    K = engine.diagonal(z)
    with np.errstate(divide="ignore"):
        lam = np.where(K > 0, 1.0 / np.where(K > 0, K, 1.0), np.inf)
    return float(lam[0]) if _is_single(z, engine.d) else lam


def cosine(engine: KernelEngine, z, w) -> complex | np.ndarray:
    """C_n(z, w) = K_n(z, w) / sqrt(K_n(z, z) K_n(w, w))."""
    Vz = engine.values(z)
    Vw = engine.values(w)
    kz = np.einsum("ij,ij->i", Vz, Vz.conj()).real
    kw = np.einsum("ij,ij->i", Vw, Vw.conj()).real
    if np.any(kz <= 0) or np.any(kw <= 0):
        raise UndefinedCosineError("kernel diagonal vanishes, cosine undefined")
    kzw = np.einsum("ij,ij->i", Vz, Vw.conj())
    c = kzw / np.sqrt(kz * kw)
    same = np.all(as_points(z, engine.d) == as_points(w, engine.d), axis=1)
    c = np.where(same, 1.0 + 0j, c)
    if _is_single(z, engine.d) and _is_single(w, engine.d):
        return complex(c[0])
    return c


@dataclass(frozen=True, eq=False)
class MultiPointKernel:
    """Matrices K_n(z_j, w_k) and C_n(z_j, w_k) for two point lists."""

    K: np.ndarray
    C: np.ndarray
    z: np.ndarray
    w: np.ndarray
    condition: float

    @property
    def invertible(self) -> bool:
        return bool(np.isfinite(self.condition) and self.condition < 1e12)

    def determinant(self, cosine: bool = False) -> complex:
        return complex(np.linalg.det(self.C if cosine else self.K))


def multipoint(engine: KernelEngine, z_list, w_list=None) -> MultiPointKernel:
    """Multi-point kernel and cosine matrices; ``w_list`` defaults to ``z_list``."""
    z = as_points(z_list, engine.d)
    w = z if w_list is None else as_points(w_list, engine.d)
    if z.shape[0] != w.shape[0] or z.shape[0] < 1:
        raise ValueError("point lists must be non-empty and of equal length")
    Vz = engine.values(z)
    Vw = Vz if w_list is None else engine.values(w)
    K = Vz @ Vw.conj().T
    if w_list is None:
        K = 0.5 * (K + K.conj().T)
    kz = np.einsum("ij,ij->i", Vz, Vz.conj()).real
    kw = np.einsum("ij,ij->i", Vw, Vw.conj()).real
    with np.errstate(divide="ignore", invalid="ignore"):
        C = K / np.sqrt(np.outer(kz, kw))
    cond = float(np.linalg.cond(K)) if np.all(np.isfinite(K)) else np.inf
    return MultiPointKernel(K, C, z, w, cond)


# ---------------------------------------------------------------------------
# Leverage scores
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LeverageReport:
    scores: np.ndarray
    threshold: float
    flagged: np.ndarray
    n: int

    @property
    def total(self) -> float:
        return float(self.scores.sum())

    def top(self, k: int) -> np.ndarray:
        """Indices of the k largest scores, largest first (stable on ties)."""
        return np.argsort(-self.scores, kind="stable")[:k]


def auto_threshold(scores: np.ndarray, q: float = 0.99, kappa: float = 2.0) -> float:
    """max(0.5, kappa * quantile_q(scores))."""
    return max(0.5, kappa * float(np.quantile(scores, q)))


def leverage_scores(engine: KernelEngine, threshold: float | str = "auto") -> LeverageReport:
    """s_j = t_j K_n(z_j, z_j) for the measure the engine was built on."""
    basis = engine.basis
    if basis.measure is None or basis.sample_values is None:
        raise ValueError("leverage scores need a basis built on a measure")
    V = basis.sample_values
    scores = basis.measure.weights * np.einsum("ij,ij->i", V, V.conj()).real
    thr = auto_threshold(scores) if threshold == "auto" else float(threshold)
    return LeverageReport(scores, thr, np.flatnonzero(scores > thr), basis.n)


# ---------------------------------------------------------------------------
# Mahalanobis distance
# ---------------------------------------------------------------------------


def covariance(measure: DiscreteMeasure) -> tuple[np.ndarray, np.ndarray]:
    """Mean m and covariance C_jk = int conj(z_j - m_j)(z_k - m_k) dmu / mass."""
    w = measure.weights / measure.total_mass
    m = w @ measure.atoms
    X = measure.atoms - m
    C = (X.conj().T * w) @ X
    return m, 0.5 * (C + C.conj().T)


def mahalanobis(measure: DiscreteMeasure, z, rtol: float = 1e-12) -> float | np.ndarray:
    """Delta(z) = sqrt((z - m) C^{-1} (z - m)^*) for the normalized measure mu / mu(C^d).

    For a probability measure the degree-one kernel satisfies
    ``K_1(z, z) = 1 + Delta(z)^2``; for total mass M it is ``(1 + Delta^2) / M``.
    """
    m, C = covariance(measure)
    evals, evecs = np.linalg.eigh(C)
    bad = np.flatnonzero(evals <= rtol * max(evals.max(), 0.0))
    if bad.size:
        dirs = "; ".join(np.array2string(evecs[:, k], precision=3) for k in bad)
        raise SingularCovarianceError(f"covariance is singular along {dirs}")
    pts = as_points(z, measure.d)
    Y = pts - m
    # row-vector convention: (z - m) C^{-1} (z - m)^*
    sol = np.linalg.solve(C.T, Y.T).T
    delta = np.sqrt(np.maximum(np.einsum("ij,ij->i", sol, Y.conj()).real, 0.0))
    return float(delta[0]) if _is_single(z, measure.d) else delta


# ---------------------------------------------------------------------------
# Level sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Grid:
    """Rectangular lattice in a complex coordinate; other coordinates fixed."""

    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int
    axis: int = 0
    base: tuple = ()

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid needs at least one node per axis")

    @classmethod
    def parse(cls, text: str, d: int = 1, axis: int = 0, base=None) -> "Grid":
        parts = text.split(",")
        if len(parts) != 6:
            raise ValueError("grid spec is x0,x1,y0,y1,nx,ny")
        x0, x1, y0, y1 = (float(p) for p in parts[:4])
        nx, ny = int(parts[4]), int(parts[5])
        base = tuple(base) if base is not None else (0j,) * d
        return cls(x0, x1, y0, y1, nx, ny, axis, base)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.nx) if self.nx > 1 else np.array([self.x0])

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y0, self.y1, self.ny) if self.ny > 1 else np.array([self.y0])

    def points(self, d: int) -> np.ndarray:
        X, Y = np.meshgrid(self.xs, self.ys)
        zc = (X + 1j * Y).ravel()
        base = np.array(self.base if self.base else (0j,) * d, dtype=complex)
        pts = np.tile(base, (zc.size, 1))
        pts[:, self.axis] = zc
        return pts


@dataclass(frozen=True, eq=False)
class LevelField:
    grid: Grid
    values: np.ndarray  # shape (ny, nx)
    threshold: float
    mask: np.ndarray  # True inside {K <= threshold}

    def inside_points(self) -> np.ndarray:
        X, Y = np.meshgrid(self.grid.xs, self.grid.ys)
        return (X + 1j * Y)[self.mask]


def level_field(engine: KernelEngine, grid: Grid, threshold: float = np.inf) -> LevelField:
    """K_n(z, z) on a grid slice and the mask of the sublevel set."""
    vals = engine.diagonal(grid.points(engine.d)).reshape(grid.ny, grid.nx)
    return LevelField(grid, vals, threshold, vals <= threshold)


def auto_level_threshold(engine: KernelEngine, q: float = 0.99, kappa: float = 2.0) -> float:
    """kappa times the q-quantile of K_n(z_j, z_j) over the atoms."""
    V = engine.basis.sample_values
    diag = np.einsum("ij,ij->i", V, V.conj()).real
    return kappa * float(np.quantile(diag, q))


def hausdorff_distance(a, b) -> float:
    """Symmetric Hausdorff distance between two finite sets of complex numbers."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0 or b.size == 0:
        return np.inf
    A = np.c_[a.real, a.imag]
    B = np.c_[b.real, b.imag]
    da, _ = cKDTree(B).query(A)
    db, _ = cKDTree(A).query(B)
    return float(max(da.max(), db.max()))
