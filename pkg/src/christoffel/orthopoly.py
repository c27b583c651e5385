"""Orthonormal polynomials for discrete measures in C^d.

The construction is a rank-aware Gram-Schmidt sweep over monomials in the
order fixed by a :class:`~christoffel.measures.MonomialOrdering`. Monomials
whose residual vanishes on the support are recorded as null-space elements and
skipped, so the returned family has strictly increasing degree indices.

All arithmetic happens on the normalized cloud (see
:func:`~christoffel.measures.normalize_cloud`); values for the original measure
follow from ``p_j(z) = sqrt(c) * p~_j(Bz + b)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .measures import (
    AffineMap,
    DiscreteMeasure,
    MonomialOrdering,
    as_points,
    enumerate_monomials,
    monomial_matrix,
    normalize_cloud,
)

log = logging.getLogger(__name__)

DEFAULT_RANK_TOL = 1e-8


class UnsupportedDimensionError(ValueError):
    """Raised by routines that only exist in one complex variable."""


# ---------------------------------------------------------------------------
# Moment matrices (test oracle, never the production path)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MomentMatrix:
    """Hermitian matrix of moments for the monomials alpha(0..k)."""

    entries: np.ndarray
    ordering: MonomialOrdering
    k: int
    exponents: tuple

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def rank(self, rank_tol: float = DEFAULT_RANK_TOL) -> int:
        """Numerical rank from singular values relative to the largest one."""
        s = np.linalg.svd(self.entries, compute_uv=False)
        if s[0] == 0:
            return 0
        return int(np.sum(s > rank_tol * s[0]))


def build_moment_matrix(measure: DiscreteMeasure, ordering: MonomialOrdering, k: int) -> MomentMatrix:
    """Return M with ``M[j, l] = sum_i t_i z_i^alpha(l) conj(z_i^alpha(j))``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    exps = enumerate_monomials(ordering, k + 1)
    V = monomial_matrix(measure.atoms, exps)
    M = (V.conj().T * measure.weights) @ V
    M = 0.5 * (M + M.conj().T)
    return MomentMatrix(M, ordering, k, tuple(exps))


# ---------------------------------------------------------------------------
# Basis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NullRecord:
    """Polynomial vanishing on the support, found while scanning monomial ``index``.

    ``coeffs`` are taken over the first ``index + 1`` scanned monomials in the
    normalized variables, scaled to leading coefficient 1. ``residual`` is the
    relative residual that triggered the skip (0 for records inherited from a
    smaller null monomial).
    """

    index: int
    exponent: tuple
    coeffs: np.ndarray
    residual: float


@dataclass(frozen=True)
class RecurrenceStep:
    # x_var * p~_parent = sum_m h[m] p~_m + r * p~_new
    parent: int
    var: int
    h: np.ndarray
    r: float


@dataclass(frozen=True, eq=False)
class OrthoBasis:
    """Orthonormal family p_0, ..., p_n of a discrete measure.

    Attributes
    ----------
    ordering : MonomialOrdering
        Ordering used for the scan.
    degree_indices : tuple of int
        Monomial index k_j at which p_j was created, strictly increasing.
    exponents : tuple
        Multi-indices of all scanned monomials.
    coeffs : ndarray, shape (len(exponents), n + 1)
        Upper-echelon coefficients of p~_j in the normalized variables.
    null_records : tuple of NullRecord
        Skipped monomials and their null-space polynomials.
    sample_values : ndarray, shape (N, n + 1)
        p_j evaluated on the atoms of ``measure``.
    defect : float
        Spectral norm of ``V* diag(t) V - I``.
    amap : AffineMap
        Normalization used during construction.
    complete : bool
        False when the rank ran out before ``n_target`` was reached.
    """

    ordering: MonomialOrdering
    degree_indices: tuple
    exponents: tuple
    coeffs: np.ndarray
    null_records: tuple
    sample_values: np.ndarray | None
    defect: float
    amap: AffineMap
    n_target: int
    rank_tol: float
    complete: bool
    recurrence: tuple | None = None
    measure: DiscreteMeasure | None = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.ordering.d

    @property
    def n(self) -> int:
        return len(self.degree_indices) - 1

    @property
    def size(self) -> int:
        return len(self.degree_indices)

    def __call__(self, z, method: str = "auto") -> np.ndarray:
        return evaluate_basis(self, z, method=method)

    def leading_coefficients(self) -> np.ndarray:
        return np.array([self.coeffs[k, j] for j, k in enumerate(self.degree_indices)])

    def truncated(self, n: int) -> "OrthoBasis":
        """First n + 1 polynomials of this family (still orthonormal)."""
        if not 0 <= n <= self.n:
            raise ValueError(f"cannot truncate a degree-{self.n} basis to {n}")
        kmax = self.degree_indices[n] + 1
        rec = None if self.recurrence is None else self.recurrence[:n]
        sv = None if self.sample_values is None else self.sample_values[:, : n + 1]
        defect = self.defect
        if sv is not None and self.measure is not None:
            defect = _defect(sv, self.measure.weights)
        return OrthoBasis(
            self.ordering,
            self.degree_indices[: n + 1],
            self.exponents[:kmax],
            self.coeffs[:kmax, : n + 1],
            tuple(r for r in self.null_records if r.index < kmax),
            sv,
            defect,
            self.amap,
            n,
            self.rank_tol,
            True,
            rec,
            self.measure,
        )

    def null_values(self, record: NullRecord, z) -> np.ndarray:
        """Evaluate a null-space record at points of the original space."""
        x = self.amap.apply(z)
        V = monomial_matrix(x, self.exponents[: record.index + 1])
        return V @ record.coeffs

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        def cpair(a):
            return [[float(v.real), float(v.imag)] for v in np.ravel(a)]

        out = {
            "d": self.d,
            "ordering": str(self.ordering),
            "n": self.n,
            "n_target": self.n_target,
            "complete": self.complete,
            "rank_tol": self.rank_tol,
            "defect": self.defect,
            "degree_indices": list(self.degree_indices),
            "exponents": [list(a) for a in self.exponents],
            "coefficients": [cpair(self.coeffs[:, j]) for j in range(self.size)],
            "null_records": [
                {
                    "index": r.index,
                    "exponent": list(r.exponent),
                    "coeffs": cpair(r.coeffs),
                    "residual": r.residual,
                }
                for r in self.null_records
            ],
            "affine_map": self.amap.to_dict(),
        }
        if self.recurrence is not None:
            out["recurrence"] = [
                {"parent": s.parent, "var": s.var, "h": cpair(s.h), "r": s.r}
                for s in self.recurrence
            ]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "OrthoBasis":
        def cvec(pairs):
            return np.array([complex(a, b) for a, b in pairs], dtype=complex)

        ordering = MonomialOrdering.parse(data["ordering"], int(data["d"]))
        coeffs = np.column_stack([cvec(c) for c in data["coefficients"]])
        rec = None
        if "recurrence" in data:
            rec = tuple(
                RecurrenceStep(s["parent"], s["var"], cvec(s["h"]), float(s["r"]))
                for s in data["recurrence"]
            )
        nulls = tuple(
            NullRecord(r["index"], tuple(r["exponent"]), cvec(r["coeffs"]), float(r["residual"]))
            for r in data["null_records"]
        )
        return cls(
            ordering,
            tuple(data["degree_indices"]),
            tuple(tuple(a) for a in data["exponents"]),
            coeffs,
            nulls,
            None,
            float(data["defect"]),
            AffineMap.from_dict(data["affine_map"]),
            int(data["n_target"]),
            float(data["rank_tol"]),
            bool(data["complete"]),
            rec,
            None,
        )


def _normalize(measure: DiscreteMeasure) -> tuple[DiscreteMeasure, AffineMap]:
    if measure.size >= 2:
        return normalize_cloud(measure)
    # one atom: move it to the origin and rescale the mass
    c = 1.0 / measure.total_mass
    amap = AffineMap(np.ones(measure.d), -measure.atoms[0], c)
    return DiscreteMeasure(amap.apply(measure.atoms), measure.weights * c), amap


def _defect(values: np.ndarray, weights: np.ndarray) -> float:
    G = (values.conj().T * weights) @ values
    return float(np.linalg.norm(G - np.eye(G.shape[0]), 2))


def _orthogonalize(Q: np.ndarray, v: np.ndarray, passes: int) -> tuple[np.ndarray, np.ndarray]:
    h = np.zeros(Q.shape[1], dtype=complex)
    for _ in range(passes):
        g = Q.conj().T @ v
        v = v - Q @ g
        h += g
    return v, h


def orthonormalize(
    measure: DiscreteMeasure,
    ordering: MonomialOrdering | None = None,
    n_target: int = 0,
    rank_tol: float = DEFAULT_RANK_TOL,
    *,
    passes: int = 2,
    candidates: str = "auto",
    scan_factor: int = 4,
) -> OrthoBasis:
    """Build p_0, ..., p_n orthonormal in L^2(measure).

    Parameters
    ----------
    measure : DiscreteMeasure
        The measure; it is normalized internally.
    ordering : MonomialOrdering, optional
        Defaults to graded-lex in the measure's dimension.
    n_target : int
        Requested index of the last polynomial.
    rank_tol : float
        A monomial is skipped when its residual norm is at most ``rank_tol``
        times the norm of the vector being orthogonalized.
    passes : int
        Number of Gram-Schmidt passes (2 re-orthogonalizes).
    candidates : {"auto", "arnoldi", "monomial"}
        ``"arnoldi"`` orthogonalizes ``x_j * p~_i`` where ``p~_i`` was created
        at the predecessor monomial ``alpha - e_j``; this spans the same space
        as the raw monomial and is far better conditioned. ``"monomial"`` uses
        the raw monomials. ``"auto"`` picks arnoldi for graded-lex orderings
        and monomials for tensor boxes (multiplying by a variable can leave
        the box).
    scan_factor : int
        At most ``scan_factor * (n_target + 1)`` monomials are scanned.

    Returns
    -------
    OrthoBasis
        ``complete`` is False when fewer than ``n_target + 1`` polynomials
        could be formed within the scan limit.
    """
    if ordering is None:
        ordering = MonomialOrdering("graded-lex", measure.d)
    if ordering.d != measure.d:
        raise ValueError(f"ordering is for C^{ordering.d}, measure lives in C^{measure.d}")
    if n_target < 0:
        raise ValueError("n_target must be >= 0")
    if n_target + 1 > measure.size:
        raise ValueError(
            f"n_target + 1 = {n_target + 1} exceeds the number of atoms {measure.size}"
        )
    if passes not in (1, 2):
        raise ValueError("passes must be 1 or 2")
    if candidates == "auto":
        candidates = "monomial" if ordering.kind == "tensor" else "arnoldi"
    if candidates not in ("arnoldi", "monomial"):
        raise ValueError(f"unknown candidate mode {candidates!r}")
    if candidates == "arnoldi" and ordering.kind == "tensor" and ordering.d > 1:
        raise ValueError("arnoldi candidates are not closed on tensor boxes")

    norm_measure, amap = _normalize(measure)
    x = norm_measure.atoms
    sq = np.sqrt(norm_measure.weights)
    N = x.shape[0]

    limit = scan_factor * (n_target + 1)
    if ordering.capacity is not None:
        limit = min(limit, ordering.capacity)
    exps = enumerate_monomials(ordering, limit)
    index_of = {a: k for k, a in enumerate(exps)}

    nmax = n_target + 1
    Q = np.zeros((N, nmax), dtype=complex)
    C = np.zeros((limit, nmax), dtype=complex)
    col_of: dict[int, int] = {}  # monomial index -> basis column
    null_of: dict[int, NullRecord] = {}
    degree_indices: list[int] = []
    recurrence: list[RecurrenceStep] = []
    m = 0

    for k, alpha in enumerate(exps):
        if m == nmax:
            break
        # inherited null: some alpha - e_i is already a leading null monomial
        inherited = None
        for i, a_i in enumerate(alpha):
            if a_i == 0:
                continue
            pred = index_of[alpha[:i] + (a_i - 1,) + alpha[i + 1 :]]
            if pred in null_of and candidates == "arnoldi":
                inherited = (pred, i)
                break
        if inherited is not None:
            pred, i = inherited
            rec = null_of[pred]
            coeffs = np.zeros(k + 1, dtype=complex)
            for q, c in enumerate(rec.coeffs):
                if c != 0:
                    beta = exps[q]
                    coeffs[index_of[beta[:i] + (beta[i] + 1,) + beta[i + 1 :]]] += c
            null_of[k] = NullRecord(k, alpha, coeffs, 0.0)
            continue

        if k == 0:
            v = sq.astype(complex)
            coef = np.zeros(limit, dtype=complex)
            coef[0] = 1.0
            parent = var = None
        elif candidates == "arnoldi":
            var = next(j for j, a in enumerate(alpha) if a > 0)
            parent_idx = index_of[alpha[:var] + (alpha[var] - 1,) + alpha[var + 1 :]]
            parent = col_of[parent_idx]
            v = x[:, var] * Q[:, parent]
            coef = np.zeros(limit, dtype=complex)
            for q in np.flatnonzero(C[:, parent]):
                beta = exps[q]
                coef[index_of[beta[:var] + (beta[var] + 1,) + beta[var + 1 :]]] = C[q, parent]
        else:
            v = sq * monomial_matrix(x, [alpha])[:, 0]
            coef = np.zeros(limit, dtype=complex)
            coef[k] = 1.0
            parent = var = None

        vnorm = np.linalg.norm(v)
        res, h = _orthogonalize(Q[:, :m], v, passes)
        r = np.linalg.norm(res)
        if vnorm == 0 or r <= rank_tol * vnorm:
            ncoef = coef[: k + 1] - C[: k + 1, :m] @ h
            lead = ncoef[k]
            null_of[k] = NullRecord(k, alpha, ncoef / lead, float(r / vnorm) if vnorm else 0.0)
            continue
        Q[:, m] = res / r
        C[:, m] = (coef - C[:, :m] @ h) / r
        # keep the leading coefficient exactly real positive
        C[k, m] = C[k, m].real
        col_of[k] = m
        degree_indices.append(k)
        if parent is not None:
            recurrence.append(RecurrenceStep(parent, var, h.copy(), float(r)))
        m += 1

    if m < nmax:
        log.warning("rank exhausted: built %d of %d polynomials", m, nmax)
    kmax = degree_indices[-1] + 1
    sample = np.sqrt(amap.mass_scale) * Q[:, :m] / sq[:, None]
    use_rec = candidates == "arnoldi" and len(recurrence) == m - 1
    basis = OrthoBasis(
        ordering=ordering,
        degree_indices=tuple(degree_indices),
        exponents=tuple(exps[:kmax]),
        coeffs=C[:kmax, :m].copy(),
        null_records=tuple(null_of[k] for k in sorted(null_of) if k < kmax),
        sample_values=sample,
        defect=_defect(sample, measure.weights),
        amap=amap,
        n_target=n_target,
        rank_tol=rank_tol,
        complete=m == nmax,
        recurrence=tuple(recurrence) if use_rec else None,
        measure=measure,
    )
    return basis


def evaluate_basis(basis: OrthoBasis, z, method: str = "auto") -> np.ndarray:
    """Values of (p_0, ..., p_n) at one point or at an (M, d) array of points.

    ``method`` is ``"recurrence"`` (replay the Gram-Schmidt recurrence),
    ``"coefficients"`` (monomials times echelon coefficients) or ``"auto"``
    (recurrence when stored). A single point returns a vector of length
    n + 1, several points an array of shape (M, n + 1).
    """
    single = np.ndim(z) == 0 or (np.ndim(z) == 1 and basis.d > 1 and np.shape(z)[0] == basis.d)
    pts = as_points(z, basis.d)
    x = basis.amap.apply(pts)
    if method == "auto":
        method = "recurrence" if basis.recurrence is not None else "coefficients"
    if method == "recurrence":
        if basis.recurrence is None:
            raise ValueError("this basis carries no recurrence")
        V = np.zeros((x.shape[0], basis.size), dtype=complex)
        V[:, 0] = basis.coeffs[0, 0]
        for j, step in enumerate(basis.recurrence, start=1):
            acc = x[:, step.var] * V[:, step.parent] - V[:, :j] @ step.h[:j]
            V[:, j] = acc / step.r
    elif method == "coefficients":
        V = monomial_matrix(x, basis.exponents) @ basis.coeffs
    else:
        raise ValueError(f"unknown evaluation method {method!r}")
    V *= np.sqrt(basis.amap.mass_scale)
    return V[0] if single else V


def orthogonality_defect(basis: OrthoBasis, measure: DiscreteMeasure | None = None) -> float:
    """Spectral norm of ``V* diag(t) V - I`` on the atoms of ``measure``."""
    measure = measure if measure is not None else basis.measure
    if measure is None:
        raise ValueError("no measure attached to this basis")
    if measure is basis.measure and basis.sample_values is not None:
        V = basis.sample_values
    else:
        V = evaluate_basis(basis, measure.atoms)
        V = V.reshape(measure.size, basis.size)
    return _defect(V, measure.weights)


# ---------------------------------------------------------------------------
# Univariate Arnoldi
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HessenbergOperator:
    """Upper Hessenberg H with ``z v_n(z) = v_{n+1}(z) H`` on the support.

    ``next_values`` holds p_{n+1} on the atoms, or None when the rank of the
    measure is exhausted (the last subdiagonal entry is then 0).
    """

    H: np.ndarray
    next_values: np.ndarray | None = None

    def subdiagonal(self) -> np.ndarray:
        return np.diag(self.H, -1).copy()

    def shift_residual(self, basis: OrthoBasis) -> float:
        V = basis.sample_values
        z = basis.measure.atoms[:, 0]
        nxt = self.next_values if self.next_values is not None else np.zeros(V.shape[0])
        W = np.column_stack([V, nxt])
        return float(np.max(np.abs(z[:, None] * V - W @ self.H)))


def arnoldi_univariate(
    measure: DiscreteMeasure, n: int, rank_tol: float = DEFAULT_RANK_TOL
) -> tuple[OrthoBasis, HessenbergOperator]:
    """Arnoldi process for z on L^2(measure), d = 1.

    Returns the orthonormal basis p_0..p_n and the (n+2) x (n+1) Hessenberg
    matrix of multiplication by z in the original variable.
    """
    if measure.d != 1:
        raise UnsupportedDimensionError(f"Arnoldi needs d = 1, got d = {measure.d}")
    basis = orthonormalize(
        measure, MonomialOrdering("graded-lex", 1), n, rank_tol, candidates="arnoldi"
    )
    m = basis.size
    Ht = np.zeros((m + 1, m), dtype=complex)
    for j, step in enumerate(basis.recurrence, start=1):
        Ht[:j, step.parent] = step.h[:j]
        Ht[j, step.parent] = step.r
    # one more step for the last column
    norm_measure, amap = _normalize(measure)
    sq = np.sqrt(norm_measure.weights)
    Q = basis.sample_values * sq[:, None] / np.sqrt(amap.mass_scale)
    v = norm_measure.atoms[:, 0] * Q[:, -1]
    res, h = _orthogonalize(Q, v, 2)
    r = np.linalg.norm(res)
    Ht[:m, m - 1] = h
    nxt = None
    if m < measure.size and r > rank_tol * np.linalg.norm(v):
        Ht[m, m - 1] = r
        nxt = np.sqrt(amap.mass_scale) * (res / r) / sq
    # x = B z + b  =>  z p = (x p - b p) / B
    B = amap.scale[0]
    b = amap.shift[0]
    H = (Ht - b * np.eye(m + 1, m)) / B
    return basis, HessenbergOperator(H, nxt)
