"""Comparing kernels of nearby measures and of measures with added point masses."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .cdkernel import KernelEngine
from .measures import DiscreteMeasure, as_points
from .orthopoly import OrthoBasis, evaluate_basis

log = logging.getLogger(__name__)

COND_WARN = 1e12


class ClosenessError(ValueError):
    """Raised when a bound needs epsilon < 1 but the measures are too far apart."""


class SingularMassMatrixError(np.linalg.LinAlgError):
    """Raised when the cosine matrix of the mass points is singular."""


class DegenerateConfigurationError(ValueError):
    """Raised when the ratio function takes equal values at two mass points."""


class DomainError(ValueError):
    """Raised when |g| >= 1 at an input of an asymptotic formula."""


def _values(basis: OrthoBasis, z) -> np.ndarray:
    pts = as_points(z, basis.d)
    return evaluate_basis(basis, pts).reshape(pts.shape[0], basis.size)


# ---------------------------------------------------------------------------
# Modified moments and closeness
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModifiedMoments:
    """M(nu, mu)[j, l] = int p_l^mu conj(p_j^mu) dnu for the mu-orthonormal basis."""

    matrix: np.ndarray
    basis: OrthoBasis

    def mixed_factor(self) -> np.ndarray:
        """Upper triangular R with M = R* R."""
        return sla.cholesky(self.matrix, lower=False)

    def kernel(self, z, w=None) -> np.ndarray:
        """K_n^nu(z, w) = v^mu(z) M^{-1} v^mu(w)^*, elementwise over point arrays."""
        Vz = _values(self.basis, z)
        Vw = Vz if w is None else _values(self.basis, w)
        X = sla.solve(self.matrix, Vw.conj().T, assume_a="her")
        return np.einsum("ij,ji->i", Vz, X)


def modified_moments(basis: OrthoBasis, nu: DiscreteMeasure) -> ModifiedMoments:
    if nu.d != basis.d:
        raise ValueError("dimension mismatch")
    V = _values(basis, nu.atoms)
    M = (V.conj().T * nu.weights) @ V
    return ModifiedMoments(0.5 * (M + M.conj().T), basis)


@dataclass(frozen=True)
class ClosenessReport:
    epsilon: float  # spectral norm of M - I
    epsilon_frobenius: float

    @property
    def satisfied(self) -> bool:
        return self.epsilon < 1.0


def closeness(mm: ModifiedMoments | np.ndarray) -> ClosenessReport:
    M = mm.matrix if isinstance(mm, ModifiedMoments) else np.asarray(mm)
    E = M - np.eye(M.shape[0])
    return ClosenessReport(float(np.linalg.norm(E, 2)), float(np.linalg.norm(E, "fro")))


@dataclass(frozen=True, eq=False)
class TwoMeasureBounds:
    """Intervals guaranteed to hold K^mu given kernel values of nu."""

    lower: np.ndarray
    upper: np.ndarray
    epsilon: float

    @property
    def cosine_bound(self) -> float:
        return 2.0 * self.epsilon

    def contains(self, values, slack: float = 0.0) -> np.ndarray:
        v = np.asarray(values, dtype=float)
        scale = np.maximum(np.abs(self.upper), 1.0)
        return (v >= self.lower - slack * scale) & (v <= self.upper + slack * scale)


def two_measure_bounds(report: ClosenessReport, k_nu) -> TwoMeasureBounds:
    """[(1 - eps) K^nu, (1 + eps) K^nu] for diagonal values K^nu(z, z)."""
    if not report.satisfied:
        raise ClosenessError(f"epsilon = {report.epsilon:.3g} >= 1, no bound available")
    k = np.asarray(k_nu, dtype=float)
    eps = report.epsilon
    return TwoMeasureBounds((1 - eps) * k, (1 + eps) * k, eps)


def multipoint_bounds(report: ClosenessReport, ell: int) -> tuple[float, float]:
    """Loewner factors (1 - eps, 1 + eps) and the Frobenius cosine bound 2 sqrt(l(l-1)) eps."""
    if not report.satisfied:
        raise ClosenessError(f"epsilon = {report.epsilon:.3g} >= 1, no bound available")
    return 1 - report.epsilon, 2.0 * np.sqrt(ell * (ell - 1)) * report.epsilon


def loewner_contained(K_mu: np.ndarray, K_nu: np.ndarray, eps: float, tol: float = 1e-10) -> bool:
    """True when (1-eps) K_nu <= K_mu <= (1+eps) K_nu in the Loewner order."""
    scale = max(np.linalg.norm(K_nu, 2), 1.0)
    lo = np.linalg.eigvalsh(K_mu - (1 - eps) * K_nu).min()
    hi = np.linalg.eigvalsh((1 + eps) * K_nu - K_mu).min()
    return bool(lo >= -tol * scale and hi >= -tol * scale)


# ---------------------------------------------------------------------------
# Added point masses
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MassPerturbation:
    """sigma = sum_j t_j delta_{z_j} together with K_n^mu(z_j, z_j)."""

    masses: DiscreteMeasure
    diag: np.ndarray
    values: np.ndarray  # v_n^mu(z_j), one row per mass

    @classmethod
    def build(cls, engine: KernelEngine, masses: DiscreteMeasure) -> "MassPerturbation":
        if masses.d != engine.d:
            raise ValueError("dimension mismatch")
        V = engine.values(masses.atoms)
        diag = np.einsum("ij,ij->i", V, V.conj()).real
        return cls(masses, diag, V)

    @property
    def ell(self) -> int:
        return self.masses.size


@dataclass(frozen=True, eq=False)
class PerturbationReport:
    """Theorem-style data for K^{mu+sigma}(z, z) / K^mu(z, z) at one point z."""

    z: np.ndarray
    exact_ratio: float
    sigma: np.ndarray  # Sigma_0 .. Sigma_m
    C: np.ndarray
    b: np.ndarray
    D2: np.ndarray
    condition: float
    schur: float  # det C~ / det C
    cramer: float  # sum_j |det C_j|^2 / |det C|^2 / (t_j K_j)
    predictor: float | None = None

    def chain_ok(self, slack: float = 1e-12) -> bool:
        """Odd sums increase below the ratio, even sums decrease above it."""
        s = self.sigma
        r = self.exact_ratio
        odd = s[1::2]
        even = s[0::2]
        ok = np.all(np.diff(odd) >= -slack) and np.all(np.diff(even) <= slack)
        if odd.size:
            ok = ok and odd[-1] <= r + slack
        return bool(ok and even[-1] >= r - slack)

    def to_dict(self) -> dict:
        return {
            "z": [[float(v.real), float(v.imag)] for v in self.z],
            "exact_ratio": self.exact_ratio,
            "sigma_chain": [float(s) for s in self.sigma],
            "chain_ok": self.chain_ok(),
            "schur_quotient": self.schur,
            "cramer_sum": self.cramer,
            "condition": self.condition,
            "predictor": self.predictor,
        }


def _cosine_matrix(pert: MassPerturbation) -> np.ndarray:
    V = pert.values / np.sqrt(pert.diag)[:, None]
    C = V @ V.conj().T
    return 0.5 * (C + C.conj().T)


def exact_mass_ratio(
    engine: KernelEngine,
    pert: MassPerturbation,
    z,
    chain_depth: int = 3,
    g: Callable | None = None,
) -> PerturbationReport:
    """Exact ratio 1 - b (D^2 + C)^{-1} b^* and the alternating sums Sigma_0..Sigma_m.

    Parameters
    ----------
    engine : KernelEngine
        Kernel of the unperturbed measure mu.
    pert : MassPerturbation
        The added masses.
    z : point of C^d
    chain_depth : int
        Last index m of the computed sums.
    g : callable, optional
        Ratio function; when given the asymptotic predictor is attached.
    """
    pts = as_points(z, engine.d)
    if pts.shape[0] != 1:
        raise ValueError("exact_mass_ratio takes a single point")
    C = _cosine_matrix(pert)
    cond = float(np.linalg.cond(C))
    if not np.isfinite(cond) or cond > 1e15:
        raise SingularMassMatrixError(
            f"cosine matrix of the masses is singular (cond {cond:.2e}) at points "
            + ", ".join(str(tuple(p)) for p in pert.masses.atoms)
        )
    if cond > COND_WARN:
        warnings.warn(f"cosine matrix of the masses is ill-conditioned (cond {cond:.2e})")
    vz = engine.values(pts)[0]
    kz = float(np.vdot(vz, vz).real)
    if kz <= 0:
        raise ValueError("K_n(z, z) vanishes, the ratio is undefined")
    Vn = pert.values / np.sqrt(pert.diag)[:, None]
    b = (vz @ Vn.conj().T) / np.sqrt(kz)
    D2 = 1.0 / (pert.masses.weights * pert.diag)

    A = C + np.diag(D2)
    x = sla.solve(A, b.conj(), assume_a="her")
    ratio = float(1.0 - np.real(b @ x))
    hit = np.flatnonzero(np.all(pert.masses.atoms == pts[0], axis=1))
    if hit.size:
        # at z = z_m the row b equals the m-th row of C = A - D^2, and the
        # ratio collapses to D_m^2 (1 - D_m^2 (A^{-1})_mm) without cancellation
        m = int(hit[0])
        e = np.zeros(pert.ell)
        e[m] = 1.0
        inv_mm = float(np.real(sla.solve(A, e, assume_a="her")[m]))
        ratio = float(D2[m] * (1.0 - D2[m] * inv_mm))

    # Sigma_m = 1 - sum_{j<m} (-1)^j b C^{-1} (D^2 C^{-1})^j b^*
    cf = sla.cho_factor(C)
    y = sla.cho_solve(cf, b.conj())  # C^{-1} b^*
    sig = [1.0]
    acc = 0.0
    for j in range(chain_depth):
        acc += (-1) ** j * float(np.real(b @ y))
        sig.append(1.0 - acc)
        y = sla.cho_solve(cf, D2 * y)
    sig = np.array(sig)

    Ct = np.block([[C, b.conj()[:, None]], [b[None, :], np.ones((1, 1))]])
    detC = np.linalg.det(C)
    schur = float(np.real(np.linalg.det(Ct) / detC))
    cramer = 0.0
    for j in range(pert.ell):
        Cj = C.copy()
        Cj[j, :] = b
        cramer += abs(np.linalg.det(Cj)) ** 2 / abs(detC) ** 2 * D2[j]

    pred = None
    if g is not None:
        pred = asymptotic_ratio_predictor(g, pert.masses, pts[0]).ratio
    return PerturbationReport(pts[0], ratio, sig, C, b, D2, cond, schur, float(cramer), pred)


@dataclass(frozen=True)
class RatioPrediction:
    """Limit of K^{mu+sigma}/K^mu; at a mass point also the limit of K^{mu+sigma}(z_m, z_m)."""

    ratio: float
    kernel_at_mass: float | None = None
    mass_index: int | None = None


def asymptotic_ratio_predictor(g: Callable, masses: DiscreteMeasure, z) -> RatioPrediction:
    """|prod_j (g(z) - g(z_j)) / (1 - g(z) conj(g(z_j)))|^2, or 1/t_m at z = z_m."""
    zs = as_points(masses.atoms, masses.d)[:, 0]
    zz = complex(as_points(z, masses.d)[0, 0])
    gj = np.array([complex(g(v)) for v in zs])
    for i in range(len(gj)):
        for k in range(i + 1, len(gj)):
            if gj[i] == gj[k]:
                raise DegenerateConfigurationError(f"g takes the same value at masses {i} and {k}")
    if np.any(np.abs(gj) >= 1):
        raise DomainError("|g| >= 1 at a mass point")
    hit = np.flatnonzero(zs == zz)
    if hit.size:
        m = int(hit[0])
        return RatioPrediction(0.0, 1.0 / float(masses.weights[m]), m)
    gz = complex(g(zz))
    if abs(gz) >= 1:
        raise DomainError(f"|g(z)| = {abs(gz):.6g} >= 1")
    blaschke = np.prod((gz - gj) / (1 - gz * gj.conj()))
    return RatioPrediction(float(abs(blaschke) ** 2))


# ---------------------------------------------------------------------------
# Cosine asymptotics and Pick determinants
# ---------------------------------------------------------------------------


def pick_matrix(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return 1.0 / (1.0 - np.outer(a, b.conj()))


def pick_determinant(a, b) -> complex:
    """Closed form of det(1 / (1 - a_j conj(b_k)))."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("a and b need the same length")
    num = 1.0 + 0j
    for k in range(a.size):
        for j in range(k):
            num *= (a[k] - a[j]) * (b[k].conj() - b[j].conj())
    return complex(num / np.prod(1.0 - np.outer(a, b.conj())))


@dataclass(frozen=True)
class CosineAsymptotic:
    modulus: float
    determinant_ratio: float | None = None


def cosine_asymptotic(g: Callable, z, w, z_list=None, w_list=None) -> CosineAsymptotic:
    """Limits of |C_n(z, w)| and of the multi-point determinant quotient.

    With ``gz = g(z)`` and ``gw = g(w)`` the modulus is
    sqrt((1 - |gz|^2)(1 - |gw|^2)) / |1 - gz conj(gw)|. When both point lists
    are given, the quotient |det C(z_1..z_l, z; w_1..w_l, w)| / |det C(z_1..; w_1..)|
    tends to the modulus times the two Blaschke-type products.
    """
    gz, gw = complex(g(z)), complex(g(w))
    for v in (gz, gw):
        if abs(v) >= 1:
            raise DomainError(f"|g| = {abs(v):.6g} >= 1")
    mod = np.sqrt((1 - abs(gz) ** 2) * (1 - abs(gw) ** 2)) / abs(1 - gz * gw.conjugate())
    det_ratio = None
    if z_list is not None and w_list is not None:
        gzs = np.array([complex(g(v)) for v in z_list])
        gws = np.array([complex(g(v)) for v in w_list])
        if len(gzs) != len(gws):
            raise ValueError("point lists differ in length")
        if np.any(np.abs(gzs) >= 1) or np.any(np.abs(gws) >= 1):
            raise DomainError("|g| >= 1 on a point list")
        pz = np.prod((gz - gzs) / (1 - gz * gzs.conj()))
        pw = np.prod((gw - gws) / (1 - gws * gw.conjugate()))
        det_ratio = float(mod * abs(pz * pw))
    return CosineAsymptotic(float(mod), det_ratio)


def brute_force_ratio(measure: DiscreteMeasure, masses: DiscreteMeasure, n: int, z, **kwargs) -> np.ndarray:
    """K^{mu+sigma}_n(z, z) / K^mu_n(z, z) by re-orthonormalizing the augmented cloud."""
    from .orthopoly import orthonormalize

    base = KernelEngine(orthonormalize(measure, None, n, **kwargs))
    aug = KernelEngine(orthonormalize(measure + masses, None, n, **kwargs))
    return aug.diagonal(z) / base.diagonal(z)
