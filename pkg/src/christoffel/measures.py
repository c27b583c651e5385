"""Discrete measures in C^d, monomial orderings and point-cloud I/O."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MultiIndex = tuple  # tuple[int, ...] of length d


class CloudFormatError(ValueError):
    """Raised when a point-cloud file cannot be parsed."""


class DuplicateAtomError(ValueError):
    """Raised when a measure contains the same atom twice."""

    def __init__(self, pairs: Sequence[tuple[int, int]]):
        self.pairs = list(pairs)
        shown = ", ".join(f"{i}={j}" for i, j in self.pairs[:5])
        more = "" if len(self.pairs) <= 5 else f" (+{len(self.pairs) - 5} more)"
        super().__init__(f"duplicate atoms at indices {shown}{more}")


class CapacityError(ValueError):
    """Raised when more monomials are requested than an ordering holds."""


# ---------------------------------------------------------------------------
# Orderings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonomialOrdering:
    """Enumeration of multi-indices.

    ``kind`` is ``"graded-lex"`` (all of N^d, by total degree and then by
    decreasing leading exponents) or ``"tensor"`` (the box {0..degree}^d,
    listed in graded-lex order).
    """

    kind: str
    d: int
    degree: int | None = None

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if self.kind not in ("graded-lex", "tensor"):
            raise ValueError(f"unknown ordering kind {self.kind!r}")
        if self.kind == "tensor" and (self.degree is None or self.degree < 0):
            raise ValueError("tensor ordering needs a non-negative max partial degree")

    @classmethod
    def parse(cls, text: str, d: int) -> "MonomialOrdering":
        """Parse the CLI form ``graded-lex`` or ``tensor:<n>``."""
        text = text.strip()
        if text == "graded-lex":
            return cls("graded-lex", d)
        if text.startswith("tensor:"):
            try:
                n = int(text.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad tensor ordering {text!r}") from None
            return cls("tensor", d, n)
        raise ValueError(f"unknown ordering {text!r}")

    @property
    def capacity(self) -> int | None:
        if self.kind == "tensor":
            return (self.degree + 1) ** self.d
        return None

    def __str__(self) -> str:
        return self.kind if self.kind == "graded-lex" else f"tensor:{self.degree}"


def _homogeneous(d: int, k: int) -> list[tuple[int, ...]]:
    # exponents of total degree k, decreasing lexicographically
    out = []
    for combo in combinations_with_replacement(range(d), k):
        alpha = [0] * d
        for j in combo:
            alpha[j] += 1
        out.append(tuple(alpha))
    out.sort(reverse=True)
    return out


def enumerate_monomials(ordering: MonomialOrdering, count: int) -> list[MultiIndex]:
    """Return the first ``count`` multi-indices of ``ordering``.

    >>> enumerate_monomials(MonomialOrdering("graded-lex", 2), 4)
    [(0, 0), (1, 0), (0, 1), (2, 0)]
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    cap = ordering.capacity
    if cap is not None and count > cap:
        raise CapacityError(f"ordering {ordering} holds {cap} monomials, {count} requested")
    out: list[MultiIndex] = []
    k = 0
    while len(out) < count:
        for alpha in _homogeneous(ordering.d, k):
            if ordering.kind == "tensor" and max(alpha) > ordering.degree:
                continue
            out.append(alpha)
            if len(out) == count:
                break
        k += 1
    return out


def monomial_matrix(points: np.ndarray, exponents: Sequence[MultiIndex]) -> np.ndarray:
    """Evaluate the monomials ``z**alpha`` at points of shape (M, d)."""
    points = np.asarray(points, dtype=complex)
    exps = np.asarray(exponents, dtype=int).reshape(len(exponents), -1)
    out = np.ones((points.shape[0], len(exps)), dtype=complex)
    for j in range(exps.shape[1]):
        out *= points[:, j : j + 1] ** exps[None, :, j]
    return out


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------


def as_points(z, d: int | None = None) -> np.ndarray:
    """Coerce a point or list of points to a complex array of shape (M, d)."""
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if d == 1 else arr.reshape(1, -1)
    if d is not None and arr.shape[1] != d:
        raise ValueError(f"expected points in C^{d}, got shape {arr.shape}")
    return arr


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def find_duplicates(atoms: np.ndarray) -> list[tuple[int, int]]:
    seen: dict[bytes, int] = {}
    pairs = []
    for i, row in enumerate(np.ascontiguousarray(atoms)):
        key = row.tobytes()
        if key in seen:
            pairs.append((seen[key], i))
        else:
            seen[key] = i
    return pairs


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weighted point cloud sum_j t_j delta_{z_j} in C^d."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=complex)
        if atoms.ndim == 1:
            atoms = atoms.reshape(-1, 1)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if atoms.shape[0] == 0:
            raise ValueError("a measure needs at least one atom")
        if weights.shape[0] != atoms.shape[0]:
            raise ValueError("atoms and weights differ in length")
        if not np.all(np.isfinite(atoms)) or not np.all(np.isfinite(weights)):
            raise ValueError("atoms and weights must be finite")
        bad = np.flatnonzero(weights <= 0)
        if bad.size:
            raise ValueError(f"non-positive weight at index {int(bad[0])}")
        dups = find_duplicates(atoms)
        if dups:
            raise DuplicateAtomError(dups)
        object.__setattr__(self, "atoms", _readonly(atoms))
        object.__setattr__(self, "weights", _readonly(weights))

    @property
    def d(self) -> int:
        return self.atoms.shape[1]

    @property
    def size(self) -> int:
        return self.atoms.shape[0]

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @classmethod
    def uniform(cls, atoms) -> "DiscreteMeasure":
        atoms = np.asarray(atoms, dtype=complex)
        n = atoms.shape[0]
        return cls(atoms, np.full(n, 1.0 / n))

    def scaled(self, factor: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.atoms, self.weights * factor)

    def __add__(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        if other.d != self.d:
            raise ValueError("dimension mismatch")
        return DiscreteMeasure(
            np.vstack([self.atoms, other.atoms]),
            np.concatenate([self.weights, other.weights]),
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DiscreteMeasure)
            and self.atoms.shape == other.atoms.shape
            and np.array_equal(self.atoms, other.atoms)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class QuadratureMeasure(DiscreteMeasure):
    """Discrete measure standing in for a continuous one."""

    label: str = ""
    target_mass: float | None = None
    mass_tol: float = 1e-12

    def __post_init__(self):
        super().__post_init__()
        if self.target_mass is not None:
            if abs(self.total_mass - self.target_mass) > self.mass_tol * max(1.0, self.target_mass):
                raise ValueError(
                    f"quadrature mass {self.total_mass!r} misses target {self.target_mass!r}"
                )


# ---------------------------------------------------------------------------
# Affine normalisation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AffineMap:
    """z -> scale * z + shift (coordinate-wise), measure mass multiplied by ``mass_scale``.

    With this map, K^mu(z, w) = mass_scale * K^{mu~}(Bz + b, Bw + b).
    """

    scale: np.ndarray
    shift: np.ndarray
    mass_scale: float = 1.0

    def __post_init__(self):
        scale = np.asarray(self.scale, dtype=complex).reshape(-1)
        shift = np.asarray(self.shift, dtype=complex).reshape(-1)
        if scale.shape != shift.shape:
            raise ValueError("scale and shift differ in length")
        if np.any(scale == 0):
            raise ValueError("diagonal scale entries must be non-zero")
        if not self.mass_scale > 0:
            raise ValueError("mass scale must be positive")
        object.__setattr__(self, "scale", _readonly(scale))
        object.__setattr__(self, "shift", _readonly(shift))

    @classmethod
    def identity(cls, d: int) -> "AffineMap":
        return cls(np.ones(d), np.zeros(d), 1.0)

    @property
    def d(self) -> int:
        return self.scale.shape[0]

    def apply(self, z) -> np.ndarray:
        return as_points(z, self.d) * self.scale + self.shift

    def is_identity(self, tol: float = 0.0) -> bool:
        return (
            np.all(np.abs(self.scale - 1) <= tol)
            and np.all(np.abs(self.shift) <= tol)
            and abs(self.mass_scale - 1) <= tol
        )

    def to_dict(self) -> dict:
        return {
            "scale": [[v.real, v.imag] for v in self.scale],
            "shift": [[v.real, v.imag] for v in self.shift],
            "mass_scale": self.mass_scale,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AffineMap":
        return cls(
            [complex(*p) for p in data["scale"]],
            [complex(*p) for p in data["shift"]],
            float(data["mass_scale"]),
        )


def normalize_cloud(measure: DiscreteMeasure) -> tuple[DiscreteMeasure, AffineMap]:
    """Centre, rescale and renormalise a cloud.

    The result has unit mass, weighted coordinate means 0 and every coordinate
    of modulus at most 1. A coordinate in which all atoms agree keeps scale 1.
    """
    if measure.size < 2:
        raise ValueError("normalize_cloud needs at least two atoms")
    mass = measure.total_mass
    c = 1.0 / mass
    w = measure.weights * c
    mean = w @ measure.atoms
    spread = np.max(np.abs(measure.atoms - mean), axis=0)
    scale = np.where(spread > 0, 1.0 / np.where(spread > 0, spread, 1.0), 1.0)
    shift = -scale * mean
    amap = AffineMap(scale, shift, c)
    return DiscreteMeasure(amap.apply(measure.atoms), w), amap


def embed_real_pairs(points, weights=None) -> DiscreteMeasure:
    """Identify R^{2d} with C^d via (x_{2k-1}, x_{2k}) -> x_{2k-1} + i x_{2k}."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.shape[1] % 2:
        raise ValueError(f"real dimension {pts.shape[1]} is odd")
    z = pts[:, 0::2] + 1j * pts[:, 1::2]
    if weights is None:
        weights = np.full(z.shape[0], 1.0 / z.shape[0])
    return DiscreteMeasure(z, weights)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def _parse_csv(text: str) -> DiscreteMeasure:
    header = None
    rows: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        cells = [c.strip() for c in next(csv.reader([line]))]
        if header is None:
            header = cells
            ncoord = sum(1 for c in header if c != "weight")
            if ncoord == 0 or ncoord % 2 or (("weight" in header) and header[-1] != "weight"):
                raise CloudFormatError(f"line {lineno}: bad header {raw.strip()!r}")
            expected = []
            for k in range(1, ncoord // 2 + 1):
                expected += [f"re{k}", f"im{k}"]
            if header[:ncoord] != expected:
                raise CloudFormatError(f"line {lineno}: expected header columns {expected}")
            continue
        if len(cells) != len(header):
            raise CloudFormatError(
                f"line {lineno}: expected {len(header)} fields, got {len(cells)}"
            )
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise CloudFormatError(f"line {lineno}: non-numeric field in {raw.strip()!r}") from None
    if header is None or not rows:
        raise CloudFormatError("no data rows")
    data = np.array(rows)
    has_weight = header[-1] == "weight"
    coords = data[:, :-1] if has_weight else data
    atoms = coords[:, 0::2] + 1j * coords[:, 1::2]
    weights = data[:, -1] if has_weight else np.full(len(rows), 1.0 / len(rows))
    return DiscreteMeasure(atoms, weights)


def _parse_json(text: str) -> DiscreteMeasure:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CloudFormatError(f"line {exc.lineno}: {exc.msg}") from None
    try:
        d = int(obj["d"])
        atoms = np.asarray(obj["atoms"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise CloudFormatError(f"bad cloud JSON: {exc}") from None
    if atoms.ndim == 2 and atoms.shape[1] == 2 and d == 1:
        atoms = atoms.reshape(-1, 1, 2)
    if atoms.ndim != 3 or atoms.shape[1:] != (d, 2):
        raise CloudFormatError(f"atoms must have shape (N, {d}, 2) or (N, 2) for d=1")
    z = atoms[..., 0] + 1j * atoms[..., 1]
    weights = obj.get("weights")
    if weights is None:
        weights = np.full(z.shape[0], 1.0 / z.shape[0])
    return DiscreteMeasure(z, np.asarray(weights, dtype=float))


def load_cloud(path, format: str | None = None) -> DiscreteMeasure:
    """Read a cloud from CSV (``re1,im1,...[,weight]``) or JSON."""
    path = Path(path)
    fmt = format or ("json" if path.suffix.lower() == ".json" else "csv")
    text = path.read_text(encoding="utf-8")
    if fmt == "csv":
        return _parse_csv(text)
    if fmt == "json":
        return _parse_json(text)
    raise ValueError(f"unknown cloud format {fmt!r}")


def cloud_to_csv(measure: DiscreteMeasure, with_weights: bool = True) -> str:
    buf = io.StringIO()
    header = []
    for k in range(1, measure.d + 1):
        header += [f"re{k}", f"im{k}"]
    if with_weights:
        header.append("weight")
    buf.write(",".join(header) + "\n")
    for z, t in zip(measure.atoms, measure.weights):
        cells = []
        for v in z:
            cells += [repr(float(v.real)), repr(float(v.imag))]
        if with_weights:
            cells.append(repr(float(t)))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def cloud_to_json(measure: DiscreteMeasure) -> dict:
    return {
        "d": measure.d,
        "atoms": [[[float(v.real), float(v.imag)] for v in z] for z in measure.atoms],
        "weights": [float(t) for t in measure.weights],
    }


def save_cloud(measure: DiscreteMeasure, path, format: str | None = None) -> None:
    path = Path(path)
    fmt = format or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt == "csv":
        path.write_text(cloud_to_csv(measure), encoding="utf-8")
    elif fmt == "json":
        path.write_text(json.dumps(cloud_to_json(measure)), encoding="utf-8")
    else:
        raise ValueError(f"unknown cloud format {fmt!r}")


def parse_points(text: str, d: int) -> np.ndarray:
    """Parse ``"1+2j,0.5;3,4j"`` style point lists: ';' separates points."""
    pts = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        vals = [complex(v.strip().replace(" ", "")) for v in chunk.split(",")]
        if len(vals) != d:
            raise ValueError(f"point {chunk!r} does not have {d} coordinates")
        pts.append(vals)
    if not pts:
        raise ValueError("empty point list")
    return np.array(pts, dtype=complex)


def iter_rows(points: Iterable) -> Iterable[np.ndarray]:
    for p in points:
        yield np.asarray(p, dtype=complex)
