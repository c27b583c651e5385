"""Christoffel-Darboux kernels, orthonormal polynomials and leverage scores in C^d."""

from .measures import (
    AffineMap,
    CapacityError,
    CloudFormatError,
    DiscreteMeasure,
    DuplicateAtomError,
    MonomialOrdering,
    QuadratureMeasure,
    embed_real_pairs,
    enumerate_monomials,
    load_cloud,
    normalize_cloud,
    save_cloud,
)
from .orthopoly import (
    HessenbergOperator,
    MomentMatrix,
    OrthoBasis,
    arnoldi_univariate,
    build_moment_matrix,
    evaluate_basis,
    orthogonality_defect,
    orthonormalize,
)

__version__ = "0.1.0"
