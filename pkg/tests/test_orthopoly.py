import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from christoffel.measures import DiscreteMeasure, MonomialOrdering, enumerate_monomials
from christoffel.orthopoly import (
    OrthoBasis,
    UnsupportedDimensionError,
    arnoldi_univariate,
    build_moment_matrix,
    evaluate_basis,
    orthogonality_defect,
    orthonormalize,
)
from christoffel.sampling import cusp_curve, random_cloud, roots_of_unity

from oracles import gram_schmidt_values


@pytest.fixture(scope="module")
def cloud2():
    return random_cloud(np.random.default_rng(1), 100, 2)


def test_matches_high_precision_gram_schmidt(cloud2):
    n = 20
    basis = orthonormalize(cloud2, None, n)
    exps = enumerate_monomials(MonomialOrdering("graded-lex", 2), n + 1)
    ref = gram_schmidt_values(cloud2.atoms, cloud2.weights, exps)
    err = np.max(np.abs(basis.sample_values - ref)) / np.max(np.abs(ref))
    assert err < 1e-9


def test_defect_and_leading_coefficients(cloud2):
    basis = orthonormalize(cloud2, None, 20)
    assert basis.complete and basis.n == 20
    assert basis.defect < 1e-12
    lead = basis.leading_coefficients()
    assert np.all(lead.real > 0) and np.all(lead.imag == 0)
    assert list(basis.degree_indices) == list(range(21))


def test_evaluation_methods_agree(cloud2):
    basis = orthonormalize(cloud2, None, 14)
    z = np.random.default_rng(2).normal(size=(30, 2)) * (1 + 1j)
    a = evaluate_basis(basis, z, method="recurrence")
    b = evaluate_basis(basis, z, method="coefficients")
    assert np.max(np.abs(a - b)) / np.max(np.abs(a)) < 1e-10
    np.testing.assert_allclose(evaluate_basis(basis, cloud2.atoms), basis.sample_values, atol=1e-10)


def test_single_point_returns_vector(cloud2):
    basis = orthonormalize(cloud2, None, 5)
    assert evaluate_basis(basis, np.array([0.1, 0.2])).shape == (6,)
    assert evaluate_basis(basis, np.zeros((3, 2))).shape == (3, 6)


def test_random_cloud_n40_defect():
    mu = random_cloud(np.random.default_rng(0), 200, 2)
    assert orthonormalize(mu, None, 40).defect < 1e-10


def test_single_pass_is_worse():
    # a tight cluster plus a few far points makes the monomial columns nearly dependent
    rng = np.random.default_rng(3)
    z = np.r_[0.01 * (rng.normal(size=80) + 1j * rng.normal(size=80)), 3 * rng.normal(size=10)]
    mu = DiscreteMeasure.uniform(z)
    one = orthonormalize(mu, None, 40, passes=1)
    two = orthonormalize(mu, None, 40, passes=2)
    assert two.complete and two.defect < 1e-10
    assert one.defect > 1.0
    # raw monomials lose numerical rank long before degree 40
    assert not orthonormalize(mu, None, 40, candidates="monomial").complete


def test_cusp_null_record():
    mu = cusp_curve()
    basis = orthonormalize(mu, None, 20)
    exps = enumerate_monomials(MonomialOrdering("graded-lex", 2), 10)
    first = basis.null_records[0]
    assert first.index == 9 and exps[9] == (0, 3)
    # the null polynomial vanishes on the support and is z2^3 - z1^2 up to scale
    vals = basis.null_values(first, mu.atoms)
    assert np.max(np.abs(vals)) < 1e-10
    z = np.array([[0.3 + 0.1j, -0.4j]])
    expected = z[0, 1] ** 3 - z[0, 0] ** 2
    ratio = basis.null_values(first, z)[0] / expected
    other = np.array([[1.0 + 0j, 0.5]])
    assert basis.null_values(first, other)[0] / (0.5**3 - 1.0) == pytest.approx(ratio)
    assert all(k not in basis.degree_indices for k in (r.index for r in basis.null_records))
    assert np.all(np.diff(basis.degree_indices) > 0)


def test_inherited_null_records():
    basis = orthonormalize(cusp_curve(), None, 25)
    inherited = [r for r in basis.null_records if r.residual == 0.0]
    assert inherited, "multiples of a null monomial should be recorded without a sweep"
    for r in inherited:
        assert np.max(np.abs(basis.null_values(r, cusp_curve().atoms))) < 1e-9


def test_roots_of_unity_shift():
    N = 8
    basis, H = arnoldi_univariate(roots_of_unity(N), N - 1)
    # p_j(z) = z^j for the uniform measure on the N-th roots of unity
    z = np.array([2.0])
    np.testing.assert_allclose(evaluate_basis(basis, z)[0], 2.0 ** np.arange(N), rtol=1e-12)
    expected = np.zeros((N + 1, N))
    expected[1:N, : N - 1] = np.eye(N - 1)
    expected[0, N - 1] = 1.0  # z * z^(N-1) = 1 on the support
    np.testing.assert_allclose(H.H, expected, atol=1e-12)
    assert H.next_values is None
    assert H.shift_residual(basis) < 1e-12


def test_arnoldi_hessenberg_relation():
    rng = np.random.default_rng(4)
    mu = DiscreteMeasure.uniform(3 + 2j + rng.normal(size=50) + 1j * rng.normal(size=50))
    basis, H = arnoldi_univariate(mu, 12)
    assert H.H.shape == (14, 13)
    assert np.allclose(np.tril(H.H, -2), 0)
    assert np.all(np.abs(H.subdiagonal()) > 0)
    assert H.shift_residual(basis) < 1e-10


def test_arnoldi_rejects_multivariate(cloud2):
    with pytest.raises(UnsupportedDimensionError):
        arnoldi_univariate(cloud2, 3)


def test_rank_exhaustion():
    mu = DiscreteMeasure.uniform([0, 1, 2j])
    with pytest.raises(ValueError, match="exceeds"):
        orthonormalize(mu, None, 3)
    # three atoms on a line in C^2: z2 = 0 is a null monomial
    line = DiscreteMeasure.uniform(np.c_[[0, 1, 2, 3], [0, 0, 0, 0]])
    basis = orthonormalize(line, None, 3)
    assert basis.complete
    assert basis.null_records[0].exponent == (0, 1)


def test_moment_matrix_rank_rule(cloud2):
    # rank of the moment matrix through k equals the number of polynomials built
    mu = cusp_curve()
    o = MonomialOrdering("graded-lex", 2)
    basis = orthonormalize(mu, o, 20)
    for k in (5, 9, 12, 15):
        kept = sum(1 for j in basis.degree_indices if j <= k)
        assert build_moment_matrix(mu, o, k).rank() == kept
    M = build_moment_matrix(cloud2, o, 5)
    np.testing.assert_allclose(M.entries, M.entries.conj().T)
    assert M.eigenvalues().min() > 0


def test_tensor_ordering_full_box():
    from christoffel.reference.quadrature import chebyshev_tensor_quadrature

    q = chebyshev_tensor_quadrature(3)
    o = MonomialOrdering("tensor", 2, 3)
    basis = orthonormalize(q, o, 15)
    assert basis.complete and basis.recurrence is None
    assert basis.defect < 1e-12
    with pytest.raises(ValueError, match="arnoldi"):
        orthonormalize(q, o, 15, candidates="arnoldi")


def test_truncation_and_serialization(cloud2):
    basis = orthonormalize(cloud2, None, 12)
    small = basis.truncated(6)
    z = np.array([[0.3, -0.2j], [1.0, 1.0]])
    np.testing.assert_allclose(evaluate_basis(small, z), evaluate_basis(basis, z)[:, :7])
    again = OrthoBasis.from_dict(json.loads(json.dumps(basis.to_dict())))
    np.testing.assert_allclose(evaluate_basis(again, z), evaluate_basis(basis, z), rtol=1e-13)
    assert orthogonality_defect(basis) == pytest.approx(basis.defect)
    assert orthogonality_defect(again, cloud2) < 1e-12


def test_affine_invariance():
    rng = np.random.default_rng(5)
    mu = random_cloud(rng, 40, 1)
    moved = DiscreteMeasure(7 - 2j + 30 * mu.atoms, mu.weights * 4)
    a = orthonormalize(mu, None, 8)
    b = orthonormalize(moved, None, 8)
    z = rng.normal(size=5) + 0j
    Ka = np.sum(np.abs(evaluate_basis(a, z)) ** 2, axis=1)
    Kb = np.sum(np.abs(evaluate_basis(b, 7 - 2j + 30 * z)) ** 2, axis=1)
    np.testing.assert_allclose(Kb, Ka / 4, rtol=1e-10)


def test_single_atom():
    basis = orthonormalize(DiscreteMeasure([3 + 1j], [2.0]), None, 0)
    assert evaluate_basis(basis, np.array([5.0]))[0] == pytest.approx(1 / np.sqrt(2))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(0, 9))
def test_orthonormal_on_random_clouds(seed, d, n):
    mu = random_cloud(np.random.default_rng(seed), 30, d)
    basis = orthonormalize(mu, None, n)
    assert basis.defect < 1e-10
    assert np.all(np.diff(basis.degree_indices) > 0)
