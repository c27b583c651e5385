import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from christoffel.cdkernel import KernelEngine, cosine, multipoint
from christoffel.measures import DiscreteMeasure
from christoffel.perturb import (
    ClosenessError,
    DegenerateConfigurationError,
    DomainError,
    MassPerturbation,
    SingularMassMatrixError,
    asymptotic_ratio_predictor,
    brute_force_ratio,
    closeness,
    cosine_asymptotic,
    exact_mass_ratio,
    loewner_contained,
    modified_moments,
    multipoint_bounds,
    pick_determinant,
    pick_matrix,
    two_measure_bounds,
)
from christoffel.reference import quadrature


def _disk_cloud(seed, m=300):
    rng = np.random.default_rng(seed)
    return DiscreteMeasure.uniform(np.sqrt(rng.random(m)) * np.exp(2j * np.pi * rng.random(m)))


@pytest.fixture(scope="module")
def setup():
    mu = _disk_cloud(0)
    masses = DiscreteMeasure([1.4, -1.1 + 0.8j, 0.2 - 1.5j], [0.02, 0.01, 0.03])
    eng = KernelEngine.fit(mu, 12)
    return mu, masses, eng, MassPerturbation.build(eng, masses)


def test_exact_matches_brute_force(setup):
    mu, masses, eng, pert = setup
    z = np.array([0.1 + 0.2j, 1.9, -2j, 1.4, 0.2 - 1.5j])
    exact = np.array([exact_mass_ratio(eng, pert, v).exact_ratio for v in z])
    np.testing.assert_allclose(exact, brute_force_ratio(mu, masses, 12, z), rtol=1e-9)


def test_schur_and_cramer_forms(setup):
    _, _, eng, pert = setup
    for z in (0.5, 1.8 + 0.3j, -1.5j):
        r = exact_mass_ratio(eng, pert, z)
        assert r.schur == pytest.approx(r.sigma[1], abs=1e-10)
        assert r.cramer == pytest.approx(r.sigma[2] - r.sigma[1], rel=1e-8, abs=1e-12)
        assert r.chain_ok()
        assert 0 <= r.exact_ratio <= 1


def test_single_mass_closed_form():
    mu = _disk_cloud(1)
    eng = KernelEngine.fit(mu, 8)
    masses = DiscreteMeasure([1.3j], [0.05])
    pert = MassPerturbation.build(eng, masses)
    z = 0.7 - 0.9j
    c = cosine(eng, z, 1.3j)
    D2 = 1 / (0.05 * eng.diagonal(1.3j)[0])
    expected = 1 - abs(c) ** 2 / (1 + D2)
    assert exact_mass_ratio(eng, pert, z).exact_ratio == pytest.approx(expected, rel=1e-12)


def test_ratio_at_mass_point_has_no_cancellation(setup):
    _, masses, eng, pert = setup
    at = exact_mass_ratio(eng, pert, 1.4).exact_ratio
    near = exact_mass_ratio(eng, pert, 1.4 + 1e-7).exact_ratio
    assert at == pytest.approx(near, rel=1e-4)
    assert 0 < at < 1


def test_chain_depth(setup):
    _, _, eng, pert = setup
    r = exact_mass_ratio(eng, pert, 1.7, chain_depth=6)
    assert r.sigma.shape == (7,) and r.sigma[0] == 1.0
    assert r.chain_ok()
    d = r.to_dict()
    assert d["chain_ok"] and len(d["sigma_chain"]) == 7


def test_kernel_decreases_under_added_mass(setup):
    mu, masses, _, _ = setup
    z = np.random.default_rng(2).normal(size=30) * 1.5 + 0j
    assert np.all(brute_force_ratio(mu, masses, 10, z) <= 1 + 1e-12)


def test_singular_cosine_matrix():
    eng = KernelEngine.fit(_disk_cloud(3), 0)
    pert = MassPerturbation.build(eng, DiscreteMeasure([2.0, 3.0], [0.1, 0.1]))
    with pytest.raises(SingularMassMatrixError, match="singular"):
        exact_mass_ratio(eng, pert, 0.5)


def test_predictor_disk():
    g = lambda z: 1 / z
    masses = DiscreteMeasure([2.0], [0.1])
    pred = asymptotic_ratio_predictor(g, masses, 4.0)
    assert pred.ratio == pytest.approx(abs((0.25 - 0.5) / (1 - 0.125)) ** 2)
    at = asymptotic_ratio_predictor(g, masses, 2.0)
    assert at.kernel_at_mass == pytest.approx(10.0) and at.mass_index == 0


def test_predictor_errors():
    g = lambda z: 1 / z
    with pytest.raises(DomainError):
        asymptotic_ratio_predictor(g, DiscreteMeasure([0.5], [1.0]), 3.0)
    with pytest.raises(DomainError):
        asymptotic_ratio_predictor(g, DiscreteMeasure([2.0], [1.0]), 0.5)
    with pytest.raises(DegenerateConfigurationError):
        asymptotic_ratio_predictor(lambda z: 0.5, DiscreteMeasure([2.0, 3.0], [1.0, 1.0]), 4.0)


def test_modified_moments_kernel():
    mu = _disk_cloud(4)
    rng = np.random.default_rng(5)
    nu = DiscreteMeasure(mu.atoms, mu.weights * rng.uniform(0.5, 1.5, mu.size))
    eng_mu = KernelEngine.fit(mu, 7)
    mm = modified_moments(eng_mu.basis, nu)
    z = np.array([0.2, 1.3j, -0.8 + 0.1j])
    np.testing.assert_allclose(mm.kernel(z).real, KernelEngine.fit(nu, 7).diagonal(z), rtol=1e-10)
    R = mm.mixed_factor()
    np.testing.assert_allclose(R.conj().T @ R, mm.matrix, atol=1e-12)


def test_closeness_zero_for_same_measure():
    mu = _disk_cloud(6)
    eng = KernelEngine.fit(mu, 6)
    rep = closeness(modified_moments(eng.basis, mu))
    assert rep.epsilon < 1e-12 and rep.satisfied


def test_closeness_bounds_and_loewner():
    mu = _disk_cloud(7)
    rng = np.random.default_rng(8)
    nu = DiscreteMeasure(mu.atoms, mu.weights * (1 + 0.2 * rng.uniform(-1, 1, mu.size)))
    n = 6
    eng_mu, eng_nu = KernelEngine.fit(mu, n), KernelEngine.fit(nu, n)
    rep = closeness(modified_moments(eng_mu.basis, nu))
    assert 0 < rep.epsilon < 1
    z = [0.3, 1.2j, -0.5 - 0.5j, 2.0]
    K_mu = multipoint(eng_mu, z).K
    K_nu = multipoint(eng_nu, z).K
    assert loewner_contained(K_mu, K_nu, rep.epsilon)
    b = two_measure_bounds(rep, np.diag(K_nu).real)
    assert np.all(b.contains(np.diag(K_mu).real))
    lo, frob = multipoint_bounds(rep, 4)
    assert lo == pytest.approx(1 - rep.epsilon)
    C_gap = multipoint(eng_mu, z).C - multipoint(eng_nu, z).C
    assert np.linalg.norm(C_gap, "fro") <= frob


def test_closeness_error():
    rep = closeness(np.diag([1.0, 2.5]))
    assert not rep.satisfied
    with pytest.raises(ClosenessError):
        two_measure_bounds(rep, [1.0])


def test_pick_single_and_errors():
    assert pick_determinant([0.5], [0.2j]) == pytest.approx(1 / (1 - 0.5 * np.conj(0.2j)))
    with pytest.raises(ValueError):
        pick_determinant([0.1, 0.2], [0.3])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10_000))
def test_pick_property(ell, seed):
    rng = np.random.default_rng(seed)
    a = 0.9 * np.sqrt(rng.random(ell)) * np.exp(2j * np.pi * rng.random(ell))
    b = 0.9 * np.sqrt(rng.random(ell)) * np.exp(2j * np.pi * rng.random(ell))
    direct = np.linalg.det(pick_matrix(a, b))
    assert abs(pick_determinant(a, b) - direct) <= 1e-10 * max(abs(direct), 1e-300)


def test_cosine_asymptotic_disk():
    n = 60
    eng = KernelEngine.fit(quadrature.disk_quadrature(n), n)
    z, w = 1.6, 1.3 + 0.9j
    pred = cosine_asymptotic(lambda v: 1 / v, z, w)
    assert abs(cosine(eng, z, w)) == pytest.approx(pred.modulus, rel=0.02)
    with_lists = cosine_asymptotic(lambda v: 1 / v, z, w, [2.0], [3j])
    assert 0 < with_lists.determinant_ratio < pred.modulus
    with pytest.raises(DomainError):
        cosine_asymptotic(lambda v: 1 / v, 0.5, 2.0)
