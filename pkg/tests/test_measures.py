import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from christoffel.measures import (
    AffineMap,
    CapacityError,
    CloudFormatError,
    DiscreteMeasure,
    DuplicateAtomError,
    MonomialOrdering,
    QuadratureMeasure,
    cloud_to_csv,
    embed_real_pairs,
    enumerate_monomials,
    load_cloud,
    monomial_matrix,
    normalize_cloud,
    parse_points,
    save_cloud,
)


class TestOrdering:
    def test_graded_lex_prefix(self):
        got = enumerate_monomials(MonomialOrdering("graded-lex", 2), 10)
        assert got == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)]

    def test_graded_lex_three_variables(self):
        got = enumerate_monomials(MonomialOrdering("graded-lex", 3), 5)
        assert got == [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (2, 0, 0)]

    def test_univariate_is_powers(self):
        assert enumerate_monomials(MonomialOrdering("graded-lex", 1), 4) == [(0,), (1,), (2,), (3,)]

    def test_tensor_box(self):
        o = MonomialOrdering("tensor", 2, 2)
        got = enumerate_monomials(o, o.capacity)
        assert len(got) == 9
        assert max(max(a) for a in got) == 2
        assert got[-1] == (2, 2)
        # graded within the box
        assert [sum(a) for a in got] == sorted(sum(a) for a in got)

    def test_tensor_capacity(self):
        o = MonomialOrdering("tensor", 2, 1)
        with pytest.raises(CapacityError):
            enumerate_monomials(o, 5)

    @pytest.mark.parametrize("text,kind,deg", [("graded-lex", "graded-lex", None), ("tensor:3", "tensor", 3)])
    def test_parse(self, text, kind, deg):
        o = MonomialOrdering.parse(text, 2)
        assert (o.kind, o.degree) == (kind, deg)
        assert str(o) == text

    @pytest.mark.parametrize("text", ["lex", "tensor:x", "tensor:-1"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            MonomialOrdering.parse(text, 2)

    def test_monomial_matrix(self):
        z = np.array([[2.0, 1j]])
        V = monomial_matrix(z, [(0, 0), (1, 0), (1, 2), (0, 3)])
        np.testing.assert_allclose(V[0], [1, 2, -2, -1j])


class TestDiscreteMeasure:
    def test_basic(self):
        mu = DiscreteMeasure([1, 2j, -1], [0.5, 0.25, 0.25])
        assert mu.d == 1 and mu.size == 3
        assert mu.total_mass == pytest.approx(1.0)
        assert not mu.atoms.flags.writeable

    def test_rejects_nonpositive_weight(self):
        with pytest.raises(ValueError, match="index 1"):
            DiscreteMeasure([1, 2], [1.0, 0.0])

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            DiscreteMeasure([1, np.nan], [1.0, 1.0])

    def test_duplicates_reported(self):
        with pytest.raises(DuplicateAtomError) as info:
            DiscreteMeasure([1, 2, 1], [1, 1, 1])
        assert info.value.pairs == [(0, 2)]

    def test_add_and_scale(self):
        a = DiscreteMeasure.uniform([0, 1])
        b = DiscreteMeasure([2j], [3.0])
        c = a + b
        assert c.size == 3 and c.total_mass == pytest.approx(4.0)
        assert a.scaled(2).total_mass == pytest.approx(2.0)
        assert a == DiscreteMeasure.uniform([0, 1])

    def test_quadrature_mass_check(self):
        QuadratureMeasure([0, 1], [0.5, 0.5], label="x", target_mass=1.0)
        with pytest.raises(ValueError, match="misses target"):
            QuadratureMeasure([0, 1], [0.5, 0.6], label="x", target_mass=1.0)

    def test_embed_real_pairs(self):
        mu = embed_real_pairs([[1, 2, 3, 4]])
        np.testing.assert_array_equal(mu.atoms, [[1 + 2j, 3 + 4j]])
        with pytest.raises(ValueError, match="odd"):
            embed_real_pairs([[1, 2, 3]])


class TestNormalize:
    def test_properties(self):
        rng = np.random.default_rng(0)
        z = 5 + 3j + 10 * (rng.normal(size=(40, 2)) + 1j * rng.normal(size=(40, 2)))
        mu = DiscreteMeasure(z, rng.uniform(1, 2, 40))
        nm, amap = normalize_cloud(mu)
        assert nm.total_mass == pytest.approx(1.0)
        np.testing.assert_allclose(nm.weights @ nm.atoms, 0, atol=1e-14)
        assert np.max(np.abs(nm.atoms)) == pytest.approx(1.0)
        assert amap.mass_scale == pytest.approx(1 / mu.total_mass)
        np.testing.assert_allclose(amap.apply(mu.atoms), nm.atoms)

    def test_degenerate_coordinate_keeps_scale(self):
        mu = DiscreteMeasure.uniform(np.c_[[0, 1, 2], [5, 5, 5]])
        _, amap = normalize_cloud(mu)
        assert amap.scale[1] == 1

    def test_affine_roundtrip(self):
        a = AffineMap([2, 1j], [1, 0], 0.5)
        assert AffineMap.from_dict(json.loads(json.dumps(a.to_dict()))).to_dict() == a.to_dict()
        assert AffineMap.identity(2).is_identity()


class TestFiles:
    def test_csv_roundtrip(self, tmp_path):
        mu = DiscreteMeasure([[1 + 2j, 0.5], [3, -1j]], [0.25, 0.75])
        p = tmp_path / "c.csv"
        save_cloud(mu, p)
        assert load_cloud(p) == mu

    def test_json_roundtrip(self, tmp_path):
        mu = DiscreteMeasure([1 + 2j, -3j], [0.25, 0.75])
        p = tmp_path / "c.json"
        save_cloud(mu, p)
        assert load_cloud(p) == mu

    def test_csv_without_weights(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("re1,im1\n0,0\n1,0\n")
        assert load_cloud(p).weights.tolist() == [0.5, 0.5]

    @pytest.mark.parametrize(
        "text,line",
        [
            ("re1,im1\n0,0\n1\n", 3),
            ("re1,im1,weight\n0,0,1\n1,x,1\n", 3),
            ("re1,weight\n0,1\n", 1),
        ],
    )
    def test_csv_errors_carry_line(self, tmp_path, text, line):
        p = tmp_path / "bad.csv"
        p.write_text(text)
        with pytest.raises(CloudFormatError, match=f"line {line}"):
            load_cloud(p)

    def test_json_error_line(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{\n"d": 1,\n"atoms": [1, \n}')
        with pytest.raises(CloudFormatError, match="line"):
            load_cloud(p)

    def test_csv_is_deterministic(self):
        mu = DiscreteMeasure([0.1, 0.2j], [1, 2])
        assert cloud_to_csv(mu) == cloud_to_csv(mu)

    def test_parse_points(self):
        np.testing.assert_array_equal(parse_points("1+2j,0.5;3,4j", 2), [[1 + 2j, 0.5], [3, 4j]])
        with pytest.raises(ValueError):
            parse_points("1,2,3", 2)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(1e-3, 10.0)),
        min_size=2,
        max_size=20,
        unique_by=lambda t: (t[0], t[1]),
    )
)
def test_csv_roundtrip_property(tmp_path_factory, rows):
    mu = DiscreteMeasure([complex(a, b) for a, b, _ in rows], [w for *_, w in rows])
    p = tmp_path_factory.mktemp("h") / "c.csv"
    save_cloud(mu, p)
    assert load_cloud(p) == mu
