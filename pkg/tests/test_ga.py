"""Geometric algebra: table-driven products against matrix-representation
oracles plus the usual structural identities."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cliffsurf.ga import (
    BLADE_NAMES_2,
    BLADE_NAMES_3,
    Multivector2,
    Multivector3,
    commutes_with_pseudoscalar,
    exp_pseudoscalar,
    geometric_product,
    geometric_product_field,
    pseudoscalar_square,
    vector_dot,
    wedge,
)
from conftest import matrix_gp_oracle

coeff = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
mv3 = st.tuples(*([coeff] * 8)).map(Multivector3)
mv2 = st.tuples(*([coeff] * 4)).map(Multivector2)


def test_blade_pair_products_match_matrix_oracle_3d():
    for i, j in itertools.product(range(8), repeat=2):
        a = np.zeros(8)
        b = np.zeros(8)
        a[i] = 1.0
        b[j] = 1.0
        got = (Multivector3(a) * Multivector3(b)).coeffs
        want = matrix_gp_oracle(a, b, dim=3)
        assert np.allclose(got, want, atol=1e-12), (BLADE_NAMES_3[i], BLADE_NAMES_3[j])


def test_blade_pair_products_match_matrix_oracle_2d():
    for i, j in itertools.product(range(4), repeat=2):
        a = np.zeros(4)
        b = np.zeros(4)
        a[i] = 1.0
        b[j] = 1.0
        got = (Multivector2(a) * Multivector2(b)).coeffs
        want = matrix_gp_oracle(a, b, dim=2)
        assert np.allclose(got, want, atol=1e-12), (BLADE_NAMES_2[i], BLADE_NAMES_2[j])


@given(mv3, mv3)
@settings(max_examples=50)
def test_random_products_match_matrix_oracle(a, b):
    got = (a * b).coeffs
    want = matrix_gp_oracle(a.coeffs, b.coeffs, dim=3)
    scale = max(1.0, np.abs(want).max())
    assert np.allclose(got, want, atol=1e-9 * scale)


@given(mv3, mv3, mv3)
@settings(max_examples=50)
def test_associativity(a, b, c):
    left = ((a * b) * c).coeffs
    right = (a * (b * c)).coeffs
    scale = max(1.0, np.abs(left).max(), np.abs(right).max())
    assert np.allclose(left, right, atol=1e-9 * scale)


@given(mv3, mv3, mv3)
@settings(max_examples=50)
def test_distributivity(a, b, c):
    left = (a * (b + c)).coeffs
    right = (a * b + a * c).coeffs
    scale = max(1.0, np.abs(left).max())
    assert np.allclose(left, right, atol=1e-9 * scale)


def test_basis_vector_anticommutativity():
    for dim, cls, names in ((2, Multivector2, ("e1", "e2")), (3, Multivector3, ("e1", "e2", "e3"))):
        for ni, nj in itertools.combinations(names, 2):
            ei, ej = cls.basis(ni), cls.basis(nj)
            assert (ei * ej + ej * ei).isclose(cls.zero())
        for n in names:
            e = cls.basis(n)
            assert (e * e).isclose(cls.from_scalar(1.0))


def test_inner_outer_recovery_from_product(rng):
    # for vectors: symmetric part is the dot, antisymmetric part the wedge
    for _ in range(100):
        u = rng.standard_normal(3)
        v = rng.standard_normal(3)
        a, b = Multivector3.from_vector(u), Multivector3.from_vector(v)
        sym = (a * b + b * a) * 0.5
        anti = (a * b + (b * a) * -1.0) * 0.5
        assert abs(sym.scalar - np.dot(u, v)) < 1e-12 * max(1.0, abs(np.dot(u, v)))
        assert np.allclose(sym.coeffs[1:], 0.0, atol=1e-12)
        assert anti.isclose(wedge(a, b), atol=1e-10)
        assert abs(vector_dot(a, b) - np.dot(u, v)) < 1e-10


@given(mv3, mv3)
@settings(max_examples=50)
def test_wedge_antisymmetric_on_vectors(a, b):
    u = Multivector3.from_vector(a.vector)
    v = Multivector3.from_vector(b.vector)
    assert wedge(u, v).isclose(wedge(v, u) * -1.0, atol=1e-6 * max(1.0, np.abs(u.coeffs).max() * np.abs(v.coeffs).max()))


def test_pseudoscalar_squares():
    assert pseudoscalar_square(2) == -1.0
    assert pseudoscalar_square(3) == -1.0
    i2 = Multivector2.basis("e12")
    i3 = Multivector3.basis("e123")
    assert (i2 * i2).isclose(Multivector2.from_scalar(-1.0))
    assert (i3 * i3).isclose(Multivector3.from_scalar(-1.0))


@given(mv3)
@settings(max_examples=1000, deadline=None)
def test_i3_central(m):
    i3 = Multivector3.basis("e123")
    left = (i3 * m).coeffs
    right = (m * i3).coeffs
    assert np.allclose(left, right, atol=1e-9 * max(1.0, np.abs(left).max()))


def test_i2_not_central():
    i2 = Multivector2.basis("e12")
    e1 = Multivector2.basis("e1")
    assert (i2 * e1).isclose(e1 * i2 * -1.0)
    assert not (i2 * e1).isclose(e1 * i2)


@pytest.mark.parametrize("dim", [2, 3])
@pytest.mark.parametrize("gamma", [0.0, 0.3, -1.2, np.pi / 2, 2 * np.pi])
def test_exp_pseudoscalar_is_rotor(dim, gamma):
    got = exp_pseudoscalar(gamma, dim)
    assert abs(got.scalar - np.cos(gamma)) < 1e-15
    assert abs(got.pseudoscalar - np.sin(gamma)) < 1e-15
    # angle addition comes for free from the product
    twice = got * got
    assert abs(twice.scalar - np.cos(2 * gamma)) < 1e-12
    assert abs(twice.pseudoscalar - np.sin(2 * gamma)) < 1e-12


@given(mv2)
@settings(max_examples=100)
def test_pseudoscalar_commutation_split(m):
    com, anti = commutes_with_pseudoscalar(m)
    i2 = Multivector2.basis("e12")
    assert (com + anti).isclose(m, atol=1e-9)
    scale = max(1.0, np.abs(m.coeffs).max())
    assert (i2 * com).isclose(com * i2, atol=1e-9 * scale)
    assert (i2 * anti).isclose(anti * i2 * -1.0, atol=1e-9 * scale)
    # scalar and bivector parts commute, vector part anticommutes
    assert com.coeffs[1] == com.coeffs[2] == 0.0
    assert anti.coeffs[0] == anti.coeffs[3] == 0.0


def test_geometric_product_field_matches_scalar_product(rng):
    a = rng.standard_normal((4, 5, 8))
    b = rng.standard_normal((4, 5, 8))
    out = geometric_product_field(a, b, dim=3)
    for idx in ((0, 0), (3, 4), (1, 2)):
        want = (Multivector3(a[idx]) * Multivector3(b[idx])).coeffs
        assert np.allclose(out[idx], want, atol=1e-12)


def test_multivector_basics():
    m = Multivector3((1.0, 2, 3, 4, 5, 6, 7, 8))
    assert m.scalar == 1.0
    assert np.array_equal(m.vector, [2.0, 3.0, 4.0])
    assert np.array_equal(m.bivector, [5.0, 6.0, 7.0])
    assert m.pseudoscalar == 8.0
    assert not m.is_vector()
    assert Multivector3.from_vector([1, 0, 0]).is_vector()
    assert (m / 2.0).isclose(m * 0.5)
    assert (m - m).isclose(Multivector3.zero())
    assert m == Multivector3((1.0, 2, 3, 4, 5, 6, 7, 8))
    with pytest.raises(TypeError):
        hash(m)
    with pytest.raises(ValueError):
        Multivector3((1.0, 2.0))
    with pytest.raises(ValueError):
        Multivector3.basis("e7")
    coeffs = m.coeffs
    with pytest.raises(ValueError):
        coeffs[0] = 99.0


def test_vector_dot_rejects_nonvectors():
    m = Multivector3((1.0, 0, 0, 0, 0, 0, 0, 0))
    v = Multivector3.from_vector([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        vector_dot(m, v)


def test_geometric_product_function_matches_operator(rng):
    a = Multivector3(rng.standard_normal(8))
    b = Multivector3(rng.standard_normal(8))
    assert geometric_product(a, b).isclose(a * b)
