import numpy as np
import pytest
from hypothesis import given, strategies as st

from ondemand_agents.cubic import (
    CubicPoly,
    char_poly,
    cubic_discriminant,
    cubic_roots,
    has_negative_real_eigenvalue,
    is_real_root,
    routh_hurwitz_cubic,
)


def sorted_roots(rs):
    return sorted(rs, key=lambda z: (round(z.real, 6), round(z.imag, 6)))


def residual_ok(c, roots):
    return all(abs(c(z)) <= 1e-8 * c.scale() for z in roots)


def backward_error_ok(c, roots, rtol=1e-12):
    # normwise backward error: z is an exact root of a nearby cubic
    return all(abs(c(z)) <= rtol * c.scale() * sum(abs(z) ** i for i in range(4))
               for z in roots)


def test_char_poly_identity():
    assert char_poly(np.eye(3)).coeffs == (1.0, -3.0, 3.0, -1.0)


def test_char_poly_matches_numpy_poly():
    rng = np.random.default_rng(0)
    for _ in range(50):
        M = rng.normal(size=(3, 3))
        assert char_poly(M).coeffs == pytest.approx(tuple(np.poly(M)), abs=1e-12)


def test_char_poly_shape_check():
    with pytest.raises(ValueError):
        char_poly(np.eye(2))


def test_routh_hurwitz_direct_inequality():
    assert not routh_hurwitz_cubic(CubicPoly(1, 1, 1, 2))
    assert routh_hurwitz_cubic(CubicPoly(1, 3, 3, 1))  # (s+1)^3
    with pytest.raises(ValueError):
        routh_hurwitz_cubic(CubicPoly(0, 1, 1, 1))
    with pytest.raises(ValueError):
        routh_hurwitz_cubic(CubicPoly(-1, 1, 1, 1))


def test_routh_hurwitz_against_eigenvalues():
    rng = np.random.default_rng(1)
    for _ in range(500):
        M = rng.normal(size=(3, 3)) - rng.uniform(0, 1.5) * np.eye(3)
        stable = bool(np.all(np.linalg.eigvals(M).real < 0))
        assert routh_hurwitz_cubic(char_poly(M)) == stable


def test_discriminant_examples():
    assert cubic_discriminant(CubicPoly(1, 0, -1, 0)) == 4
    assert cubic_discriminant(CubicPoly(1, -3, 3, -1)) == 0
    with pytest.raises(ValueError):
        cubic_discriminant(CubicPoly(0, 1, 2, 3))


def test_roots_factorable():
    roots = sorted_roots(cubic_roots(CubicPoly(1, 0, -1, 0)))
    assert [z.real for z in roots] == pytest.approx([-1, 0, 1], abs=1e-12)
    assert all(z.imag == 0 for z in roots)


def test_roots_triple():
    roots = cubic_roots(CubicPoly(1, -3, 3, -1))
    assert all(abs(z - 1) < 1e-12 for z in roots)


def test_roots_reject_non_cubic():
    with pytest.raises(ValueError):
        cubic_roots(CubicPoly(0, 1, 1, 1))


def test_roots_double_root():
    c = CubicPoly(1, -4, 5, -2)  # (s-1)^2 (s-2)
    roots = sorted_roots(cubic_roots(c))
    assert [z.real for z in roots] == pytest.approx([1, 1, 2], abs=1e-7)
    assert residual_ok(c, roots)


def test_roots_complex_pair():
    c = CubicPoly(1, 1, 1, 1)  # (s+1)(s^2+1)
    roots = sorted_roots(cubic_roots(c))
    expected = sorted_roots([-1, 1j, -1j])
    for z, e in zip(roots, expected):
        assert abs(z - e) < 1e-12


coef = st.floats(min_value=-100, max_value=100, allow_nan=False)


@given(st.floats(min_value=1.0, max_value=100), coef, coef, coef)
def test_roots_absolute_residual(a, b, c, d):
    poly = CubicPoly(a, b, c, d)
    assert residual_ok(poly, cubic_roots(poly))


@given(st.floats(min_value=0.01, max_value=100), coef, coef, coef)
def test_roots_residual_and_numpy_oracle(a, b, c, d):
    poly = CubicPoly(a, b, c, d)
    roots = cubic_roots(poly)
    assert backward_error_ok(poly, roots)
    ours = np.sort_complex(np.array(roots))
    ref = np.sort_complex(np.roots([a, b, c, d]))
    # a clustered pair can only be resolved to about sqrt(machine eps)
    assert np.allclose(np.sort(np.abs(ours)), np.sort(np.abs(ref)), atol=1e-4 * (1 + np.abs(ref).max()))


@given(st.lists(st.integers(-20, 20), min_size=3, max_size=3, unique=True))
def test_discriminant_positive_for_distinct_real_roots(rs):
    c = CubicPoly(*np.poly(rs))
    assert cubic_discriminant(c) > 0
    roots = cubic_roots(c)
    assert all(is_real_root(z) for z in roots)
    assert sorted(z.real for z in roots) == pytest.approx(sorted(rs), abs=1e-8)


@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(1, 20))
def test_discriminant_negative_for_complex_pair(r, re, im):
    c = CubicPoly(*np.real(np.poly([r, complex(re, im), complex(re, -im)])))
    assert cubic_discriminant(c) < 0
    roots = cubic_roots(c)
    assert sum(is_real_root(z) for z in roots) == 1


@given(st.integers(-20, 20), st.integers(-20, 20))
def test_discriminant_zero_for_repeated_root(r, s):
    c = CubicPoly(*np.poly([r, r, s]))
    assert cubic_discriminant(c) == 0


def test_negative_real_eigenvalue():
    assert has_negative_real_eigenvalue(CubicPoly(1, 0, -1, 0))
    assert not has_negative_real_eigenvalue(CubicPoly(1, -3, 3, -1))
    # complex pair with negative real part does not count
    assert not has_negative_real_eigenvalue(CubicPoly(*np.real(np.poly([2, -1 + 1j, -1 - 1j]))))
