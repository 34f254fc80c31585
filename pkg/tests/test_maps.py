import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holodyn.maps import (
    INFINITY,
    CommonRootError,
    PolynomialMap,
    RationalMap,
    critical_points,
    derivative_map,
    eval_derivative,
    eval_map,
    fixed_points,
    is_infinity,
    orbit,
    postcritical_set,
)

MATING_C = (1 + cmath.sqrt(-3)) / 2


def test_eval_quadratic_constant_term():
    assert eval_map(PolynomialMap.quadratic(-1), 0) == -1


def test_mating_pole_and_infinity(mating):
    assert is_infinity(eval_map(mating, 1))
    assert eval_map(mating, INFINITY) == pytest.approx(1)


def test_polynomial_fixes_infinity():
    assert is_infinity(eval_map(PolynomialMap.quadratic(0.3), INFINITY))


def test_derivative_examples(mating):
    assert derivative_map(PolynomialMap.quadratic(0.7)).coefficients == (0, 2)
    a = 0.5j
    assert derivative_map(PolynomialMap((0, a, 0, 1))).coefficients == (a, 0, 3)
    num = derivative_map(mating).numerator
    expected = np.polynomial.Polynomial([0, 2 * (-1 - MATING_C)])
    np.testing.assert_allclose(num.coefficients, expected.coef, atol=1e-14)


def test_critical_points_examples(mating):
    assert list(critical_points(PolynomialMap.quadratic(0.25))) == [0]
    a = 2j
    crit = sorted(critical_points(PolynomialMap((0, a, 0, 1))), key=lambda z: z.real)
    w = cmath.sqrt(-a / 3)
    assert min(abs(crit[0] - w), abs(crit[0] + w)) < 1e-12
    assert abs(crit[0] + crit[1]) < 1e-12
    mc = list(critical_points(mating))
    assert sum(is_infinity(z) for z in mc) == 1
    assert any(abs(z) < 1e-12 for z in mc if not is_infinity(z))


def test_orbit_examples(intertwined):
    o = orbit(PolynomialMap.quadratic(0), 0.5, 10, 4)
    assert not o.escaped and abs(o.points[-1]) < 1e-9
    o = orbit(PolynomialMap.quadratic(0), 2, 10, 4)
    assert o.escaped and o.escape_index == 1 and o.points[1] == 4
    o = orbit(intertwined, 0.5, 50)
    assert o.cycle_detected == (0, 2)
    assert o.points[1] == pytest.approx(complex(-0.25, math.sqrt(7) / 4), abs=1e-12)


def test_postcritical_examples():
    assert list(postcritical_set(PolynomialMap.quadratic(0), 5)) == [0]
    got = sorted(postcritical_set(PolynomialMap.quadratic(-1), 5), key=lambda z: z.real)
    np.testing.assert_allclose(got, [-1, 0], atol=1e-12)
    got = sorted(postcritical_set(PolynomialMap.quadratic(-2), 5), key=lambda z: z.real)
    np.testing.assert_allclose(got, [-2, 2], atol=1e-12)


def test_common_root_rejected():
    with pytest.raises(CommonRootError):
        RationalMap(PolynomialMap((-1, 0, 1)), PolynomialMap((-1, 1)))


def test_fixed_points_of_quadratic():
    fps = fixed_points(PolynomialMap.quadratic(-2))
    np.testing.assert_allclose(sorted(fp.real for fp in fps), [-1, 2], atol=1e-12)


def test_rational_chart_near_infinity(mating):
    assert eval_map(mating, 1e12) == pytest.approx(1, abs=1e-9)


coeff = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)
points = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(coeff, min_size=2, max_size=5).filter(lambda c: abs(c[-1]) > 0.1), points)
def test_derivative_matches_finite_differences(cs, z):
    f = PolynomialMap(tuple(cs) + (1,))
    h = 1e-6
    fd = (eval_map(f, z + h) - eval_map(f, z - h)) / (2 * h)
    exact = eval_derivative(f, z)
    assert abs(fd - exact) <= 1e-6 * max(1.0, abs(exact))


@settings(max_examples=40, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=5).filter(lambda c: abs(c[-1]) > 0.1))
def test_critical_points_are_critical(cs):
    f = PolynomialMap((0.3,) + tuple(cs))
    if f.degree < 2:
        return
    df = derivative_map(f)
    scale = max(abs(c) for c in df.coefficients)
    for c in critical_points(f):
        assert abs(df(c)) < 1e-10 * scale * max(1.0, abs(c)) ** df.degree


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 3.0), points)
def test_odd_map_symmetry(t, z0):
    f = PolynomialMap((0, 1j * t, 0, 1))
    a = orbit(f, z0, 30, 1e6)
    b = orbit(f, -z0, 30, 1e6)
    assert len(a.points) == len(b.points)
    for p, q in zip(a.points, b.points):
        if is_infinity(p):
            assert is_infinity(q)
        else:
            assert abs(p + q) <= 1e-12 * max(1.0, abs(p))


@settings(max_examples=20, deadline=None)
@given(points)
def test_orbit_is_deterministic(z0):
    f = PolynomialMap.quadratic(complex(-0.12, 0.74))
    assert orbit(f, z0, 50, 10).points == orbit(f, z0, 50, 10).points
