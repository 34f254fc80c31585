import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holodyn.roots import RootFindingError, durand_kerner, scaled_residual


def test_quadratic_roots():
    roots = np.sort_complex(durand_kerner([-1, 0, 1]))
    np.testing.assert_allclose(roots, [-1, 1], atol=1e-12)


def test_linear_shortcut():
    assert durand_kerner([3, 2]) == pytest.approx([-1.5])


def test_leading_zeros_trimmed():
    roots = np.sort_complex(durand_kerner([-4, 0, 1, 0, 0]))
    np.testing.assert_allclose(roots, [-2, 2], atol=1e-12)


def test_root_at_zero_without_constant_term():
    roots = durand_kerner([0, 0, 3])
    np.testing.assert_allclose(roots, [0, 0], atol=1e-6)


def test_constant_rejected():
    with pytest.raises(ValueError):
        durand_kerner([5])


def test_failure_reports_state():
    with pytest.raises(RootFindingError) as info:
        durand_kerner([1, 2, 3, 4, 5, 6], max_iter=1)
    assert info.value.roots.shape == (5,)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False), min_size=2, max_size=5))
def test_roots_satisfy_polynomial(roots):
    coeffs = np.poly(roots)[::-1]
    found = durand_kerner(coeffs)
    assert np.all(scaled_residual(coeffs, found) < 1e-12)
