import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holodyn.interval import (
    CombinatorialInconsistencyError,
    InvariantViolation,
    alpha_family,
    initial_state,
    invert_on_lap,
    kneading_sequence,
    logistic_to_quadratic,
    marked_orbits,
    period3_tent,
    piecewise_linear,
    polynomial_family,
    pullback_step,
    real_period3_center,
    tent_map,
    thurston_iterate,
)


def test_tent_kneading():
    assert kneading_sequence(tent_map(), 4).itineraries == [["R", "L", "L", "L"]]


def test_period3_kneading_is_periodic():
    seq = kneading_sequence(period3_tent(), 9).itineraries[0]
    assert seq == ["R", "L", "C"] * 3


def test_fixed_critical_point():
    f = piecewise_linear([0, 0.5, 1], [0, 0.5, 0])
    assert kneading_sequence(f, 4).itineraries == [["C"] * 4]


def test_orbit_leaving_interval():
    f = piecewise_linear([0, 0.5, 1], [0, 1, 0])
    object.__setattr__(f, "evaluator", lambda x: 2.0 * np.asarray(x))
    with pytest.raises(InvariantViolation):
        kneading_sequence(f, 3)


def test_non_monotone_map_rejected():
    with pytest.raises(InvariantViolation):
        piecewise_linear([0, 0.3, 0.6, 1], [0, 0.9, 0.95, 0])


def test_alpha_family_examples():
    fam = alpha_family(2)
    f = fam.member((1.0,))
    xs = np.linspace(0, 1, 11)
    np.testing.assert_allclose(f(xs), 4 * xs * (1 - xs), atol=1e-15)
    for a in (1.5, 2, 3):
        assert alpha_family(a).member(alpha_family(a).fit([0.8])).critical_values == (0.8,)
    g = alpha_family(1.5).member((1.0,))
    assert g(0.0) == 0 and g(1.0) == 0
    with pytest.raises(ValueError):
        alpha_family(1.0)


def test_polynomial_family_examples():
    fam = polynomial_family(2, (0, 0))
    params = fam.fit([1.0])
    assert params[0] == pytest.approx(0.5)
    xs = np.linspace(0, 1, 7)
    np.testing.assert_allclose(fam.member(params)(xs), 4 * xs * (1 - xs), atol=1e-12)
    params = fam.fit([0.3])
    np.testing.assert_allclose(fam.member(params)(xs), 1.2 * xs * (1 - xs), atol=1e-12)
    cubic = polynomial_family(3, (0, 1))
    m = cubic.member(cubic.fit([0.9, 0.2]))
    assert np.max(np.abs(np.array(m.critical_values) - [0.9, 0.2])) < 1e-10
    with pytest.raises(ValueError):
        cubic.fit([0.2, 0.9])


def test_member_is_fixed_by_pullback():
    fam = polynomial_family(2, (0, 0))
    f0 = fam.member(fam.fit([1.0]))
    f0.validate()
    marks = marked_orbits(f0)
    state = initial_state(f0, fam, marks)
    nxt = pullback_step(state, marks, fam)
    assert np.max(np.abs(nxt.marked_points - state.marked_points)) < 1e-12
    assert len(nxt.history) == nxt.iteration + 1


def test_inconsistent_marks_raise():
    fam = polynomial_family(2, (0, 0))
    f0 = period3_tent()
    marks = marked_orbits(f0)
    state = initial_state(f0, fam, marks)
    marks.lap[0] = 1  # claim the leftmost point lies right of the critical point
    marks.image[0] = 1
    state.marked_points[1] = 0.999  # target above the critical value
    with pytest.raises(CombinatorialInconsistencyError):
        pullback_step(state, marks, fam)


def test_tent_converges_to_full_quadratic():
    res = thurston_iterate(tent_map(), polynomial_family(2, (0, 0)), 1e-10, 50)
    assert res.converged and res.kneading_match
    assert res.limit.critical_values[0] == pytest.approx(1.0, abs=1e-12)


def test_period3_limit_is_the_airplane():
    res = thurston_iterate(period3_tent(), polynomial_family(2, (0, 0)), 1e-10, 200)
    assert res.converged and res.kneading_match
    c = logistic_to_quadratic(4 * res.limit.critical_values[0])
    assert abs(c - real_period3_center()) < 1e-8
    tail = res.trace[-11:]
    ratios = [b / a for a, b in zip(tail, tail[1:])]
    assert max(ratios) < 0.95


def test_run_record_fields():
    res = thurston_iterate(period3_tent(), alpha_family(1.5), 1e-10, 200)
    data = res.to_json()
    assert {"family", "alpha", "iterations", "converged", "trace", "limit_params", "kneading_match"} <= set(data)


def test_truncated_marking_for_non_pcf():
    f = piecewise_linear([0, 0.5, 1], [0, 0.9, 0])
    marks = marked_orbits(f, truncate_at=16)
    assert marks.truncated and len(marks.points) == 16


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 1.0), st.sampled_from([1.5, 2.0, 3.0]))
def test_alpha_round_trip(v, alpha):
    fam = alpha_family(alpha)
    assert abs(fam.member(fam.fit([v])).critical_values[0] - v) < 1e-10


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 1.0))
def test_quadratic_round_trip(v):
    fam = polynomial_family(2, (0, 0))
    assert abs(fam.member(fam.fit([v])).critical_values[0] - v) < 1e-10


@settings(max_examples=100, deadline=None)
@given(st.floats(0.3, 1.0), st.floats(0.0, 0.7))
def test_cubic_round_trip(v1, v2):
    if v1 - v2 < 0.05:
        return
    fam = polynomial_family(3, (0, 1))
    m = fam.member(fam.fit([v1, v2]))
    assert np.max(np.abs(np.array(m.critical_values) - [v1, v2])) < 1e-10


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 1.0), st.integers(0, 1), st.floats(0.0, 1.0))
def test_branch_inversion_accuracy(v, lap, s):
    p = alpha_family(2.0).member((v,))
    target = s * v
    x = invert_on_lap(p, lap, target)
    assert abs(float(p(x)) - target) < 1e-11
