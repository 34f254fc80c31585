"""Acceptance criteria, one test each, at their stated tolerances.

Every test records a one-line verdict in RESULTS before asserting; the
conftest hook prints the lines after the run.  Running this file directly
prints them as it goes.
"""

import cmath
import itertools
import math
from fractions import Fraction

import numpy as np

from holodyn.figures import FIGURE_NAMES, distinct_levels, reproduce_figures
from holodyn.henon import fixed_point_eigenvalues, fixed_point_for, henon_from_eigenvalues, random_eigenvalues
from holodyn.interval import (
    alpha_family,
    kneading_sequence,
    logistic_to_quadratic,
    period3_tent,
    polynomial_family,
    thurston_iterate,
)
from holodyn.linearize import GOLDEN_MEAN, brjuno_partial, continued_fraction, cremer_candidate_angle
from holodyn.maps import PolynomialMap
from holodyn.rays import Angle, cycle_from_angles, rotation_number, trace_ray
from holodyn.solvers import (
    ReducedRelationError,
    SolverError,
    limb_diameter,
    misiurewicz_relation,
    nearest_genuine_relation,
    solve_misiurewicz,
    solve_superattracting_center,
    verify_intertwined_basilica,
    verify_mating,
)

RESULTS: dict[str, str] = {}


def record(key: str, ok: bool, detail: str) -> bool:
    line = f"criterion {key:>3}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[key] = line
    print(line)
    return ok


def test_01_mating_identities():
    rep = verify_mating(1e-12)
    worst = max(c.measured_error for c in rep.checks)
    assert record("1", rep.passed, f"F^3(0)=0, F(inf)=1, F(1)=inf; worst error {worst:.1e}")


def test_02_intertwined_basilica():
    rep = verify_intertwined_basilica(1e-12)
    worst = max(c.measured_error for c in rep.checks)
    assert record("2", rep.passed, f"P^2(+-1/2)=+-1/2, critical points +-1/2; worst error {worst:.1e}")


def test_03_rabbit_parameter():
    c = solve_superattracting_center(3, complex(-0.12, 0.74)).parameter
    roots = np.roots([1, 2, 1, 1])
    oracle = complex(roots[np.argmax(roots.imag)])
    printed_err = abs(c - complex(-0.122561, 0.744862))
    oracle_err = abs(c - oracle)
    ok = printed_err < 5e-6 and oracle_err < 1e-10
    assert record("3", ok, f"c={c:.9f}; vs printed {printed_err:.1e}, vs cubic root {oracle_err:.1e}")


def test_04_tuned_rabbit():
    seed = complex(-0.101, 0.956)
    note = ""
    try:
        rep = solve_misiurewicz(6, 3, seed)
    except ReducedRelationError as exc:
        # a root of the (6,3) relation exists but it is strictly preperiodic
        # with smaller data; the report still carries the converged root
        rep = exc.report
        note = f"; the root reduces to (preperiod {exc.preperiod}, period {exc.period})"
    except SolverError:
        rep = None
    nearest = nearest_genuine_relation(seed)
    fallback_ok = nearest is not None
    if rep is None:
        rel = nearest[0] if nearest else None
        assert record("4", False, f"(6,3) has no root near the seed; nearest genuine relation {rel}")
        return
    residual = abs(misiurewicz_relation(rep.parameter, 6, 3))
    printed_err = abs(rep.parameter - complex(-0.101096, 0.956287))
    ok = rep.converged and residual < 1e-12 and printed_err < 5e-6 and fallback_ok
    rel = nearest[0] if nearest else None
    detail = (
        f"c={rep.parameter:.9f}; residual {residual:.1e}, vs printed {printed_err:.1e}{note}; "
        f"nearest genuine relation {rel}"
    )
    assert record("4", ok, detail)


def _brute_rotation(angles, degree):
    """Rotation number by trying every shift of the circular order."""
    ordered = sorted(Fraction(a) for a in angles)
    q = len(ordered)
    image = [(a * degree) % 1 for a in ordered]
    for k in range(q):
        if all(image[i] == ordered[(i + k) % q] for i in range(q)):
            return Fraction(k, q)
    return None


def test_05_rotation_numbers():
    cases = [(["1/3", "2/3"], Fraction(1, 2)), (["1/7", "2/7", "4/7"], Fraction(1, 3))]
    parts = []
    ok = True
    for angles, expected in cases:
        got = rotation_number(cycle_from_angles(angles, 2)).fraction
        brute = _brute_rotation(angles, 2)
        ok &= got == expected == brute
        parts.append(f"{{{', '.join(angles)}}} -> {got} (oracle {brute})")
    assert record("5", ok, "; ".join(parts))


def test_06_ray_landing():
    checks = [(PolynomialMap.quadratic(-2), 0, 2 + 0j)]
    checks += [(PolynomialMap.quadratic(0), t, cmath.exp(2j * math.pi * float(t))) for t in
               (Fraction(0), Fraction(1, 3), Fraction(1, 2))]
    errs = []
    for poly, theta, target in checks:
        ray = trace_ray(poly, Angle.of(theta), levels=200)
        errs.append(abs(ray.landing_estimate - target))
    ok = max(errs) < 1e-6
    assert record("6", ok, "landing errors " + ", ".join(f"{e:.1e}" for e in errs))


def _bisect_period3_center():
    g = lambda c: c**3 + 2 * c**2 + c + 1  # noqa: E731
    lo, hi = -2.0, -1.5
    for _ in range(100):
        mid = (lo + hi) / 2
        if g(lo) * g(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def test_07_thurston_period3():
    f0 = period3_tent()
    res = thurston_iterate(f0, polynomial_family(2, (0, 0)), tol=1e-10, max_iter=200)
    c = logistic_to_quadratic(4 * res.limit.critical_values[0])
    err = abs(c - _bisect_period3_center())
    k0 = kneading_sequence(f0, 9).itineraries
    k1 = kneading_sequence(res.limit, 9, critical_tol=1e-7).itineraries
    ok = res.converged and res.iterations <= 200 and err < 1e-8 and res.kneading_match and k0 == k1
    detail = f"{res.iterations} iterations, c={c:.10f}, error {err:.1e}, kneading match {k0 == k1}"
    assert record("7", ok, detail)


def test_08_alpha_sweep():
    f0 = period3_tent()
    parts = []
    converged = {}
    for alpha in (1.5, 2.0, 3.0):
        res = thurston_iterate(f0, alpha_family(alpha), tol=1e-10, max_iter=200)
        converged[alpha] = res.converged and bool(res.trace)
        parts.append(f"alpha={alpha}: {'converged' if res.converged else 'no convergence'} in {res.iterations}")
    assert record("8", converged[2.0], "; ".join(parts))


def test_09_henon_round_trip():
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(100):
        lam, mu = random_eigenvalues(rng, 0.1, 3.0)
        h = henon_from_eigenvalues(lam, mu)
        ev = fixed_point_eigenvalues(h, fixed_point_for(lam, mu))
        err = min(
            max(abs(ev[0] - lam), abs(ev[1] - mu)),
            max(abs(ev[0] - mu), abs(ev[1] - lam)),
        )
        worst = max(worst, err)
    assert record("9", worst < 1e-10, f"100 random pairs, worst eigenvalue error {worst:.1e}")


def test_10a_golden_mean_brjuno():
    rep = brjuno_partial(continued_fraction(GOLDEN_MEAN, 21), 20)
    inc = rep.last_increment
    assert record("10a", inc < 1e-6, f"golden mean depth 20: sum {rep.total:.4f}, last increment {inc:.1e}")


def test_10b_cremer_brjuno():
    cand = cremer_candidate_angle(3)
    rep = brjuno_partial(cand.cf, 3)
    assert record("10b", rep.total > 50, f"Cremer candidate depth 3: partial sum {rep.total:.1f}")


def test_11_limb_diameters():
    ds = [limb_diameter(1, q).diameter for q in range(2, 7)]
    decreasing = all(b < a for a, b in zip(ds, ds[1:]))
    ok = decreasing and 1.1 < ds[0] < 1.4
    q2d = ", ".join(f"{q * q * d:.2f}" for q, d in zip(range(2, 7), ds))
    detail = "diameters " + ", ".join(f"{d:.4f}" for d in ds) + f"; q^2 d = {q2d}"
    assert record("11", ok, detail)


def test_12_figure_reproduction(tmp_path):
    first = reproduce_figures(tmp_path / "one", size=96, seed=7)
    second = reproduce_figures(tmp_path / "two", size=96, seed=7)
    names = [f.name for f in first]
    identical = all(a.path.read_bytes() == b.path.read_bytes() for a, b in zip(first, second))
    levels = {f.name: distinct_levels(f.path) for f in first}
    ok = names == list(FIGURE_NAMES) and identical and min(levels.values()) >= 2
    detail = f"{len(first)} images, byte-identical {identical}, min distinct values {min(levels.values())}"
    assert record("12", ok, detail)


if __name__ == "__main__":
    import pathlib
    import tempfile

    for name, fn in sorted(globals().items()):
        if not name.startswith("test_"):
            continue
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(pathlib.Path(d))
            else:
                fn()
        except AssertionError:
            pass
