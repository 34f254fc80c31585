"""Piecewise-monotone interval maps, kneading sequences, lifting families
and the real Thurston pullback on marked critical orbits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial

CRITICAL_TOL = 1e-12
ORBIT_TOL = 1e-9
LEAVE_TOL = 1e-9
MAX_ORBIT = 1000
TRUNCATE_AT = 64
BISECT_STEPS = 80
FIT_STEPS = 200
MAX_HALVINGS = 20


class InvariantViolation(ValueError):
    """An orbit or a map left the unit interval or broke monotonicity."""


class CombinatorialInconsistencyError(RuntimeError):
    """A branch inversion target lies outside the lap's value range."""


class FitError(RuntimeError):
    pass


@dataclass
class PiecewiseMonotoneMap:
    """Map of [0, 1] to itself with ``lap_count`` alternating monotone laps."""

    lap_count: int
    critical_points: tuple[float, ...]
    critical_values: tuple[float, ...]
    boundary_map: tuple[int, int]
    evaluator: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    check: bool = True

    def __post_init__(self):
        self.critical_points = tuple(float(c) for c in self.critical_points)
        self.critical_values = tuple(float(v) for v in self.critical_values)
        self.boundary_map = tuple(int(b) for b in self.boundary_map)
        if self.check:
            self.validate()

    def __call__(self, x):
        return self.evaluator(x)

    @property
    def breakpoints(self) -> np.ndarray:
        return np.array((0.0, *self.critical_points, 1.0))

    def increasing_first(self) -> bool:
        first = self.critical_values[0] if self.critical_values else self.boundary_map[1]
        return first > self.boundary_map[0]

    def lap_of(self, x: float) -> int:
        """Zero-based lap index; a critical point belongs to the lap on its right."""
        return int(np.searchsorted(self.critical_points, x, side="right"))

    def validate(self, grid: float = 1e-4, tol: float = 1e-9) -> None:
        n = self.lap_count
        if n < 2:
            raise InvariantViolation("need at least two laps")
        if len(self.critical_points) != n - 1 or len(self.critical_values) != n - 1:
            raise InvariantViolation("need lap_count - 1 critical points and values")
        cps = np.array(self.critical_points)
        if np.any(np.diff(cps) <= 0) or cps[0] <= 0 or cps[-1] >= 1:
            raise InvariantViolation("critical points must increase strictly inside (0, 1)")
        if any(b not in (0, 1) for b in self.boundary_map):
            raise InvariantViolation("boundary_map must send endpoints into {0, 1}")
        at = np.asarray(self(cps), dtype=float)
        if np.max(np.abs(at - np.array(self.critical_values))) > tol:
            raise InvariantViolation("evaluator disagrees with critical_values")
        ends = np.asarray(self(np.array([0.0, 1.0])), dtype=float)
        if np.max(np.abs(ends - np.array(self.boundary_map))) > tol:
            raise InvariantViolation("endpoints do not follow boundary_map")
        sign = 1.0 if self.increasing_first() else -1.0
        edges = self.breakpoints
        for lap in range(n):
            a, b = edges[lap], edges[lap + 1]
            xs = np.append(np.arange(a, b, grid), b)
            ys = np.asarray(self(xs), dtype=float)
            if np.any(ys < -tol) or np.any(ys > 1 + tol):
                raise InvariantViolation("map leaves [0, 1]")
            if np.any(sign * np.diff(ys) <= 0):
                raise InvariantViolation(f"lap {lap + 1} is not strictly monotone in the expected direction")
            sign = -sign

    def deriv(self, x):
        if self.derivative is not None:
            return self.derivative(x)
        h = 1e-7
        x = np.asarray(x, dtype=float)
        lo, hi = np.clip(x - h, 0, 1), np.clip(x + h, 0, 1)
        return (self(hi) - self(lo)) / (hi - lo)


def piecewise_linear(xs: Sequence[float], ys: Sequence[float]) -> PiecewiseMonotoneMap:
    """Map through the nodes (xs[i], ys[i]); xs runs from 0 to 1 and each
    interior node is a turning point."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs[0] != 0 or xs[-1] != 1 or len(xs) != len(ys) or len(xs) < 3:
        raise ValueError("nodes must start at 0, end at 1 and include a turning point")
    slopes = np.diff(ys) / np.diff(xs)

    def ev(x):
        return np.interp(x, xs, ys)

    def der(x):
        idx = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(slopes) - 1)
        return slopes[idx]

    return PiecewiseMonotoneMap(
        len(xs) - 1,
        tuple(xs[1:-1]),
        tuple(ys[1:-1]),
        (int(round(ys[0])), int(round(ys[-1]))),
        ev,
        der,
    )


def tent_map() -> PiecewiseMonotoneMap:
    return piecewise_linear([0, 0.5, 1], [0, 1, 0])


def period3_tent() -> PiecewiseMonotoneMap:
    """Tent map v(1 - |2x - 1|) whose critical point 1/2 has period 3.

    With w = 2v(1 - v) < 1/2, the orbit 1/2 -> v -> w -> 1/2 needs
    4 v^2 (1 - v) = 1/2.  The root in (2/3, 1) is found by bisection.
    """
    g = lambda v: 4 * v * v * (1 - v) - 0.5  # noqa: E731
    lo, hi = 2.0 / 3.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    v = 0.5 * (lo + hi)
    return piecewise_linear([0, 0.5, 1], [0, v, 0])


@dataclass
class KneadingData:
    itineraries: list[list[str]]
    alphabet: list[str]

    def __str__(self) -> str:
        return " | ".join(" ".join(it) for it in self.itineraries)


def lap_symbols(n: int) -> tuple[list[str], list[str]]:
    if n == 2:
        return ["L", "R"], ["C"]
    return [f"I{i + 1}" for i in range(n)], [f"C{i + 1}" for i in range(n - 1)]


def _symbol(f: PiecewiseMonotoneMap, x: float, critical_tol: float):
    laps, crits = lap_symbols(f.lap_count)
    for i, c in enumerate(f.critical_points):
        if abs(x - c) <= critical_tol:
            return crits[i], c
    return laps[f.lap_of(x)], x


def _step(f: PiecewiseMonotoneMap, x: float) -> float:
    y = float(f(x))
    if y < -LEAVE_TOL or y > 1 + LEAVE_TOL:
        raise InvariantViolation(f"orbit left [0, 1]: f({x}) = {y}")
    return min(max(y, 0.0), 1.0)


def kneading_sequence(
    f: PiecewiseMonotoneMap, length: int, critical_tol: float = CRITICAL_TOL
) -> KneadingData:
    """Itineraries of the critical values; symbol t names the lap (or the
    critical point) that holds the t-th image of the critical value."""
    if length < 1:
        raise ValueError("length must be >= 1")
    laps, crits = lap_symbols(f.lap_count)
    out = []
    for v in f.critical_values:
        x = float(v)
        if x < -LEAVE_TOL or x > 1 + LEAVE_TOL:
            raise InvariantViolation("critical value outside [0, 1]")
        seq = []
        for t in range(length):
            sym, x = _symbol(f, x, critical_tol)
            seq.append(sym)
            if t + 1 < length:
                x = _step(f, x)
        out.append(seq)
    return KneadingData(out, laps + crits)


@dataclass
class LiftingFamily:
    name: str
    lap_count: int
    boundary_map: tuple[int, int]
    member: Callable[[Sequence[float]], PiecewiseMonotoneMap]
    fit: Callable[[Sequence[float]], tuple[float, ...]]
    alpha: float | None = None


def alpha_family(alpha: float) -> LiftingFamily:
    """Unimodal maps x -> k - k |2x - 1|^alpha with critical value k."""
    if not alpha > 1:
        raise ValueError("alpha must exceed 1")

    def member(params):
        (k,) = params
        if not 0 < k <= 1:
            raise ValueError("k must lie in (0, 1]")

        def ev(x):
            return k - k * np.abs(2 * np.asarray(x, dtype=float) - 1) ** alpha

        def der(x):
            u = 2 * np.asarray(x, dtype=float) - 1
            return -2 * alpha * k * np.sign(u) * np.abs(u) ** (alpha - 1)

        return PiecewiseMonotoneMap(2, (0.5,), (k,), (0, 0), ev, der, check=False)

    def fit(values):
        (v,) = values
        return (float(v),)

    return LiftingFamily(f"alpha={alpha:g}", 2, (0, 0), member, fit, alpha)


def _poly_parts(crit: np.ndarray):
    """Q(x) = int_0^x prod (t - c_i) dt and dQ/dc_j as polynomials."""
    base = Polynomial.fromroots(crit)
    q = base.integ(lbnd=0)
    partials = []
    for j in range(len(crit)):
        rest = np.delete(crit, j)
        others = Polynomial.fromroots(rest) if rest.size else Polynomial([1.0])
        partials.append(-others.integ(lbnd=0))
    return q, partials


def polynomial_family(n: int, boundary_map: tuple[int, int] | None = None) -> LiftingFamily:
    """Degree-n real polynomials with all critical points in (0, 1).

    Parameters are (c_1, ..., c_(n-1), K) with p(x) = b_0 + K Q(x) and
    Q(x) = int_0^x prod (t - c_i) dt.  The scale K is the extra unknown that
    lets the critical values move; p(1) = b_1 closes the system.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if boundary_map is None:
        boundary_map = (0, 0) if n % 2 == 0 else (0, 1)
    b0, b1 = boundary_map
    if (n % 2 == 0) != (b0 == b1):
        raise ValueError("boundary map is incompatible with the lap count")

    def member(params):
        params = np.asarray(params, dtype=float)
        crit, scale = params[:-1], params[-1]
        q, _ = _poly_parts(crit)
        p = b0 + scale * q
        dp = p.deriv()
        cvs = tuple(float(p(c)) for c in crit)
        return PiecewiseMonotoneMap(
            n, tuple(crit), cvs, boundary_map, lambda x: p(np.asarray(x, dtype=float)),
            lambda x: dp(np.asarray(x, dtype=float)), check=False,
        )

    def residual(params, values):
        crit, scale = params[:-1], params[-1]
        q, partials = _poly_parts(crit)
        res = np.empty(n)
        res[:-1] = b0 + scale * q(crit) - values
        res[-1] = b0 + scale * q(1.0) - b1
        jac = np.zeros((n, n))
        for j, dq in enumerate(partials):
            jac[:-1, j] = scale * dq(crit)  # Q'(c_i) = 0, so no chain term
            jac[-1, j] = scale * dq(1.0)
        jac[:-1, -1] = q(crit)
        jac[-1, -1] = q(1.0)
        return res, jac

    def ordered(params):
        crit = params[:-1]
        return crit[0] > 0 and crit[-1] < 1 and np.all(np.diff(crit) > 0)

    def fit(values):
        values = np.asarray(values, dtype=float)
        if len(values) != n - 1:
            raise ValueError(f"need {n - 1} critical values")
        _check_alternation(values, boundary_map)
        crit = (np.arange(1, n) / n).astype(float)
        q, _ = _poly_parts(crit)
        params = np.append(crit, (values[0] - b0) / q(crit[0]))
        res, jac = residual(params, values)
        for _ in range(FIT_STEPS):
            if np.max(np.abs(res)) < 1e-13:
                return tuple(float(x) for x in params)
            step = np.linalg.solve(jac, -res)
            t = 1.0
            norm = np.max(np.abs(res))
            for _ in range(MAX_HALVINGS + 1):
                trial = params + t * step
                if ordered(trial):
                    tres, tjac = residual(trial, values)
                    if np.max(np.abs(tres)) < norm or t < 2.0**-MAX_HALVINGS * 2:
                        break
                t *= 0.5
            else:
                raise FitError("damping could not keep the critical points ordered")
            params, res, jac = trial, tres, tjac
        if np.max(np.abs(res)) < 1e-11:
            return tuple(float(x) for x in params)
        raise FitError(f"polynomial fit did not converge (residual {np.max(np.abs(res)):.3e})")

    return LiftingFamily(f"polynomial(n={n})", n, boundary_map, member, fit)


def _check_alternation(values: np.ndarray, boundary_map) -> None:
    """Critical values must alternate as maxima and minima."""
    seq = np.concatenate(([boundary_map[0]], values, [boundary_map[1]]))
    diffs = np.sign(np.diff(seq))
    if np.any(diffs == 0) or np.any(diffs[1:] == diffs[:-1]):
        raise ValueError("target critical values violate the alternation pattern")


@dataclass
class MarkedOrbits:
    """Finite forward-invariant set of marked points with carried combinatorics.

    ``image[j]`` is the index of f(points[j]); ``lap[j]`` is the lap index of
    point j, or None for a critical point; ``critical[i]`` is the index of
    critical point i and ``values[i]`` that of its critical value.
    """

    points: np.ndarray
    image: list[int]
    lap: list[int | None]
    critical: list[int]
    values: list[int]
    truncated: bool = False


def marked_orbits(
    f: PiecewiseMonotoneMap, max_steps: int = MAX_ORBIT, truncate_at: int = TRUNCATE_AT
) -> MarkedOrbits:
    """Critical orbits of ``f`` as a marked set.

    Orbits are followed until they return within 1e-9 of a marked point.  If
    some orbit does not close within ``max_steps``, each orbit keeps its
    first ``truncate_at`` points and the last image is sent to the nearest
    marked point, which perturbs the combinatorics.
    """
    pts: list[float] = []
    image: dict[int, int] = {}

    def find(x):
        for idx, p in enumerate(pts):
            if abs(p - x) < ORBIT_TOL:
                return idx
        return None

    crit_idx = []
    truncated = False
    for c in f.critical_points:
        idx = find(c)
        if idx is None:
            pts.append(float(c))
            idx = len(pts) - 1
        else:
            pts[idx] = float(c)
        crit_idx.append(idx)
    for ci in list(crit_idx):
        cur = ci
        steps = 0
        while cur not in image:
            x = _step(f, pts[cur])
            nxt = find(x)
            steps += 1
            if nxt is None and steps >= min(max_steps, truncate_at if truncated else max_steps):
                nxt = int(np.argmin(np.abs(np.array(pts) - x)))
                truncated = True
            if nxt is None:
                pts.append(x)
                nxt = len(pts) - 1
            image[cur] = nxt
            cur = nxt
    if truncated:
        return _truncated_orbits(f, truncate_at)
    order = np.argsort(pts)
    rank = {int(old): new for new, old in enumerate(order)}
    points = np.array(pts)[order]
    img = [rank[image[int(old)]] for old in order]
    crit = [rank[i] for i in crit_idx]
    lap: list[int | None] = []
    for j, x in enumerate(points):
        lap.append(None if j in crit else f.lap_of(x))
    return MarkedOrbits(points, img, lap, crit, [img[i] for i in crit], False)


def _truncated_orbits(f: PiecewiseMonotoneMap, n: int) -> MarkedOrbits:
    pts: list[float] = []
    image: dict[int, int] = {}
    crit = []
    for c in f.critical_points:
        crit.append(len(pts))
        pts.append(float(c))
    for ci in list(crit):
        cur = ci
        for _ in range(n - 1):
            pts.append(_step(f, pts[cur]))
            image[cur] = len(pts) - 1
            cur = len(pts) - 1
        x = _step(f, pts[cur])
        others = [k for k in range(len(pts)) if k != cur]
        image[cur] = min(others, key=lambda k: abs(pts[k] - x))
    order = np.argsort(pts, kind="stable")
    rank = {int(old): new for new, old in enumerate(order)}
    points = np.array(pts)[order]
    img = [rank[image[int(old)]] for old in order]
    crit_new = [rank[i] for i in crit]
    lap = [None if j in crit_new else f.lap_of(x) for j, x in enumerate(points)]
    return MarkedOrbits(points, img, lap, crit_new, [img[i] for i in crit_new], True)


def invert_on_lap(p: PiecewiseMonotoneMap, lap: int, target: float, slack: float = 1e-12) -> float:
    """Solve p(x) = target for x in the given lap of p."""
    edges = p.breakpoints
    a, b = float(edges[lap]), float(edges[lap + 1])
    fa, fb = float(p(a)), float(p(b))
    lo_v, hi_v = min(fa, fb), max(fa, fb)
    if target < lo_v - slack or target > hi_v + slack:
        raise CombinatorialInconsistencyError(
            f"target {target:.15g} outside lap {lap + 1} range [{lo_v:.15g}, {hi_v:.15g}]"
        )
    target = min(max(target, lo_v), hi_v)
    increasing = fb > fa
    for _ in range(BISECT_STEPS):
        mid = 0.5 * (a + b)
        if (float(p(mid)) < target) == increasing:
            a = mid
        else:
            b = mid
    x = 0.5 * (a + b)
    lo, hi = float(edges[lap]), float(edges[lap + 1])
    for _ in range(2):
        d = float(p.deriv(x))
        if d == 0 or not math.isfinite(d):
            break
        nx = x - (float(p(x)) - target) / d
        if lo <= nx <= hi and abs(float(p(nx)) - target) <= abs(float(p(x)) - target):
            x = nx
    return x


@dataclass
class PullbackState:
    iteration: int
    current_params: tuple[float, ...]
    marked_points: np.ndarray
    history: list[tuple[float, ...]] = field(default_factory=list)

    def __post_init__(self):
        if not self.history:
            self.history = [tuple(self.current_params)]


def initial_state(f0: PiecewiseMonotoneMap, family: LiftingFamily, marks: MarkedOrbits) -> PullbackState:
    if family.lap_count != f0.lap_count:
        raise ValueError("family and f0 have different lap counts")
    values = marks.points[marks.values]
    return PullbackState(0, tuple(family.fit(values)), marks.points.copy())


def pullback_step(state: PullbackState, marks: MarkedOrbits, family: LiftingFamily) -> PullbackState:
    """One lift: p_k from the current critical values, then
    h_k(x_j) = (p_k on the lap of x_j)^-1 (x_image(j))."""
    x = state.marked_points
    params = family.fit(x[marks.values])
    p = family.member(params)
    new = np.empty_like(x)
    for j in range(len(x)):
        if marks.lap[j] is None:
            new[j] = p.critical_points[marks.critical.index(j)]
        else:
            new[j] = invert_on_lap(p, marks.lap[j], float(x[marks.image[j]]))
    if np.any(np.diff(new) < 0):
        raise CombinatorialInconsistencyError("pullback reversed the order of marked points")
    next_params = tuple(family.fit(new[marks.values]))
    return PullbackState(
        state.iteration + 1, next_params, new, state.history + [next_params]
    )


@dataclass
class ThurstonResult:
    limit: PiecewiseMonotoneMap
    params: tuple[float, ...]
    trace: list[float]
    converged: bool
    kneading_match: bool
    iterations: int
    family: LiftingFamily
    truncated: bool = False

    def to_json(self) -> dict:
        out = {
            "family": self.family.name,
            "iterations": self.iterations,
            "converged": self.converged,
            "trace": self.trace,
            "limit_params": list(self.params),
            "kneading_match": self.kneading_match,
        }
        if self.family.alpha is not None:
            out["alpha"] = self.family.alpha
        return out


def thurston_iterate(
    f0: PiecewiseMonotoneMap,
    family: LiftingFamily,
    tol: float = 1e-10,
    max_iter: int = 200,
    truncate_at: int = TRUNCATE_AT,
) -> ThurstonResult:
    """Iterate the pullback until the critical values move less than ``tol``.

    On convergence the kneading of the limit is compared with that of f0
    over the marked orbit length; critical symbols are matched at
    tolerance max(1e-12, 1e3 * tol) since the limit is only known to ``tol``.
    """
    marks = marked_orbits(f0, truncate_at=truncate_at)
    state = initial_state(f0, family, marks)
    trace: list[float] = []
    converged = False
    for _ in range(max_iter):
        nxt = pullback_step(state, marks, family)
        change = float(np.max(np.abs(nxt.marked_points[marks.values] - state.marked_points[marks.values])))
        trace.append(change)
        state = nxt
        if change < tol:
            converged = True
            break
    limit = family.member(state.current_params)
    length = len(marks.points) + 1
    k0 = kneading_sequence(f0, length)
    k1 = kneading_sequence(limit, length, critical_tol=max(CRITICAL_TOL, 1e3 * tol))
    match = k0.itineraries == k1.itineraries
    return ThurstonResult(
        limit, state.current_params, trace, converged, match, state.iteration, family, marks.truncated
    )


def logistic_to_quadratic(r: float) -> float:
    """c with r x (1 - x) conjugate to z^2 + c."""
    return r * (2 - r) / 4


def real_period3_center() -> float:
    """Real root of c^3 + 2c^2 + c + 1 by bisection on [-2, -1.5]."""
    g = lambda c: c**3 + 2 * c**2 + c + 1  # noqa: E731
    lo, hi = -2.0, -1.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (g(lo) < 0) == (g(mid) < 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
