"""Parameter-space Newton solvers, identity checks for the surgery
examples, limb experiments and an expansion heuristic."""

from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .images import Viewport
from .maps import (
    INFINITY,
    Map,
    PolynomialMap,
    RationalMap,
    critical_points,
    eval_map,
    is_infinity,
    postcritical_set,
)
from .render import RenderParams, inverse_iteration_cloud, mandelbrot_members

NEWTON_TOL = 1e-12
DIVISOR_TOL = 1e-8
MAX_NEWTON = 100

RABBIT_PRINTED = complex(-0.122561, 0.744862)
TUNED_RABBIT_PRINTED = complex(-0.101096, 0.956287)
INTERTWINE_A_PRINTED = complex(0.0, 2.55799)
MATING_C = (1 + cmath.sqrt(-3)) / 2
INTERTWINED_BASILICA = PolynomialMap((1j * math.sqrt(7) / 4, -0.75, 0, 1))


class SolverError(RuntimeError):
    def __init__(self, message: str, report: "SolveReport | None" = None):
        super().__init__(message)
        self.report = report


class ReducedRelationError(SolverError):
    """Newton converged, but the relation already holds with a smaller
    preperiod or a proper divisor of the period."""

    def __init__(self, message: str, report: "SolveReport", preperiod: int, period: int):
        super().__init__(message, report)
        self.preperiod = preperiod
        self.period = period


@dataclass
class SolveReport:
    parameter: complex
    residual: float
    iterations: int
    seed_distance: float
    converged: bool
    name: str = ""
    relation: tuple[int, int] | None = None  # (preperiod, period) actually satisfied

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "parameter_re": self.parameter.real,
            "parameter_im": self.parameter.imag,
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "checks": [],
        }


@dataclass
class Check:
    description: str
    measured_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.measured_error < self.tolerance


@dataclass
class VerificationReport:
    name: str
    checks: list[Check] = field(default_factory=list)
    parameter: complex = 0j

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, description: str, measured_error: float, tolerance: float) -> None:
        self.checks.append(Check(description, float(measured_error), tolerance))

    def to_json(self) -> dict:
        worst = max((c.measured_error for c in self.checks), default=0.0)
        return {
            "name": self.name,
            "parameter_re": self.parameter.real,
            "parameter_im": self.parameter.imag,
            "residual": worst,
            "iterations": 0,
            "converged": self.passed,
            "checks": [
                {
                    "description": c.description,
                    "measured_error": c.measured_error,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
        }


def critical_orbit(c: complex, n: int) -> tuple[list[complex], list[complex]]:
    """P_c^k(0) and d/dc P_c^k(0) for k = 0..n (z' <- 2 z z' + 1)."""
    z, dz = 0j, 0j
    zs, dzs = [z], [dz]
    for _ in range(n):
        dz = 2 * z * dz + 1
        z = z * z + c
        zs.append(z)
        dzs.append(dz)
    return zs, dzs


def _newton(g, seed: complex, name: str) -> SolveReport:
    c = complex(seed)
    for it in range(1, MAX_NEWTON + 1):
        val, der = g(c)
        if not (cmath.isfinite(val) and cmath.isfinite(der)) or der == 0:
            break
        c = c - val / der
        if abs(g(c)[0]) < NEWTON_TOL:
            res = abs(g(c)[0])
            return SolveReport(c, res, it, abs(c - seed), True, name)
    res = abs(g(c)[0]) if cmath.isfinite(c) else math.inf
    report = SolveReport(c, res, MAX_NEWTON, abs(c - seed), False, name)
    raise SolverError(f"{name}: Newton did not converge in {MAX_NEWTON} steps (residual {res:.3e})", report)


def _divisors(n: int) -> list[int]:
    return [k for k in range(1, n) if n % k == 0]


def solve_superattracting_center(period: int, seed: complex) -> SolveReport:
    """Newton on g(c) = P_c^period(0); rejects roots of lower period."""
    if period < 1:
        raise ValueError("period must be >= 1")

    def g(c):
        zs, dzs = critical_orbit(c, period)
        return zs[period], dzs[period]

    report = _newton(g, seed, f"center(period={period})")
    zs, _ = critical_orbit(report.parameter, period)
    report.residual = abs(zs[period])  # re-evaluated outside the loop
    for k in _divisors(period):
        if abs(zs[k]) < DIVISOR_TOL:
            report.relation = (0, k)
            raise ReducedRelationError(
                f"root c={report.parameter:.12g} has period {k}, not {period}", report, 0, k
            )
    report.relation = (0, period)
    return report


def misiurewicz_relation(c: complex, preperiod: int, period: int) -> complex:
    zs, _ = critical_orbit(c, preperiod + period)
    return zs[preperiod + period] - zs[preperiod]


def _relation_newton(c: complex, preperiod: int, period: int, steps: int = 60) -> complex:
    n = preperiod + period
    for _ in range(steps):
        zs, dzs = critical_orbit(c, n)
        g, dg = zs[n] - zs[preperiod], dzs[n] - dzs[preperiod]
        if dg == 0 or not cmath.isfinite(g):
            break
        step = g / dg
        c -= step
        if abs(step) < 1e-16 * max(1.0, abs(c)):
            break
    return c


def minimal_relation(c: complex, preperiod: int, period: int, tol: float = DIVISOR_TOL):
    """Smallest (m, p) with m <= preperiod, p | period that holds at c.

    A relation holds if it is satisfied to ``tol`` at c, or if Newton on it
    from c lands within 1e-5 on a root where the original relation also
    holds to 1e-12.  The second test catches multiple roots, where the
    first Newton run stops well short of the exact parameter.
    """
    zs, _ = critical_orbit(c, preperiod + period)
    candidates = [(m, p) for p in _divisors(period) + [period] for m in range(0, preperiod + 1)]
    for m, p in candidates:
        if abs(zs[m + p] - zs[m]) < tol:
            return m, p
        if (m, p) == (preperiod, period):
            continue
        c2 = _relation_newton(c, m, p)
        if (
            cmath.isfinite(c2)
            and abs(c2 - c) < 1e-5
            and abs(misiurewicz_relation(c2, m, p)) < NEWTON_TOL
            and abs(misiurewicz_relation(c2, preperiod, period)) < NEWTON_TOL
        ):
            return m, p
    return None


def solve_misiurewicz(preperiod: int, period: int, seed: complex) -> SolveReport:
    """Newton on g(c) = P_c^(m+p)(0) - P_c^m(0).

    Raises :class:`ReducedRelationError` (carrying the converged report) when
    the root satisfies the relation with a smaller preperiod or a proper
    divisor of the period; preperiod 0 means a superattracting center.
    """
    if preperiod < 1 or period < 1:
        raise ValueError("preperiod and period must be >= 1")
    n = preperiod + period

    def g(c):
        zs, dzs = critical_orbit(c, n)
        return zs[n] - zs[preperiod], dzs[n] - dzs[preperiod]

    report = _newton(g, seed, f"misiurewicz(preperiod={preperiod}, period={period})")
    report.residual = abs(misiurewicz_relation(report.parameter, preperiod, period))
    rel = minimal_relation(report.parameter, preperiod, period)
    report.relation = rel
    if rel is not None and rel != (preperiod, period):
        m, p = rel
        kind = "a superattracting center" if m == 0 else f"preperiod {m}, period {p}"
        raise ReducedRelationError(
            f"relation ({preperiod},{period}) reduces at c={report.parameter:.12g}: it is {kind}",
            report,
            m,
            p,
        )
    return report


def nearest_genuine_relation(
    seed: complex,
    preperiods=range(1, 13),
    periods=(1, 2, 3, 6),
) -> tuple[tuple[int, int], SolveReport] | None:
    """Over (m, p) pairs, the genuine Misiurewicz root Newton finds closest to
    ``seed``; reduced relations contribute the relation they reduce to."""
    best = None
    for m in preperiods:
        for p in periods:
            try:
                rep = solve_misiurewicz(m, p, seed)
                rel = (m, p)
            except ReducedRelationError as exc:
                if exc.preperiod == 0:
                    continue
                rep = exc.report
                rel = (exc.preperiod, exc.period)
                try:
                    rep = solve_misiurewicz(rel[0], rel[1], rep.parameter)
                except SolverError:
                    continue
            except SolverError:
                continue
            if best is None or rep.seed_distance < best[1].seed_distance - 1e-14:
                best = (rel, rep)
    return best


def mating_map(c: complex = MATING_C) -> RationalMap:
    return RationalMap(PolynomialMap((c, 0, 1)), PolynomialMap((-1, 0, 1)))


def _error(z: complex, target: complex) -> float:
    if is_infinity(target):
        return 0.0 if is_infinity(z) else 1.0 / abs(z) if z != 0 else math.inf
    if is_infinity(z):
        return math.inf
    return abs(z - target)


def verify_mating(tol: float = 1e-12) -> VerificationReport:
    """Identities of (z^2 + c)/(z^2 - 1) with c = (1 + sqrt(-3))/2."""
    c = MATING_C
    F = mating_map(c)
    rep = VerificationReport("mating", parameter=c)
    crit = list(critical_points(F))
    finite = [z for z in crit if not is_infinity(z)]
    has_inf = any(is_infinity(z) for z in crit)
    rep.add("critical points: finite part is {0}", max((abs(z) for z in finite), default=math.inf) if len(finite) == 1 else math.inf, tol)
    rep.add("critical points: infinity is critical", 0.0 if has_inf and len(crit) == 2 else math.inf, tol)
    z1 = eval_map(F, 0)
    z2 = eval_map(F, z1)
    z3 = eval_map(F, z2)
    rep.add("F(0) = -c", _error(z1, -c), tol)
    rep.add("F^2(0) = conj(c)", _error(z2, c.conjugate()), tol)
    rep.add("F^3(0) = 0", _error(z3, 0), tol)
    rep.add("F(inf) = 1", _error(eval_map(F, INFINITY), 1), tol)
    rep.add("F(1) = inf", _error(eval_map(F, 1), INFINITY), tol)
    return rep


def verify_intertwined_basilica(tol: float = 1e-12) -> VerificationReport:
    """Both critical points of z^3 - 3z/4 + sqrt(-7)/4 lie on 2-cycles."""
    P = INTERTWINED_BASILICA
    rep = VerificationReport("intertwined basilica", parameter=P.coefficients[0])
    crit = sorted(critical_points(P), key=lambda z: z.real)
    rep.add("critical point -1/2", abs(crit[0] + 0.5), tol)
    rep.add("critical point +1/2", abs(crit[1] - 0.5), tol)
    w = P(0.5)
    rep.add("P(1/2) = -1/4 + i sqrt(7)/4", abs(w - complex(-0.25, math.sqrt(7) / 4)), tol)
    rep.add("P^2(1/2) = 1/2", abs(P(w) - 0.5), tol)
    rep.add("P^2(-1/2) = -1/2", abs(P(P(-0.5)) + 0.5), tol)
    return rep


def cubic_critical_points(a: complex, form: str = "az") -> list[complex]:
    if form == "az":
        w = cmath.sqrt(-a / 3)
        return [w, -w]
    if form == "az2":
        return [0j, -2 * a / 3]
    raise ValueError(f"unknown cubic form {form!r}")


def cubic_map(a: complex, form: str = "az") -> PolynomialMap:
    return PolynomialMap((0, a, 0, 1)) if form == "az" else PolynomialMap((0, 0, a, 1))


def cubic_slice_scan(
    t_min: float, t_max: float, steps: int, max_iter: int = 2000, form: str = "az"
) -> list[tuple[float, bool]]:
    """Connectedness proxy along a = i t: do all critical orbits stay within
    the escape radius 1 + sqrt(1 + |a|) for ``max_iter`` steps?"""
    if not t_min < t_max or steps < 2:
        raise ValueError("need t_min < t_max and steps >= 2")
    out = []
    for t in np.linspace(t_min, t_max, steps):
        a = 1j * float(t)
        out.append((float(t), cubic_connected(a, max_iter, form)))
    return out


def cubic_connected(a: complex, max_iter: int = 2000, form: str = "az") -> bool:
    radius = 1 + math.sqrt(1 + abs(a))
    if form == "az2":
        radius = 1 + abs(a) + 1.0
    for z in cubic_critical_points(a, form):
        for _ in range(max_iter):
            z = z * z * z + (a * z if form == "az" else a * z * z)
            if abs(z) > radius:
                return False
    return True


def solve_cubic_intertwining(seed: complex = INTERTWINE_A_PRINTED) -> SolveReport:
    """Misiurewicz relation P^3(w) = P^2(w) for P = z^3 + a z^2, w = -2a/3.

    0 is a superattracting fixed point (the circle side) and w lands on a
    repelling fixed point after two steps (the segment side, as 0 -> -2 -> 2
    for z^2 - 2).
    """

    def g(a):
        z, dz = -2 * a / 3, -2 / 3 + 0j
        vals = [z]
        ders = [dz]
        for _ in range(3):
            dz = (3 * z * z + 2 * a * z) * dz + z * z
            z = z * z * z + a * z * z
            vals.append(z)
            ders.append(dz)
        return vals[3] - vals[2], ders[3] - ders[2]

    report = _newton(g, seed, "intertwining cubic z^3 + a z^2")
    a = report.parameter
    w = -2 * a / 3
    P = cubic_map(a, "az2")
    if abs(P(w) - w) < DIVISOR_TOL or abs(P(P(w)) - P(w)) < DIVISOR_TOL:
        raise ReducedRelationError("relation reduces (critical orbit lands too early)", report, 1, 1)
    report.relation = (2, 1)
    return report


def limb_root(p: int, q: int) -> complex:
    """Cardioid parameter where the fixed point has multiplier e^(2 pi i p/q)."""
    if not (0 < p < q) or math.gcd(p, q) != 1:
        raise ValueError("need 0 < p < q with gcd(p, q) = 1")
    lam = cmath.exp(2j * math.pi * p / q)
    return lam / 2 - lam * lam / 4


def in_main_cardioid(c, slack: float = 1e-9) -> np.ndarray:
    """Solve mu^2 - 2 mu + 4c = 0 and test min |mu| <= 1 + slack."""
    c = np.asarray(c, dtype=complex)
    root = np.sqrt(1 - 4 * c)
    mu = np.minimum(np.abs(1 - root), np.abs(1 + root))
    return mu <= 1 + slack


def near_mandelbrot(cs: np.ndarray, max_iter: int, threshold: float) -> np.ndarray:
    """Members plus escaping parameters whose distance estimate
    2|z| log|z| / |dz/dc| is below ``threshold`` (keeps thin filaments)."""
    cs = np.asarray(cs, dtype=complex)
    z = np.zeros_like(cs)
    dz = np.zeros_like(cs)
    alive = np.ones(cs.shape, dtype=bool)
    est = np.full(cs.shape, np.inf)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_iter):
            idx = np.nonzero(alive)
            zi = z[idx]
            dz[idx] = 2 * zi * dz[idx] + 1
            z[idx] = zi * zi + cs[idx]
            out = alive & (np.abs(z) > 1e4)
            if np.any(out):
                m = np.abs(z[out])
                est[out] = 2 * m * np.log(m) / np.abs(dz[out])
                alive &= ~out
            if not np.any(alive):
                break
    return alive | (est < threshold)


def cardioid_distance(c) -> np.ndarray:
    """First-order distance from c to the main cardioid (0 inside).

    With mu the smaller fixed-point multiplier, c = mu/2 - mu^2/4 gives
    |dc/dmu| = |1 - mu|/2.
    """
    c = np.asarray(c, dtype=complex)
    root = np.sqrt(1 - 4 * c)
    mu = np.where(np.abs(1 - root) <= np.abs(1 + root), 1 - root, 1 + root)
    excess = np.maximum(np.abs(mu) - 1, 0.0)
    return excess * np.abs(1 - mu) / 2


@dataclass
class LimbEstimate:
    p: int
    q: int
    diameter: float
    pixel: float
    center: complex
    member_pixels: int
    low_resolution: bool

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "diameter": self.diameter,
            "pixel": self.pixel,
            "center_re": self.center.real,
            "center_im": self.center.imag,
            "member_pixels": self.member_pixels,
            "low_resolution": self.low_resolution,
            "q2_times_diameter": self.q**2 * self.diameter,
        }


def limb_diameter(
    p: int,
    q: int,
    radius: float | None = None,
    grid_n: int = 401,
    max_iter: int = 1000,
    band: float = 0.85,
) -> LimbEstimate:
    """Grid estimate of the diameter of the p/q limb of the Mandelbrot set.

    Pixels count as part of M when they are members or lie within one pixel
    by the distance estimate, so filaments stay connected.  A band of
    width ``band`` times the cardioid distance of the period-q center (at
    least two pixels) is removed around the main cardioid, which cuts the
    limb off from its neighbours.  The 4-connected region containing the
    member pixel nearest the period-q center is flood filled and the
    diameter is the largest distance between its boundary pixels and the
    limb root, which belongs to the closure of the limb but falls inside
    the removed band.
    """
    root = limb_root(p, q)
    radius = 4.0 / q if radius is None else radius
    lam = cmath.exp(2j * math.pi * p / q)
    mu = lam * (1 + 1.0 / q**2)
    seed = mu / 2 - mu * mu / 4
    center = solve_superattracting_center(q, seed).parameter

    vp = Viewport.square(root, 2 * radius, grid_n)
    pixel = vp.pixel_size[0]
    cs = vp.grid()
    member = near_mandelbrot(cs, max_iter, pixel)
    cut = max(band * float(cardioid_distance(center)), 2 * pixel)
    member &= cardioid_distance(cs) > cut
    member &= np.abs(cs - root) <= radius
    # seed at the member pixel nearest the center; on coarse grids the
    # center pixel itself can fall in the band or between members
    dist = np.where(member, np.abs(cs - center), np.inf)
    i, j = np.unravel_index(np.argmin(dist), dist.shape)
    if not dist[i, j] <= cut + 4 * pixel:
        raise SolverError(f"no member pixel near the period-{q} center {center:.6g}")

    region = np.zeros_like(member)
    region[i, j] = True
    queue = deque([(i, j)])
    while queue:
        a, b = queue.popleft()
        for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            x, y = a + da, b + db
            if 0 <= x < grid_n and 0 <= y < grid_n and member[x, y] and not region[x, y]:
                region[x, y] = True
                queue.append((x, y))

    padded = np.pad(region, 1)
    interior = (
        padded[1:-1, 1:-1]
        & padded[:-2, 1:-1]
        & padded[2:, 1:-1]
        & padded[1:-1, :-2]
        & padded[1:-1, 2:]
    )
    boundary = np.append(cs[region & ~interior], root)
    diameter = 0.0
    for chunk in np.array_split(boundary, max(1, boundary.size // 2000)):
        diameter = max(diameter, float(np.max(np.abs(chunk[:, None] - boundary[None, :]))))
    low = diameter < 20 * pixel
    return LimbEstimate(p, q, diameter, pixel, center, int(region.sum()), low)


def expanding_heuristic(f: Map, julia_samples: int = 2000, depth: int = 64, seed: int = 0):
    """Minimum distance between the post-critical set and a Julia sample.

    Infinite post-critical points are ignored.  Returns (margin, margin > 1e-3).
    """
    post = postcritical_set(f, depth).finite()
    cloud = inverse_iteration_cloud(f, julia_samples, RenderParams(seed=seed)).finite()
    if post.size == 0 or cloud.size == 0:
        return math.inf, True
    margin = float(np.min(np.abs(post[:, None] - cloud[None, :])))
    return margin, margin > 1e-3
