"""Complex polynomial and rational maps: evaluation, derivatives, critical
points, orbits and post-critical sets.

The point at infinity is represented by ``INFINITY`` (``complex('inf')``);
:func:`is_infinity` tests for any infinite component.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .roots import RootFindingError, durand_kerner

INFINITY = complex(math.inf, 0.0)

# rational maps switch to the chart w = 1/z beyond this modulus
CHART_SWITCH = 1e8
CYCLE_TOL = 1e-9
CYCLE_WINDOW = 64
MAX_PERIOD = 32


def is_infinity(z: complex) -> bool:
    return cmath.isinf(z)


def _trim(coeffs: Sequence[complex], rel: float = 0.0) -> tuple[complex, ...]:
    c = [complex(a) for a in coeffs]
    scale = max((abs(a) for a in c), default=0.0)
    while len(c) > 1 and abs(c[-1]) <= rel * scale:
        c.pop()
    return tuple(c)


def _horner(coeffs: Sequence[complex], z: complex) -> complex:
    acc = 0j
    for a in reversed(coeffs):
        acc = acc * z + a
    return acc


class CommonRootError(ValueError):
    """Numerator and denominator of a rational map share a root."""


class IndeterminateError(ArithmeticError):
    """A 0/0 evaluation, which only happens when the common-root check failed."""


@dataclass(frozen=True)
class PolynomialMap:
    """Polynomial with ascending complex coefficients.

    Constant polynomials are allowed so that derivatives of linear maps and
    derivative numerators stay representable; dynamics needs degree >= 1.
    """

    coefficients: tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(complex(a) for a in self.coefficients)
        if not coeffs:
            raise ValueError("empty coefficient list")
        if coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")
        if not all(cmath.isfinite(a) for a in coeffs):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[complex]) -> "PolynomialMap":
        """Build from ascending coefficients, dropping exact leading zeros."""
        return cls(_trim(coeffs))

    @classmethod
    def quadratic(cls, c: complex) -> "PolynomialMap":
        return cls((c, 0, 1))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> complex:
        return self.coefficients[-1]

    def __call__(self, z: complex) -> complex:
        return eval_map(self, z)

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(z, dtype=complex)
        for a in reversed(self.coefficients):
            acc = acc * z + a
        return acc

    def __str__(self) -> str:
        terms = []
        for i, a in enumerate(self.coefficients):
            if a == 0:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            terms.append(f"({a:g}){mono}" if mono else f"({a:g})")
        return " + ".join(reversed(terms)) or "0"


def _resultant(p: Sequence[complex], q: Sequence[complex]) -> complex:
    """Sylvester resultant of two ascending coefficient lists."""
    m, n = len(p) - 1, len(q) - 1
    if m == 0:
        return p[0] ** n
    if n == 0:
        return q[0] ** m
    size = m + n
    s = np.zeros((size, size), dtype=complex)
    pd, qd = list(p)[::-1], list(q)[::-1]
    for i in range(n):
        s[i, i : i + m + 1] = pd
    for i in range(m):
        s[n + i, i : i + n + 1] = qd
    return complex(np.linalg.det(s))


@dataclass(frozen=True)
class RationalMap:
    """Quotient numerator/denominator of coprime polynomials.

    ``check=False`` skips the common-root test; it is used for derivative
    quotients, whose squared denominators legitimately share roots with the
    numerator at multiple poles.
    """

    numerator: PolynomialMap
    denominator: PolynomialMap
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.check:
            p, q = self.numerator.coefficients, self.denominator.coefficients
            m, n = len(p) - 1, len(q) - 1
            scale = max(abs(a) for a in p) ** n * max(abs(b) for b in q) ** m
            if abs(_resultant(p, q)) < 1e-10 * scale:
                raise CommonRootError("numerator and denominator share a root")

    def __str__(self) -> str:
        return f"({self.numerator}) / ({self.denominator})"

    @property
    def degree(self) -> int:
        return max(self.numerator.degree, self.denominator.degree)

    def __call__(self, z: complex) -> complex:
        return eval_map(self, z)

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; infinite inputs and poles give ``inf``."""
        z = np.asarray(z, dtype=complex)
        out = np.empty_like(z)
        p, q = self.numerator.coefficients, self.denominator.coefficients
        big = ~np.isfinite(z) | (np.abs(z) > CHART_SWITCH)
        small = ~big
        zs = z[small]
        num = np.zeros_like(zs)
        den = np.zeros_like(zs)
        for a in reversed(p):
            num = num * zs + a
        for b in reversed(q):
            den = den * zs + b
        with np.errstate(divide="ignore", invalid="ignore"):
            val = num / den
        val[den == 0] = INFINITY
        out[small] = val
        if np.any(big):
            zb = z[big]
            with np.errstate(divide="ignore", invalid="ignore"):
                w = np.where(np.isfinite(zb), 1.0 / zb, 0j)
            nr = np.zeros_like(w)
            dr = np.zeros_like(w)
            for a in p:  # reversed polynomial w^m p(1/w)
                nr = nr * w + a
            for b in q:
                dr = dr * w + b
            k = len(q) - len(p)  # n - m
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = nr / dr
                val = ratio * w**k if k >= 0 else ratio / w ** (-k)
            bad = ~np.isfinite(val) | (dr == 0)
            val[bad] = INFINITY
            out[big] = val
        return out


Map = Union[PolynomialMap, RationalMap]


def eval_map(f: Map, z: complex) -> complex:
    """Evaluate ``f`` at ``z``, which may be ``INFINITY``.

    Rational maps are evaluated in the chart ``w = 1/z`` once ``|z| > 1e8``.
    A pole returns ``INFINITY``; a 0/0 raises :class:`IndeterminateError`.
    """
    if isinstance(f, PolynomialMap):
        if is_infinity(z):
            return INFINITY if f.degree >= 1 else f.coefficients[0]
        return _horner(f.coefficients, z)
    p, q = f.numerator.coefficients, f.denominator.coefficients
    m, n = len(p) - 1, len(q) - 1
    if is_infinity(z) or abs(z) > CHART_SWITCH:
        w = 0j if is_infinity(z) else 1 / z
        # z^m p(1/z) / z^n q(1/z) evaluated as reversed polynomials in w
        nr = _horner(p[::-1], w)
        dr = _horner(q[::-1], w)
        if dr == 0:
            if nr == 0:
                raise IndeterminateError("0/0 at infinity chart")
            return INFINITY
        ratio = nr / dr
        if m > n:
            return INFINITY if w == 0 else ratio / w ** (m - n)
        return ratio * w ** (n - m)
    num = _horner(p, z)
    den = _horner(q, z)
    if den == 0:
        if num == 0:
            raise IndeterminateError(f"0/0 at z={z}: numerator and denominator share a root")
        return INFINITY
    return num / den


def derivative_map(f: Map) -> Map:
    """Coefficient-exact derivative.

    For a rational map ``p/q`` returns ``(p'q - pq') / q^2`` without the
    common-root check.
    """
    if isinstance(f, PolynomialMap):
        c = f.coefficients
        if len(c) == 1:
            raise ValueError("derivative of a constant is the zero polynomial")
        return PolynomialMap(tuple(i * c[i] for i in range(1, len(c))))
    p = np.polynomial.Polynomial(f.numerator.coefficients)
    q = np.polynomial.Polynomial(f.denominator.coefficients)
    num = p.deriv() * q - p * q.deriv()
    coeffs = _trim(num.coef, rel=1e-14)
    if all(a == 0 for a in coeffs):
        raise ValueError("derivative numerator vanishes identically")
    den = q * q
    return RationalMap(PolynomialMap(coeffs), PolynomialMap(_trim(den.coef)), check=False)


def eval_derivative(f: Map, z: complex) -> complex:
    return eval_map(derivative_map(f), z)


@dataclass(frozen=True)
class PointSet:
    points: tuple[complex, ...]
    label: str = ""
    skipped: int = 0

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def finite(self) -> np.ndarray:
        return np.array([z for z in self.points if not is_infinity(z)], dtype=complex)


@dataclass(frozen=True)
class Orbit:
    points: tuple[complex, ...]
    escaped: bool = False
    escape_index: int | None = None
    cycle_detected: tuple[int, int] | None = None  # (preperiod, period)


def _dist(a: complex, b: complex) -> float:
    ia, ib = is_infinity(a), is_infinity(b)
    if ia or ib:
        return 0.0 if ia and ib else math.inf
    return abs(a - b)


def critical_points(f: Map) -> PointSet:
    """Critical points: roots of the derivative (numerator), plus infinity for
    rational maps whose derivative numerator has degree below ``2d - 2``."""
    if f.degree < 2:
        raise ValueError("critical points need degree >= 2")
    if isinstance(f, PolynomialMap):
        df = derivative_map(f)
        roots = durand_kerner(df.coefficients, max_iter=500, tol=1e-12)
        return PointSet(tuple(complex(r) for r in roots), label="critical points")
    df = derivative_map(f)
    num = df.numerator.coefficients
    pts: list[complex] = []
    if len(num) > 1:
        pts.extend(complex(r) for r in durand_kerner(num, max_iter=500, tol=1e-12))
    deficit = 2 * f.degree - 2 - (len(num) - 1)
    if deficit > 0:
        pts.append(INFINITY)
    return PointSet(tuple(pts), label="critical points")


def _detect_cycle(points: list[complex], tol: float) -> tuple[int, int] | None:
    k = len(points) - 1
    z = points[k]
    lower = max(0, k - CYCLE_WINDOW)
    for p in range(1, min(MAX_PERIOD, k - lower) + 1):
        if _dist(z, points[k - p]) < tol:
            m = k - p
            while m - 1 >= lower and _dist(points[m - 1 + p], points[m - 1]) < tol:
                m -= 1
            return (m, p)
    return None


def orbit(
    f: Map,
    z0: complex,
    n: int,
    escape_radius: float | None = None,
    cycle_tol: float = CYCLE_TOL,
) -> Orbit:
    """Forward orbit ``z0, f(z0), ...`` of at most ``n`` steps.

    Stops early on escape (``|z| >= escape_radius``, overflow counts as escape)
    or when a cycle is detected among the last 64 points.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = [complex(z0)]

    def escaped(z: complex) -> bool:
        if escape_radius is None:
            return False
        return not cmath.isfinite(z) or abs(z) >= escape_radius

    if escaped(pts[0]):
        return Orbit(tuple(pts), True, 0)
    for k in range(1, n + 1):
        try:
            z = eval_map(f, pts[-1])
        except OverflowError:
            z = INFINITY
        if cmath.isnan(z):
            z = INFINITY
        pts.append(z)
        if escaped(z):
            return Orbit(tuple(pts), True, k)
        cyc = _detect_cycle(pts, cycle_tol)
        if cyc is not None:
            return Orbit(tuple(pts), False, None, cyc)
    return Orbit(tuple(pts))


def escape_bound(f: PolynomialMap) -> float:
    """Radius beyond which every orbit of ``f`` tends to infinity."""
    c = f.coefficients
    lower = sum(abs(a) for a in c[:-1])
    return max(2.0, (1.0 + lower) / abs(c[-1]))


def _dedup(points, tol: float) -> list[complex]:
    out: list[complex] = []
    for z in points:
        if all(_dist(z, w) >= tol for w in out):
            out.append(z)
    return out


def postcritical_set(f: Map, depth: int) -> PointSet:
    """Union of ``f^k(c)`` for ``1 <= k <= depth`` over all critical points."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    radius = escape_bound(f) if isinstance(f, PolynomialMap) else None
    pts: list[complex] = []
    for c in critical_points(f):
        if is_infinity(c) and isinstance(f, PolynomialMap):
            continue
        pts.extend(orbit(f, c, depth, radius).points[1:])
    return PointSet(tuple(_dedup(pts, CYCLE_TOL)), label="post-critical set")


def fixed_points(f: Map) -> list[complex]:
    """Finite fixed points: roots of ``p(z) - z q(z)``."""
    if isinstance(f, PolynomialMap):
        p, q = np.polynomial.Polynomial(f.coefficients), np.polynomial.Polynomial([1])
    else:
        p = np.polynomial.Polynomial(f.numerator.coefficients)
        q = np.polynomial.Polynomial(f.denominator.coefficients)
    g = p - np.polynomial.Polynomial([0, 1]) * q
    coeffs = _trim(g.coef, rel=1e-14)
    if len(coeffs) < 2:
        return []
    return [complex(r) for r in durand_kerner(coeffs)]


__all__ = [
    "INFINITY",
    "CommonRootError",
    "IndeterminateError",
    "Map",
    "Orbit",
    "PointSet",
    "PolynomialMap",
    "RationalMap",
    "RootFindingError",
    "critical_points",
    "derivative_map",
    "escape_bound",
    "eval_derivative",
    "eval_map",
    "fixed_points",
    "is_infinity",
    "orbit",
    "postcritical_set",
]
