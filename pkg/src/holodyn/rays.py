"""Angle arithmetic under multiplication by d, rotation numbers of ray
cycles, and numerical tracing of external rays of polynomials."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .maps import PolynomialMap, escape_bound


@dataclass(frozen=True, order=True)
class Angle:
    """Exact rational angle p/q in [0, 1), stored reduced."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        if not 0 <= self.numerator < self.denominator:
            raise ValueError("angle must lie in [0, 1)")
        if math.gcd(self.numerator, self.denominator) != 1:
            raise ValueError("angle must be a reduced fraction")

    @classmethod
    def of(cls, value) -> "Angle":
        """Angle from a Fraction, int, ``"p/q"`` string or (p, q) pair, mod 1."""
        if isinstance(value, Angle):
            return value
        if isinstance(value, tuple):
            value = Fraction(*value)
        frac = Fraction(value) % 1
        return cls(frac.numerator, frac.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __float__(self) -> float:
        return self.numerator / self.denominator

    def __str__(self) -> str:
        return "0" if self.numerator == 0 else f"{self.numerator}/{self.denominator}"

    def times(self, d: int) -> "Angle":
        return Angle.of(Fraction(self.numerator * d, self.denominator))


@dataclass(frozen=True)
class AngleCycle:
    angles: tuple[Angle, ...]  # ascending, i.e. circular order from 0
    degree: int

    def __post_init__(self):
        if self.degree < 2:
            raise ValueError("degree must be >= 2")
        angles = tuple(sorted(Angle.of(a) for a in self.angles))
        if not angles or len(set(angles)) != len(angles):
            raise ValueError("cycle needs distinct angles")
        if {a.times(self.degree) for a in angles} != set(angles):
            raise ValueError("multiplication by the degree does not permute these angles")
        object.__setattr__(self, "angles", angles)

    def __len__(self) -> int:
        return len(self.angles)


class PreperiodicAngleError(ValueError):
    def __init__(self, theta: Angle, preperiod: int, period: int):
        super().__init__(f"angle {theta} is preperiodic (preperiod {preperiod}, period {period})")
        self.preperiod = preperiod
        self.period = period


def angle_orbit(theta: Angle, d: int) -> tuple[list[Angle], int]:
    """Forward orbit until the first repeat; returns (orbit, index of repeat)."""
    seen: dict[Angle, int] = {}
    orb: list[Angle] = []
    a = Angle.of(theta)
    while a not in seen:
        seen[a] = len(orb)
        orb.append(a)
        a = a.times(d)
    return orb, seen[a]


def angle_cycle(theta, d: int) -> AngleCycle:
    """Cycle of a purely periodic angle under multiplication by ``d``."""
    if d < 2:
        raise ValueError("degree must be >= 2")
    orb, start = angle_orbit(Angle.of(theta), d)
    if start != 0:
        raise PreperiodicAngleError(Angle.of(theta), start, len(orb) - start)
    return AngleCycle(tuple(orb), d)


def rotation_number(cycle: AngleCycle) -> Angle:
    """Combinatorial rotation number p/q of a cycle of angles.

    With the angles in circular order, multiplication by the degree must send
    every angle p places forward; otherwise the cycle does not rotate.
    """
    q = len(cycle)
    if q == 1:
        return Angle(0, 1)
    position = {a: i for i, a in enumerate(cycle.angles)}
    shifts = {(position[a.times(cycle.degree)] - i) % q for i, a in enumerate(cycle.angles)}
    if len(shifts) != 1:
        raise ValueError("cycle is not cyclically ordered by the map (no rotation number)")
    return Angle.of(Fraction(shifts.pop(), q))


@dataclass
class RayTrace:
    angle: Angle
    points: list[complex]  # decreasing potential
    landing_estimate: complex
    converged: bool
    diagnostic: str = ""
    potentials: list[float] = field(default_factory=list)
    levels: int = 0

    def to_json(self) -> dict:
        return {
            "angle": str(self.angle),
            "converged": self.converged,
            "diagnostic": self.diagnostic,
            "levels": self.levels,
            "landing_re": self.landing_estimate.real,
            "landing_im": self.landing_estimate.imag,
            "points": [[z.real, z.imag] for z in self.points],
        }


def monic_centered(poly: PolynomialMap) -> tuple[PolynomialMap, complex, complex]:
    """Affine conjugate u -> (P(a u + b) - b) / a that is monic and centred.

    Returns (conjugate, a, b); original coordinates are z = a u + b.
    """
    d = poly.degree
    lead = poly.leading
    a = lead ** (-1.0 / (d - 1)) if lead != 1 else 1 + 0j
    b = -poly.coefficients[d - 1] / (d * lead)
    z = np.polynomial.Polynomial([b, a])
    p = np.polynomial.Polynomial(poly.coefficients)
    comp = np.polynomial.Polynomial([0j])
    for coef in reversed(p.coef):
        comp = comp * z + coef
    q = (comp - b) / a
    coeffs = [complex(c) for c in q.coef]
    coeffs[-1] = 1 + 0j
    if d >= 2:
        coeffs[d - 1] = 0j
    return PolynomialMap(tuple(coeffs[: d + 1])), complex(a), complex(b)


def _newton_preimage(f: PolynomialMap, df: PolynomialMap, target: complex, guess: complex):
    w = guess
    for _ in range(60):
        fw = f(w) - target
        dw = df(w)
        if dw == 0 or not cmath.isfinite(fw):
            return None
        step = fw / dw
        w = w - step
        if not cmath.isfinite(w):
            return None
        if abs(step) <= 1e-15 * max(1.0, abs(w)):
            return w
    if abs(f(w) - target) <= 1e-10 * max(1.0, abs(target)):
        return w
    return None


LANDING_TOL = 1e-9
LANDING_RUN = 3
BRANCH_GUARD = 0.5


def trace_ray(
    poly: PolynomialMap,
    theta,
    levels: int = 200,
    steps_per_level: int = 4,
) -> RayTrace:
    """Trace the external ray of angle ``theta`` by Newton pullback.

    Level k, sublevel s carries potential G0 / d^(k + s/S).  Level 0 uses the
    Boettcher approximation z ~ R^(d^-s/S) e^(2 pi i a) at R = 100 * escape
    bound for every angle a in the forward orbit of theta; each later point
    on ray a is the preimage under P of the matching point on ray d*a one
    level up, found by Newton from the previous point on ray a.  A step
    longer than half the spacing across one level is a branch jump and ends
    the trace unconverged.  Landing is declared after 3 consecutive levels
    moving less than 1e-9.
    """
    theta = Angle.of(theta)
    if poly.degree < 2:
        raise ValueError("ray tracing needs degree >= 2")
    if steps_per_level < 1 or levels < 1:
        raise ValueError("levels and steps_per_level must be >= 1")
    f, scale, shift = monic_centered(poly)
    d = f.degree
    df = PolynomialMap(tuple(i * c for i, c in enumerate(f.coefficients) if i > 0))
    orb, _ = angle_orbit(theta, d)
    big_r = 100.0 * escape_bound(f)
    log_r = math.log(big_r)
    S = steps_per_level

    # rays[a] = list of points along ray a, in decreasing potential
    rays: dict[Angle, list[complex]] = {}
    for a in orb:
        e = cmath.exp(2j * math.pi * float(a))
        rays[a] = [math.exp(log_r * d ** (-s / S)) * e for s in range(S)]

    pots = [log_r * d ** (-s / S) for s in range(S)]
    diagnostic = ""
    converged = False
    run = 0
    done_levels = 0
    for k in range(1, levels + 1):
        new_points: dict[Angle, list[complex]] = {a: [] for a in orb}
        for a in orb:
            image = rays[a.times(d)]
            pts = rays[a]
            for s in range(S):
                target = image[(k - 1) * S + s]
                guess = pts[-1] if not new_points[a] else new_points[a][-1]
                w = _newton_preimage(f, df, target, guess)
                if w is None:
                    diagnostic = f"Newton failed at level {k}, sublevel {s} on ray {a}"
                    break
                # spacing across one full level above the guess
                seq = pts + new_points[a]
                ref_idx = len(seq) - 1 - S
                if ref_idx >= 0:
                    spacing = abs(seq[-1] - seq[ref_idx])
                    if spacing > 1e-13 and abs(w - guess) > BRANCH_GUARD * spacing:
                        diagnostic = (
                            f"branch jump at level {k}, sublevel {s} on ray {a}: "
                            f"step {abs(w - guess):.3e} > {BRANCH_GUARD} x {spacing:.3e}"
                        )
                        w = None
                        break
                new_points[a].append(w)
            if diagnostic:
                break
        if diagnostic:
            break
        for a in orb:
            rays[a].extend(new_points[a])
        pots.extend(log_r * d ** (-(k + s / S)) for s in range(S))
        done_levels = k
        line = rays[theta]
        if abs(line[k * S] - line[(k - 1) * S]) < LANDING_TOL:
            run += 1
            if run >= LANDING_RUN:
                converged = True
                break
        else:
            run = 0
    if not converged and not diagnostic:
        diagnostic = f"no landing within {levels} levels"
    pts = [scale * u + shift for u in rays[theta]]
    return RayTrace(theta, pts, pts[-1], converged, diagnostic, pots[: len(pts)], done_levels)


def ray_lands_at(poly: PolynomialMap, theta, target: complex, tol: float = 1e-6) -> bool:
    trace = trace_ray(poly, theta)
    return trace.converged and abs(trace.landing_estimate - target) < tol


def parse_angles(text: str | Iterable) -> list[Angle]:
    if isinstance(text, str):
        text = [t for t in text.split(",") if t.strip()]
    return [Angle.of(Fraction(t.strip()) if isinstance(t, str) else t) for t in text]


def cycle_from_angles(angles: Sequence, degree: int) -> AngleCycle:
    return AngleCycle(tuple(Angle.of(a) for a in angles), degree)
