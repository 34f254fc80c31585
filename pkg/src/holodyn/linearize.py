"""Continued fractions, Brjuno-type partial sums and Liouville-style
rotation numbers for the family lambda z + z^2."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .maps import PolynomialMap

CONVERGENT_INCREMENT = 1e-6
DIVERGENT_SUM = 50.0
# largest q_k^2 for which ceil(exp(q_k^2)) is built exactly (about 87k digits)
MAX_EXPONENT = 200_000


@dataclass
class ContinuedFraction:
    """x = [0; a1, a2, ...] with convergents p_k / q_k, k = 1..n.

    ``terminated`` is set when the expansion of a rational ended before the
    requested length.  ``overflowed`` marks a construction cut short because
    the next quotient was not representable.
    """

    partial_quotients: list[int]
    convergents: list[tuple[int, int]] = field(default_factory=list)
    terminated: bool = False
    overflowed: bool = False

    def __post_init__(self):
        if any(int(a) != a or a < 1 for a in self.partial_quotients):
            raise ValueError("partial quotients must be positive integers")
        self.partial_quotients = [int(a) for a in self.partial_quotients]
        if not self.convergents:
            self.convergents = convergents(self.partial_quotients)

    @property
    def truncated(self) -> bool:
        return self.terminated or self.overflowed

    def value(self) -> Fraction:
        p, q = self.convergents[-1]
        return Fraction(p, q)


def convergents(quotients: Sequence[int]) -> list[tuple[int, int]]:
    p_prev, q_prev = 1, 0
    p, q = 0, 1
    out = []
    for a in quotients:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        out.append((p, q))
    return out


def evaluate(quotients: Sequence[int]) -> Fraction:
    """Exact value of [0; a1, ..., an]."""
    if not quotients:
        raise ValueError("need at least one partial quotient")
    p, q = convergents(quotients)[-1]
    return Fraction(p, q)


def continued_fraction(x, n: int) -> ContinuedFraction:
    """First ``n`` partial quotients of ``x`` in (0, 1) by the Gauss map.

    ``x`` may be a float, a Fraction (exact) or an mpmath number (at the
    working precision).  Rationals stop early and come back flagged.  A
    remainder within the propagated rounding error (never less than 1e-12
    for floats) counts as zero, so 1/3 gives [3].
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    exact = isinstance(x, (Fraction, int))
    if isinstance(x, float):
        tiny, floor_tol = 2.0**-52, 1e-12
    elif exact:
        x = Fraction(x)
        tiny = floor_tol = 0
    else:
        x = mpmath.mpf(x)
        tiny = floor_tol = mpmath.mpf(2) ** (-mpmath.mp.prec + 8)
    if not 0 < x < 1:
        raise ValueError("x must lie strictly between 0 and 1")
    quotients: list[int] = []
    terminated = False
    err = tiny * x  # absolute error in x; the Gauss map scales it by about 1/x^2
    for _ in range(n):
        y = 1 / x
        if not exact:
            err = err / (x * x) + tiny * y
        a = int(math.floor(y)) if exact or isinstance(y, float) else int(mpmath.floor(y))
        rest = y - a
        if not exact and 1 - rest <= max(err, floor_tol):
            a, rest = a + 1, 0  # y sat just below an integer
        quotients.append(a)
        if rest <= max(err, floor_tol):
            terminated = len(quotients) < n
            break
        x = rest
    return ContinuedFraction(quotients, terminated=terminated)


def _log_ratio(num: int, den: int) -> float:
    """log(num) / den for arbitrarily large positive integers."""
    return math.log(num) / den


@dataclass
class BrjunoReport:
    partial_sums: list[float]
    verdict: str  # "convergent-looking" | "divergent-looking" | "undetermined"

    @property
    def total(self) -> float:
        return self.partial_sums[-1] if self.partial_sums else 0.0

    @property
    def last_increment(self) -> float:
        if not self.partial_sums:
            return math.inf
        if len(self.partial_sums) == 1:
            return self.partial_sums[0]
        return self.partial_sums[-1] - self.partial_sums[-2]

    def to_json(self, cf: ContinuedFraction | None = None) -> dict:
        out = {"partial_sums": self.partial_sums, "verdict": self.verdict}
        if cf is not None:
            out["partial_quotients"] = [
                a if a < 10**15 else f"~1e{int(a.bit_length() * math.log10(2))}"
                for a in cf.partial_quotients
            ]
        return out


def brjuno_partial(cf: ContinuedFraction, n: int) -> BrjunoReport:
    """Partial sums of log(q_{k+1}) / q_k for k = 1..n.

    Uses as many terms as the convergents allow.  Verdicts: divergent-looking
    once the sum passes 50, otherwise convergent-looking when the last
    increment is below 1e-6, otherwise undetermined.  A terminated
    (rational) expansion is never called convergent.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    qs = [q for _, q in cf.convergents]
    sums: list[float] = []
    total = 0.0
    for k in range(min(n, len(qs) - 1)):
        total += _log_ratio(qs[k + 1], qs[k])
        sums.append(total)
    report = BrjunoReport(sums, "undetermined")
    if total > DIVERGENT_SUM:
        report.verdict = "divergent-looking"
    elif sums and not cf.terminated and report.last_increment < CONVERGENT_INCREMENT:
        report.verdict = "convergent-looking"
    return report


@dataclass
class CremerCandidate:
    """theta as a convergent with error bound 1/q^2 plus its float value."""

    convergent: Fraction
    error_bound: float
    cf: ContinuedFraction

    @property
    def theta(self) -> float:
        return float(self.convergent)

    def multiplier(self) -> complex:
        return cmath.exp(2j * math.pi * self.theta)


def _ceil_exp(n: int) -> int | None:
    """ceil(exp(n)) as an exact integer, or None when too large."""
    if n > MAX_EXPONENT:
        return None
    digits = int(n / math.log(10)) + 30
    with mpmath.workdps(digits):
        return int(mpmath.ceil(mpmath.exp(n)))


def cremer_candidate_angle(depth: int, seed: int = 2) -> CremerCandidate:
    """Rotation number with a_1 = ``seed`` and a_(k+1) = ceil(exp(q_k^2)).

    The quotients grow so fast that the Brjuno sum diverges within a few
    terms.  Construction stops (``cf.overflowed``) once a quotient would
    exceed exact integer construction.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    quotients = [seed]
    overflowed = False
    while len(quotients) < depth:
        q = convergents(quotients)[-1][1]
        a = _ceil_exp(q * q)
        if a is None:
            overflowed = True
            break
        quotients.append(a)
    cf = ContinuedFraction(quotients, overflowed=overflowed)
    p, q = cf.convergents[-1]
    return CremerCandidate(Fraction(p, q), 1.0 / float(q) ** 2 if q < 10**150 else 0.0, cf)


def linearization_family(theta: float) -> PolynomialMap:
    """lambda z + z^2 with lambda = exp(2 pi i theta)."""
    return PolynomialMap((0, cmath.exp(2j * math.pi * theta), 1))


GOLDEN_MEAN = (math.sqrt(5) - 1) / 2
