"""Quadratic Henon maps (x, y) -> (x^2 + c - delta y, x) on C^2."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .images import ImageGrid, RenderParams, Viewport, map_rows


@dataclass(frozen=True)
class HenonMap:
    c: complex
    delta: complex

    def __post_init__(self):
        if self.delta == 0:
            raise ValueError("delta must be nonzero (the map would not be invertible)")
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "delta", complex(self.delta))

    def __call__(self, x, y):
        return x * x + self.c - self.delta * y, x

    def inverse(self, x, y):
        return y, (y * y + self.c - x) / self.delta

    def jacobian(self, x, y) -> np.ndarray:
        return np.array([[2 * x, -self.delta], [1, 0]], dtype=complex)

    def fixed_points(self) -> tuple[complex, complex]:
        """Diagonal solutions of x^2 - (1 + delta) x + c = 0."""
        b = 1 + self.delta
        disc = cmath.sqrt(b * b - 4 * self.c)
        return (b + disc) / 2, (b - disc) / 2

    def escape_radius(self) -> float:
        return max(10.0, 2 * (1 + abs(self.c) + abs(self.delta)))


def henon_from_eigenvalues(lam: complex, mu: complex) -> HenonMap:
    """The Henon map with a fixed point (x*, x*) whose eigenvalues are lam, mu.

    The Jacobian there has trace 2x* and determinant delta, so
    x* = (lam + mu)/2, delta = lam mu and c = x*(1 + delta) - x*^2.
    """
    lam, mu = complex(lam), complex(mu)
    if lam * mu == 0:
        raise ValueError("eigenvalues must be nonzero")
    delta = lam * mu
    x = (lam + mu) / 2
    return HenonMap(x * (1 + delta) - x * x, delta)


def fixed_point_for(lam: complex, mu: complex) -> complex:
    return (complex(lam) + complex(mu)) / 2


def fixed_point_eigenvalues(h: HenonMap, x: complex) -> np.ndarray:
    return np.linalg.eigvals(h.jacobian(x, x))


@dataclass
class Orbit2D:
    points: list[tuple[complex, complex]]
    escaped: bool
    escape_index: int | None = None


def orbit2d(h: HenonMap, point, n: int, escape_radius: float | None = None) -> Orbit2D:
    """Forward orbit in the max norm; overflow counts as escape."""
    if n < 1:
        raise ValueError("n must be >= 1")
    radius = h.escape_radius() if escape_radius is None else escape_radius
    x, y = complex(point[0]), complex(point[1])
    pts = [(x, y)]
    for k in range(n):
        if not (cmath.isfinite(x) and cmath.isfinite(y)) or max(abs(x), abs(y)) > radius:
            return Orbit2D(pts, True, k)
        try:
            x, y = h(x, y)
        except OverflowError:
            return Orbit2D(pts, True, k + 1)
        pts.append((x, y))
    if not (cmath.isfinite(x) and cmath.isfinite(y)) or max(abs(x), abs(y)) > radius:
        return Orbit2D(pts, True, n)
    return Orbit2D(pts, False)


@dataclass(frozen=True)
class Section:
    """Real 2-plane through C^2 drawn on a viewport.

    With ``fix_y`` set, pixel w gives the point (w, fix_y).  Otherwise pixel
    u + iv gives (u + i imag_x, v + i imag_y).
    """

    fix_y: complex | None = None
    imag_x: float = 0.0
    imag_y: float = 0.0

    def lift(self, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.fix_y is not None:
            return w.astype(complex), np.full(w.shape, complex(self.fix_y))
        return w.real + 1j * self.imag_x, w.imag + 1j * self.imag_y


def kplus_slice(
    h: HenonMap, section: Section, viewport: Viewport, params: RenderParams = RenderParams()
) -> ImageGrid:
    """Escape time over a slice of C^2: k + 1 for escape at step k, 0 if
    the orbit stays within the escape radius for ``max_iter`` steps."""
    radius = h.escape_radius() if params.escape_radius is None else params.escape_radius

    def block(w):
        x, y = section.lift(w)
        out = np.zeros(w.shape)
        alive = np.ones(w.shape, dtype=bool)
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(params.max_iter + 1):
                gone = alive & ~(np.maximum(np.abs(x), np.abs(y)) <= radius)
                out[gone] = k + 1
                alive &= ~gone
                if k == params.max_iter or not alive.any():
                    break
                idx = np.nonzero(alive)
                xi = x[idx]
                x[idx], y[idx] = xi * xi + h.c - h.delta * y[idx], xi
        return (out,)

    rows = map_rows(viewport, block, params.threads)
    values = np.vstack([r[0] for r in rows])
    label = f"escape time in C^2 slice ({'y fixed' if section.fix_y is not None else 'real plane'})"
    return ImageGrid(viewport, values, label)


def jacobian_determinant(h: HenonMap, x: complex, y: complex) -> complex:
    return complex(np.linalg.det(h.jacobian(x, y)))


def random_eigenvalues(rng: np.random.Generator, low: float = 0.1, high: float = 3.0):
    r = rng.uniform(low, high, 2)
    t = rng.uniform(0, 2 * math.pi, 2)
    return complex(cmath.rect(r[0], t[0])), complex(cmath.rect(r[1], t[1]))
