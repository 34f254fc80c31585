"""Escape-time, distance-estimate, attraction-time and inverse-iteration
pictures of Julia and Mandelbrot sets."""

from __future__ import annotations

import math

import numpy as np

from .images import ImageGrid, RenderParams, Viewport, map_rows
from .maps import (
    INFINITY,
    Map,
    PointSet,
    PolynomialMap,
    RationalMap,
    derivative_map,
    escape_bound,
    eval_map,
    critical_points,
    fixed_points,
    is_infinity,
    orbit,
)

BURN_IN = 100
PERIOD_SCAN = 32
PERIOD_TOL = 1e-6
DISTANCE_BAILOUT = 1e8


def _radius(f: PolynomialMap, params: RenderParams) -> float:
    bound = escape_bound(f)
    if params.escape_radius is None:
        return bound
    if params.escape_radius < bound:
        raise ValueError(
            f"escape radius {params.escape_radius} is below the escape bound {bound:.6g}"
        )
    return params.escape_radius


def smooth_count(k: int, modulus: np.ndarray, radius: float, degree: int) -> np.ndarray:
    """k + 1 - log(log|z_k| / log R) / log d, kept inside (k, k + 1]."""
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.log(np.log(modulus) / math.log(radius)) / math.log(degree)
    frac = np.nan_to_num(frac, nan=0.0, posinf=1.0, neginf=0.0)
    frac = np.clip(frac, 0.0, 1.0 - 1e-9)
    return k + 1.0 - frac


def _detect_periods(step, z: np.ndarray) -> np.ndarray:
    """Smallest p <= 32 with |f^p(z) - z| < 1e-6, else 0."""
    period = np.zeros(z.shape, dtype=np.int32)
    w = z.copy()
    for p in range(1, PERIOD_SCAN + 1):
        w = step(w)
        hit = (period == 0) & (np.abs(w - z) < PERIOD_TOL)
        period[hit] = p
    return period


def _escape_block(step, degree: int, radius: float, max_iter: int, zs: np.ndarray):
    shape = zs.shape
    z = zs.ravel().copy()
    val = np.zeros(z.size)
    idx = np.arange(z.size)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(max_iter + 1):
            az = np.abs(z)
            esc = ~(az < radius)
            if esc.any():
                val[idx[esc]] = smooth_count(k, az[esc], radius, degree)
                keep = ~esc
                z, idx = z[keep], idx[keep]
            if k == max_iter or idx.size == 0:
                break
            z = step(z)
        interior = np.zeros(val.size, dtype=np.int32)
        if idx.size:
            interior[idx] = _detect_periods(step, z)
    return val.reshape(shape), interior.reshape(shape)


def escape_time_grid(f: PolynomialMap, viewport: Viewport, params: RenderParams) -> ImageGrid:
    """Smoothed escape count per pixel; 0 marks pixels bounded for ``max_iter`` steps.

    The ``interior`` channel holds the attracting period detected at bounded
    pixels (0 if none up to 32).
    """
    if not isinstance(f, PolynomialMap):
        raise TypeError("escape time needs a polynomial; use attraction_grid for rational maps")
    if f.degree < 2:
        raise ValueError("escape time needs degree >= 2")
    radius = _radius(f, params)
    blocks = map_rows(
        viewport,
        lambda zs: _escape_block(f.eval_array, f.degree, radius, params.max_iter, zs),
        params.threads,
    )
    values = np.vstack([b[0] for b in blocks])
    interior = np.vstack([b[1] for b in blocks])
    return ImageGrid(viewport, values, "smoothed escape count", interior)


def mandelbrot_grid(viewport: Viewport, params: RenderParams) -> ImageGrid:
    """Smoothed escape count of the critical orbit of z^2 + c over the c-plane."""
    radius = 2.0 if params.escape_radius is None else max(2.0, params.escape_radius)

    def block(cs: np.ndarray):
        shape = cs.shape
        c = cs.ravel()
        z = np.zeros_like(c)
        val = np.zeros(c.size)
        idx = np.arange(c.size)
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(params.max_iter + 1):
                az = np.abs(z)
                esc = ~(az <= radius)
                if esc.any():
                    val[idx[esc]] = smooth_count(k, az[esc], radius, 2)
                    keep = ~esc
                    z, c, idx = z[keep], c[keep], idx[keep]
                if k == params.max_iter or idx.size == 0:
                    break
                z = z * z + c
        return val.reshape(shape), None

    blocks = map_rows(viewport, block, params.threads)
    return ImageGrid(viewport, np.vstack([b[0] for b in blocks]), "mandelbrot escape count")


def mandelbrot_members(cs: np.ndarray, max_iter: int, radius: float = 2.0) -> np.ndarray:
    """Boolean membership of the parameters ``cs`` after ``max_iter`` steps."""
    c = np.asarray(cs, dtype=complex).ravel()
    z = np.zeros_like(c)
    alive = np.ones(c.size, dtype=bool)
    idx = np.arange(c.size)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_iter):
            z = z * z + c
            esc = ~(np.abs(z) <= radius)
            if esc.any():
                alive[idx[esc]] = False
                keep = ~esc
                z, c, idx = z[keep], c[keep], idx[keep]
            if idx.size == 0:
                break
    return alive.reshape(np.shape(cs))


def distance_estimate_grid(f: PolynomialMap, viewport: Viewport, params: RenderParams) -> ImageGrid:
    """Koebe lower bound on the distance to the Julia set at escaping pixels.

    With Green's function G and gradient |G'| (both read off the orbit once
    it passes 1e8) the bound is (1 - exp(-2G)) / (4 |G'|); near the Julia set
    it tends to half the classical |z| log|z| / |z'| estimate.  The bound is
    rigorous for connected Julia sets.  Non-escaping pixels hold 0.
    """
    if not isinstance(f, PolynomialMap) or f.degree < 2:
        raise TypeError("distance estimation needs a polynomial of degree >= 2")
    radius = _radius(f, params)
    d = f.degree
    log_lead = math.log(abs(f.leading)) / (d - 1)
    df = derivative_map(f)
    extra = 200

    def block(zs: np.ndarray):
        shape = zs.shape
        z = zs.ravel().copy()
        dz = np.ones_like(z)
        out = np.zeros(z.size)
        idx = np.arange(z.size)
        escaped = np.zeros(z.size, dtype=bool)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            for k in range(params.max_iter + extra + 1):
                az = np.abs(z)
                escaped |= ~(az < radius) & (k <= params.max_iter)
                done = escaped & (~(az <= DISTANCE_BAILOUT) | (k == params.max_iter + extra))
                if k == params.max_iter:
                    # never escaped: drop
                    drop = ~escaped
                    done = done | drop
                if done.any():
                    sel = done & escaped
                    if sel.any():
                        a = az[sel]
                        lg = np.log(a) + log_lead
                        g = lg * math.exp(-k * math.log(d)) if k * math.log(d) < 700 else lg * 0.0
                        x = 2.0 * g
                        phi = np.where(x > 1e-12, -np.expm1(-x) / np.where(x > 0, x, 1.0), 1.0)
                        est = phi * lg * a / (2.0 * np.abs(dz[sel]))
                        est = np.where(np.isfinite(est) & (est > 0), est, 0.0)
                        out[idx[sel]] = est
                    keep = ~done
                    z, dz, idx, escaped = z[keep], dz[keep], idx[keep], escaped[keep]
                if idx.size == 0:
                    break
                dz = df.eval_array(z) * dz
                z = f.eval_array(z)
        return out.reshape(shape), None

    blocks = map_rows(viewport, block, params.threads)
    return ImageGrid(viewport, np.vstack([b[0] for b in blocks]), "distance lower bound")


def repelling_fixed_point(f: Map) -> complex:
    """Finite fixed point with the largest multiplier modulus (> 1)."""
    df = derivative_map(f)
    best, best_mult = None, 1.0
    for z in fixed_points(f):
        mult = abs(eval_map(df, z))
        if mult > best_mult:
            best, best_mult = z, mult
    if best is None:
        raise ValueError("map has no finite repelling fixed point")
    return best


def _preimage_coeffs(f: Map, z: complex) -> np.ndarray:
    if isinstance(f, PolynomialMap):
        c = np.array(f.coefficients, dtype=complex)
        c[0] -= z
        return c
    p = np.array(f.numerator.coefficients, dtype=complex)
    q = np.array(f.denominator.coefficients, dtype=complex)
    n = max(len(p), len(q))
    p = np.pad(p, (0, n - len(p)))
    q = np.pad(q, (0, n - len(q)))
    return p - z * q


def preimages(f: Map, z: complex) -> list[complex]:
    """Finite solutions w of f(w) = z; fewer than deg f when one is infinity."""
    c = _preimage_coeffs(f, z)
    scale = np.max(np.abs(c))
    while len(c) > 1 and abs(c[-1]) <= 1e-14 * scale:
        c = c[:-1]
    if len(c) < 2:
        return []
    if len(c) == 3:
        c0, b, a = c
        disc = np.sqrt(b * b - 4 * a * c0)
        # sign choice avoids cancellation
        if (b.conjugate() * disc).real < 0:
            disc = -disc
        q = -(b + disc) / 2
        if q == 0:
            return [0j, 0j]
        return [complex(q / a), complex(c0 / q)]
    return [complex(r) for r in np.roots(c[::-1])]


def inverse_iteration_cloud(f: Map, n_points: int, params: RenderParams) -> PointSet:
    """Sample the Julia set by random backward iteration.

    Starts at a repelling fixed point, picks one of the d preimage branches
    uniformly with a counter-based (Philox) generator, discards the first 100
    points.  Samples whose chosen branch is infinite or non-finite are skipped
    and counted in ``skipped``.
    """
    if f.degree < 2:
        raise ValueError("inverse iteration needs degree >= 2")
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    rng = np.random.Generator(np.random.Philox(params.seed))
    d = f.degree
    z = repelling_fixed_point(f)
    pts: list[complex] = []
    skipped = 0
    step = 0
    limit = 50 * (n_points + BURN_IN)
    while len(pts) < n_points and step < limit:
        step += 1
        branch = int(rng.integers(d))
        roots = preimages(f, z)
        if branch >= len(roots) or not np.isfinite(roots[branch]):
            skipped += 1
            continue
        z = roots[branch]
        if step > BURN_IN:
            pts.append(z)
    return PointSet(tuple(pts), label="inverse iteration cloud", skipped=skipped)


def cloud_to_grid(cloud: PointSet, viewport: Viewport) -> np.ndarray:
    """Histogram of cloud points per pixel."""
    counts = np.zeros((viewport.pixels_y, viewport.pixels_x))
    pts = cloud.finite()
    if pts.size == 0:
        return counts
    col, row = viewport.plane_to_pixel(pts)
    col = np.rint(col).astype(int)
    row = np.rint(row).astype(int)
    ok = (col >= 0) & (col < viewport.pixels_x) & (row >= 0) & (row < viewport.pixels_y)
    np.add.at(counts, (row[ok], col[ok]), 1)
    return counts


def attracting_cycles(f: Map, depth: int = 4000) -> list[tuple[complex, ...]]:
    """Cycles reached by critical orbits (the attracting or parabolic cycles)."""
    cycles: list[tuple[complex, ...]] = []
    radius = escape_bound(f) if isinstance(f, PolynomialMap) else None
    for c in critical_points(f):
        if is_infinity(c) and isinstance(f, PolynomialMap):
            continue
        orb = orbit(f, c, depth, radius)
        if orb.cycle_detected is None:
            continue
        m, p = orb.cycle_detected
        cyc = tuple(orb.points[m : m + p])
        known = any(
            any(_chordal(np.array([cyc[0]]), w)[0] < 1e-6 for w in other) for other in cycles
        )
        if not known:
            cycles.append(cyc)
    return cycles


def _chordal(z: np.ndarray, w: complex) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    finite = np.isfinite(z)
    out = np.empty(z.shape)
    with np.errstate(over="ignore", invalid="ignore"):
        if is_infinity(w):
            out[finite] = 2.0 / np.sqrt(1.0 + np.abs(z[finite]) ** 2)
            out[~finite] = 0.0
        else:
            zf = z[finite]
            out[finite] = 2 * np.abs(zf - w) / np.sqrt((1 + np.abs(zf) ** 2) * (1 + abs(w) ** 2))
            out[~finite] = 2.0 / math.sqrt(1.0 + abs(w) ** 2)
    return out


def attraction_grid(
    f: Map, viewport: Viewport, params: RenderParams, eps: float = 1e-4
) -> ImageGrid:
    """Steps until the orbit comes within chordal distance ``eps`` of an
    attracting cycle found from the critical orbits; 0 if never.

    Works for rational maps (infinity allowed) where escape time does not.
    The ``interior`` channel stores 1 + the index of the capturing cycle.
    """
    cycles = attracting_cycles(f)
    targets = [(i, w) for i, cyc in enumerate(cycles) for w in cyc]
    step = f.eval_array

    def block(zs: np.ndarray):
        shape = zs.shape
        z = zs.ravel().copy()
        val = np.zeros(z.size)
        which = np.zeros(z.size, dtype=np.int32)
        idx = np.arange(z.size)
        for k in range(params.max_iter + 1):
            hit = np.zeros(z.size, dtype=bool)
            for i, w in targets:
                close = ~hit & (_chordal(z, w) < eps)
                if close.any():
                    which[idx[close]] = i + 1
                    hit |= close
            if hit.any():
                val[idx[hit]] = k + 1
                keep = ~hit
                z, idx = z[keep], idx[keep]
            if k == params.max_iter or idx.size == 0:
                break
            with np.errstate(all="ignore"):
                z = step(z)
            z = np.where(np.isnan(z), INFINITY, z)
        return val.reshape(shape), which.reshape(shape)

    blocks = map_rows(viewport, block, params.threads)
    values = np.vstack([b[0] for b in blocks])
    which = np.vstack([b[1] for b in blocks])
    return ImageGrid(viewport, values, "attraction time", which)


__all__ = [
    "attracting_cycles",
    "attraction_grid",
    "cloud_to_grid",
    "distance_estimate_grid",
    "escape_time_grid",
    "inverse_iteration_cloud",
    "mandelbrot_grid",
    "mandelbrot_members",
    "preimages",
    "repelling_fixed_point",
    "smooth_count",
]
