"""Command-line interface: ``holodyn <group> <command> [options]``.

Every command prints one JSON object on stdout.  Exit status is 0 on
success, 1 when a computation or verification fails and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import henon, interval, linearize, rays, solvers
from .figures import reproduce_figures
from .images import RenderParams, Viewport, write_image
from .maps import PolynomialMap, RationalMap
from .render import (
    attraction_grid,
    cloud_to_grid,
    distance_estimate_grid,
    escape_time_grid,
    inverse_iteration_cloud,
    mandelbrot_grid,
)
from .images import COLORMAPS, ImageGrid

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """Parse "a+bi", "a-bj", "bi", "a" (spaces ignored)."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("i", "j")
    if not s:
        raise argparse.ArgumentTypeError("empty complex number")
    if re.fullmatch(r"[+-]?j", s):
        s = s.replace("j", "1j")
    s = re.sub(r"([+-])j$", r"\g<1>1j", s)
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_coeffs(text: str) -> tuple[complex, ...]:
    """Ascending coefficients separated by commas or semicolons."""
    parts = [p for p in re.split(r"[;,]", text) if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("no coefficients given")
    return tuple(parse_complex(p) for p in parts)


def parse_real(text: str):
    """A float, an exact "p/q", or "golden"."""
    t = text.strip()
    if t == "golden":
        return linearize.GOLDEN_MEAN
    if "/" in t:
        try:
            return Fraction(t)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None
    try:
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, default=str))


def _map_from_args(args):
    if args.rational:
        num, _, den = args.rational.partition("/")
        if not den:
            raise UsageError("--rational needs NUM/DEN coefficient lists, e.g. '0,0,1/-1,0,1'")
        return RationalMap(PolynomialMap(parse_coeffs(num)), PolynomialMap(parse_coeffs(den)))
    if args.coeffs:
        return PolynomialMap(parse_coeffs(args.coeffs))
    return PolynomialMap.quadratic(args.c)


def _params(args) -> RenderParams:
    return RenderParams(
        max_iter=args.max_iter, escape_radius=getattr(args, "escape_radius", None),
        seed=args.seed, threads=args.threads,
    )


def _viewport(args) -> Viewport:
    return Viewport.square(args.center, args.width, args.size)


def _write(grid: ImageGrid, args) -> dict:
    write_image(grid, args.colormap, args.out)
    return {
        "output": str(args.out),
        "format": "P5" if args.colormap == "gray" else "P6",
        "width": grid.viewport.pixels_x,
        "height": grid.viewport.pixels_y,
        "channel": grid.channel_label,
    }


def cmd_render_julia(args) -> int:
    f = _map_from_args(args)
    vp, params = _viewport(args), _params(args)
    mode = args.mode
    if mode == "auto":
        mode = "escape" if isinstance(f, PolynomialMap) else "attraction"
    if mode == "escape":
        grid = escape_time_grid(f, vp, params)
    elif mode == "distance":
        grid = distance_estimate_grid(f, vp, params)
    elif mode == "attraction":
        grid = attraction_grid(f, vp, params)
    else:
        cloud = inverse_iteration_cloud(f, args.points, params)
        grid = ImageGrid(vp, cloud_to_grid(cloud, vp), "inverse iteration hits")
    out = _write(grid, args)
    out.update({"map": str(f), "mode": mode})
    _emit(out)
    return EXIT_OK


def cmd_render_mandelbrot(args) -> int:
    grid = mandelbrot_grid(_viewport(args), _params(args))
    _emit(_write(grid, args))
    return EXIT_OK


def cmd_render_henon(args) -> int:
    if args.lam is not None or args.mu is not None:
        if args.lam is None or args.mu is None:
            raise UsageError("--lam and --mu go together")
        h = henon.henon_from_eigenvalues(args.lam, args.mu)
    else:
        h = henon.HenonMap(args.c, args.delta)
    section = henon.Section(args.fix_y, args.imag_x, args.imag_y)
    grid = henon.kplus_slice(h, section, _viewport(args), _params(args))
    out = _write(grid, args)
    out.update({"c_re": h.c.real, "c_im": h.c.imag, "delta_re": h.delta.real, "delta_im": h.delta.imag})
    _emit(out)
    return EXIT_OK


def cmd_ray_trace(args) -> int:
    poly = PolynomialMap(parse_coeffs(args.coeffs)) if args.coeffs else PolynomialMap.quadratic(args.c)
    trace = rays.trace_ray(poly, rays.Angle.of(Fraction(args.angle)), args.levels, args.steps)
    out = trace.to_json()
    if not args.points:
        out.pop("points")
    _emit(out)
    return EXIT_OK if trace.converged else EXIT_FAILED


def cmd_ray_rotation(args) -> int:
    angles = rays.parse_angles(args.angles)
    cycle = rays.cycle_from_angles(angles, args.degree)
    rho = rays.rotation_number(cycle)
    _emit({"angles": [str(a) for a in cycle.angles], "degree": args.degree, "rotation_number": str(rho)})
    return EXIT_OK


def _report_failure(exc: solvers.SolverError, extra: dict | None = None) -> int:
    payload = exc.report.to_json() if exc.report is not None else {"converged": False}
    payload["error"] = str(exc)
    if isinstance(exc, solvers.ReducedRelationError):
        payload["reduced_to"] = {"preperiod": exc.preperiod, "period": exc.period}
    payload.update(extra or {})
    _emit(payload)
    return EXIT_FAILED


def cmd_solve_center(args) -> int:
    try:
        report = solvers.solve_superattracting_center(args.period, args.seed)
    except solvers.SolverError as exc:
        return _report_failure(exc)
    _emit(report.to_json())
    return EXIT_OK


def cmd_solve_misiurewicz(args) -> int:
    try:
        report = solvers.solve_misiurewicz(args.preperiod, args.period, args.seed)
    except solvers.SolverError as exc:
        extra = {}
        found = solvers.nearest_genuine_relation(args.seed)
        if found is not None:
            (m, p), rep = found
            extra["nearest_relation"] = {
                "preperiod": m, "period": p,
                "parameter_re": rep.parameter.real, "parameter_im": rep.parameter.imag,
            }
        return _report_failure(exc, extra)
    _emit(report.to_json())
    return EXIT_OK


def _verification(rep: solvers.VerificationReport) -> int:
    _emit(rep.to_json())
    return EXIT_OK if rep.passed else EXIT_FAILED


def cmd_solve_mating(args) -> int:
    return _verification(solvers.verify_mating(args.tol))


def cmd_solve_intertwine(args) -> int:
    if args.kind == "basilica":
        return _verification(solvers.verify_intertwined_basilica(args.tol))
    try:
        report = solvers.solve_cubic_intertwining(args.seed)
    except solvers.SolverError as exc:
        return _report_failure(exc)
    out = report.to_json()
    out["normalization"] = "z^3 + a z^2"
    out["scan"] = [
        {"t": t, "connected": ok}
        for t, ok in solvers.cubic_slice_scan(args.scan_min, args.scan_max, args.scan_steps, form="az2")
    ]
    _emit(out)
    return EXIT_OK


def cmd_solve_limb(args) -> int:
    rows = []
    for q in args.q:
        est = solvers.limb_diameter(args.p, q, grid_n=args.grid, max_iter=args.max_iter)
        rows.append(est.to_json())
    _emit({"limbs": rows})
    return EXIT_OK


def cmd_linearize_cf(args) -> int:
    cf = linearize.continued_fraction(args.x, args.n)
    _emit({
        "partial_quotients": cf.partial_quotients,
        "convergents": [[p, q] for p, q in cf.convergents],
        "truncated": cf.truncated,
    })
    return EXIT_OK


def cmd_linearize_brjuno(args) -> int:
    cf = linearize.continued_fraction(args.x, args.n + 1)
    _emit(linearize.brjuno_partial(cf, args.n).to_json(cf))
    return EXIT_OK


def cmd_linearize_cremer(args) -> int:
    cand = linearize.cremer_candidate_angle(args.depth)
    rep = linearize.brjuno_partial(cand.cf, args.depth)
    out = rep.to_json(cand.cf)
    out.update({"theta": cand.theta, "error_bound": cand.error_bound, "overflowed": cand.cf.overflowed})
    if args.out:
        f = linearize.linearization_family(cand.theta)
        vp = Viewport.square(args.center, args.width, args.size)
        grid = escape_time_grid(f, vp, _params(args))
        out["image"] = _write(grid, args)
    _emit(out)
    return EXIT_OK


def _thurston_f0(name: str) -> interval.PiecewiseMonotoneMap:
    if name == "period3":
        return interval.period3_tent()
    if name == "tent":
        return interval.tent_map()
    xs, _, ys = name.partition(":")
    if not ys:
        raise UsageError("--f0 is period3, tent or 'x0,x1,...:y0,y1,...'")
    return interval.piecewise_linear(
        [float(v) for v in xs.split(",")], [float(v) for v in ys.split(",")]
    )


def cmd_thurston_run(args) -> int:
    f0 = _thurston_f0(args.f0)
    records = []
    ok = True
    families = (
        [interval.alpha_family(a) for a in args.alpha]
        if args.family == "alpha"
        else [interval.polynomial_family(f0.lap_count, f0.boundary_map)]
    )
    for fam in families:
        res = interval.thurston_iterate(f0, fam, args.tol, args.max_iter)
        records.append(res.to_json())
        ok &= res.converged and res.kneading_match
    _emit(records[0] if len(records) == 1 else {"runs": records})
    return EXIT_OK if ok else EXIT_FAILED


def cmd_reproduce(args) -> int:
    figs = reproduce_figures(args.out, args.size, args.seed, args.threads, args.max_iter)
    for fig in figs:
        for w in fig.warnings:
            print(f"warning: {w}", file=sys.stderr)
    _emit({"figures": [f.to_json() for f in figs]})
    return EXIT_OK


def _render_options(p: argparse.ArgumentParser, center="0", width=4.0) -> None:
    p.add_argument("--center", type=parse_complex, default=parse_complex(center))
    p.add_argument("--width", type=float, default=width)
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--max-iter", type=int, default=256)
    p.add_argument("--escape-radius", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--colormap", choices=sorted(COLORMAPS), default="gray")
    p.add_argument("--out", type=Path, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="holodyn", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)

    render = groups.add_parser("render", help="render images").add_subparsers(dest="command", required=True)
    p = render.add_parser("julia", help="Julia set of a polynomial or rational map")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--c", type=parse_complex, default=complex(-1), help="z^2 + c")
    src.add_argument("--coeffs", help="ascending polynomial coefficients, comma separated")
    src.add_argument("--rational", help="NUM/DEN ascending coefficient lists")
    p.add_argument("--mode", choices=["auto", "escape", "distance", "attraction", "cloud"], default="auto")
    p.add_argument("--points", type=int, default=100_000, help="cloud size")
    _render_options(p)
    p.set_defaults(func=cmd_render_julia)

    p = render.add_parser("mandelbrot", help="escape time over the c-plane")
    _render_options(p, center="-0.5", width=3.0)
    p.set_defaults(func=cmd_render_mandelbrot)

    p = render.add_parser("henon", help="slice of K+ for a Henon map")
    p.add_argument("--lam", type=parse_complex)
    p.add_argument("--mu", type=parse_complex)
    p.add_argument("--c", type=parse_complex, default=complex(-1))
    p.add_argument("--delta", type=parse_complex, default=complex(0.3))
    p.add_argument("--fix-y", type=parse_complex, default=None)
    p.add_argument("--imag-x", type=float, default=0.0)
    p.add_argument("--imag-y", type=float, default=0.0)
    _render_options(p)
    p.set_defaults(func=cmd_render_henon)

    ray = groups.add_parser("ray", help="external rays").add_subparsers(dest="command", required=True)
    p = ray.add_parser("trace", help="trace one external ray")
    p.add_argument("--c", type=parse_complex, default=complex(0))
    p.add_argument("--coeffs")
    p.add_argument("--angle", required=True, help="p/q")
    p.add_argument("--levels", type=int, default=200)
    p.add_argument("--steps", type=int, default=4)
    p.add_argument("--points", action="store_true", help="include the traced points")
    p.set_defaults(func=cmd_ray_trace)
    p = ray.add_parser("rotation", help="rotation number of a cycle of angles")
    p.add_argument("--angles", required=True, help="comma separated p/q list")
    p.add_argument("--degree", type=int, default=2)
    p.set_defaults(func=cmd_ray_rotation)

    solve = groups.add_parser("solve", help="parameter solvers").add_subparsers(dest="command", required=True)
    p = solve.add_parser("center", help="superattracting center of z^2 + c")
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--seed", type=parse_complex, required=True)
    p.set_defaults(func=cmd_solve_center)
    p = solve.add_parser("misiurewicz", help="Misiurewicz parameter of z^2 + c")
    p.add_argument("--preperiod", type=int, required=True)
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--seed", type=parse_complex, required=True)
    p.set_defaults(func=cmd_solve_misiurewicz)
    p = solve.add_parser("mating", help="check the mating identities")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_solve_mating)
    p = solve.add_parser("intertwine", help="intertwining examples")
    p.add_argument("--kind", choices=["basilica", "cubic"], default="basilica")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--seed", type=parse_complex, default=solvers.INTERTWINE_A_PRINTED)
    p.add_argument("--scan-min", type=float, default=2.5)
    p.add_argument("--scan-max", type=float, default=2.6)
    p.add_argument("--scan-steps", type=int, default=11)
    p.set_defaults(func=cmd_solve_intertwine)
    p = solve.add_parser("limb", help="diameters of p/q limbs")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, nargs="+", default=[2, 3, 4, 5, 6])
    p.add_argument("--grid", type=int, default=401)
    p.add_argument("--max-iter", type=int, default=1000)
    p.set_defaults(func=cmd_solve_limb)

    lin = groups.add_parser("linearize", help="rotation numbers").add_subparsers(dest="command", required=True)
    p = lin.add_parser("cf", help="continued fraction expansion")
    p.add_argument("--x", type=parse_real, required=True, help="float, p/q or 'golden'")
    p.add_argument("--n", type=int, default=10)
    p.set_defaults(func=cmd_linearize_cf)
    p = lin.add_parser("brjuno", help="partial Brjuno sums")
    p.add_argument("--x", type=parse_real, required=True)
    p.add_argument("--n", type=int, default=20)
    p.set_defaults(func=cmd_linearize_brjuno)
    p = lin.add_parser("cremer", help="Liouville-type rotation number")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--center", type=parse_complex, default=complex(-0.5))
    p.add_argument("--width", type=float, default=3.0)
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--colormap", choices=sorted(COLORMAPS), default="gray")
    p.add_argument("--out", type=Path, default=None, help="also render lambda z + z^2")
    p.set_defaults(func=cmd_linearize_cremer)

    th = groups.add_parser("thurston", help="real Thurston pullback").add_subparsers(dest="command", required=True)
    p = th.add_parser("run", help="iterate the pullback")
    p.add_argument("--f0", default="period3", help="period3, tent or 'x0,...:y0,...' nodes")
    p.add_argument("--family", choices=["polynomial", "alpha"], default="polynomial")
    p.add_argument("--alpha", type=float, nargs="+", default=[2.0])
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=200)
    p.set_defaults(func=cmd_thurston_run)

    rep = groups.add_parser("reproduce", help="example figures").add_subparsers(dest="command", required=True)
    p = rep.add_parser("figures", help="render all example figures")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--max-iter", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ValueError, TypeError) as exc:
        print(f"holodyn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ArithmeticError, RuntimeError) as exc:
        print(f"holodyn: failed: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
