"""Numerical experiments in holomorphic and interval dynamics.

Polynomial and rational maps of the Riemann sphere, Julia and Mandelbrot
renderers, external rays, parameter solvers, continued fractions, the real
Thurston pullback and complex Henon maps.
"""

from .maps import (
    INFINITY,
    PolynomialMap,
    RationalMap,
    critical_points,
    eval_map,
    fixed_points,
    orbit,
    postcritical_set,
)
from .images import ImageGrid, RenderParams, Viewport, write_image

__version__ = "0.1.0"

__all__ = [
    "INFINITY",
    "ImageGrid",
    "PolynomialMap",
    "RationalMap",
    "RenderParams",
    "Viewport",
    "critical_points",
    "eval_map",
    "fixed_points",
    "orbit",
    "postcritical_set",
    "write_image",
]
