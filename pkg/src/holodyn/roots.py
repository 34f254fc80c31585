"""Simultaneous polynomial root finding (Durand-Kerner / Weierstrass iteration)."""

from __future__ import annotations

import numpy as np


class RootFindingError(RuntimeError):
    """Raised when the root finder fails to reach the residual tolerance."""

    def __init__(self, message: str, roots: np.ndarray, residuals: np.ndarray):
        super().__init__(message)
        self.roots = roots
        self.residuals = residuals


def scaled_residual(coeffs, z) -> np.ndarray:
    """|p(z)| / (max |a_i| * max(1, |z|)^n) for ascending coefficients.

    Unlike the pure backward error this stays meaningful at roots near 0
    of polynomials without a constant term.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    z = np.asarray(z, dtype=complex)
    num = np.zeros_like(z)
    for a in coeffs[::-1]:
        num = num * z + a
    n = len(coeffs) - 1
    scale = np.max(np.abs(coeffs)) * np.maximum(1.0, np.abs(z)) ** n
    return np.abs(num) / scale


def durand_kerner(coeffs, max_iter: int = 500, tol: float = 1e-12) -> np.ndarray:
    """All roots of the polynomial with ascending coefficients ``coeffs``.

    Convergence is declared when every root has scaled residual below ``tol``.
    Raises :class:`RootFindingError` after ``max_iter`` sweeps otherwise.
    """
    c = np.asarray(coeffs, dtype=complex)
    while len(c) > 1 and c[-1] == 0:
        c = c[:-1]
    n = len(c) - 1
    if n < 1:
        raise ValueError("polynomial must have degree >= 1")
    if n == 1:
        return np.array([-c[0] / c[1]])
    monic = c / c[-1]
    # Cauchy bound on root moduli
    radius = 1.0 + float(np.max(np.abs(monic[:-1])))
    # off-axis start avoids the symmetric stall for real coefficients
    z = 0.5 * radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    for _ in range(max_iter):
        if np.all(scaled_residual(c, z) < tol):
            return z
        p = np.polyval(monic[::-1], z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        denom = np.prod(diff, axis=1)
        z = z - p / denom
        if not np.all(np.isfinite(z)):
            break
    res = scaled_residual(c, z)
    if np.all(res < tol):
        return z
    raise RootFindingError(
        f"Durand-Kerner did not converge in {max_iter} sweeps "
        f"(max residual {float(np.nanmax(res)):.3e})",
        z,
        res,
    )
