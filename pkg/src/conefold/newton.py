"""Batched multi-start Newton iteration with complex-step Jacobians.

Residual functions take an ``(m, d)`` array of unknowns (possibly complex)
and return an ``(m, d)`` array of residuals. Every residual in this package
is a polynomial, so the complex-step derivative is exact to rounding.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COMPLEX_STEP = 1e-30
DIVERGENCE_BOUND = 1e6


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: np.ndarray  # max-abs residual per start
    converged: np.ndarray
    iterations: np.ndarray
    singular: np.ndarray  # Jacobian was numerically singular at the last step


def complex_step_jacobian(func, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(F(x), J(x))`` with ``J`` of shape ``(m, d, d)``."""
    m, d = x.shape
    f0 = np.real(func(x.astype(complex)))
    jac = np.empty((m, d, d))
    for j in range(d):
        xc = x.astype(complex)
        xc[:, j] += 1j * COMPLEX_STEP
        jac[:, :, j] = np.imag(func(xc)) / COMPLEX_STEP
    return f0, jac


def batch_newton(func, x0, tol: float = 1e-12, max_iter: int = 100, max_step: float | None = None) -> NewtonResult:
    """Run Newton from every row of ``x0`` simultaneously.

    Rows stop updating once the max-abs residual drops below ``tol``. A
    singular or non-finite step freezes the row as unconverged.
    ``max_step`` caps the infinity norm of each update (a simple damping).
    """
    x = np.array(x0, dtype=float, copy=True)
    if x.ndim == 1:
        x = x[None, :]
    m, d = x.shape
    active = np.ones(m, dtype=bool)
    converged = np.zeros(m, dtype=bool)
    singular = np.zeros(m, dtype=bool)
    iters = np.zeros(m, dtype=int)
    resid = np.full(m, np.inf)
    for it in range(max_iter + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        f, jac = complex_step_jacobian(func, x[idx])
        r = np.max(np.abs(f), axis=1)
        resid[idx] = r
        done = r < tol
        converged[idx[done]] = True
        active[idx[done]] = False
        bad = ~np.isfinite(r) | (np.max(np.abs(x[idx]), axis=1) > DIVERGENCE_BOUND)
        active[idx[bad]] = False
        if it == max_iter:
            break
        keep = ~done & ~bad
        idx, f, jac = idx[keep], f[keep], jac[keep]
        if idx.size == 0:
            break
        with np.errstate(all="ignore"):
            cond = np.linalg.cond(jac)
        sing = ~np.isfinite(cond) | (cond > 1e15)
        singular[idx] = sing
        active[idx[sing]] = False
        idx, f, jac = idx[~sing], f[~sing], jac[~sing]
        if idx.size == 0:
            continue
        step = np.linalg.solve(jac, -f[..., None])[..., 0]
        if max_step is not None:
            norm = np.max(np.abs(step), axis=1)
            scale = np.minimum(1.0, max_step / np.maximum(norm, 1e-300))
            step *= scale[:, None]
        x[idx] += step
        iters[idx] += 1
    return NewtonResult(x, resid, converged, iters, singular)


def dedupe(points: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Drop rows that lie within ``tol`` (max-norm) of an earlier row."""
    out: list[np.ndarray] = []
    for pt in points:
        if not any(np.max(np.abs(pt - q)) < tol for q in out):
            out.append(pt)
    return np.array(out).reshape(-1, points.shape[1] if points.ndim == 2 else 0)


def grid_starts(*axes) -> np.ndarray:
    """Cartesian product of 1-D sample arrays as an ``(m, d)`` start matrix."""
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([g.ravel() for g in mesh])
