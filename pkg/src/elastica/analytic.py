"""Small-load tools: the integral operator T, Picard iteration, linearized profile.

T folds both boundary conditions into a double integral,

    [T theta](s) = b * int_0^s dsigma int_sigma^1 (1 - t) cos theta(t) dt,

so any fixed point is a solution of the clamped problem.
"""

from __future__ import annotations

import numpy as np

from .errors import NoConvergence
from .field import DEFAULT_INTERVALS, ThetaField, step, uniform_grid

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200


def _suffix_trapezoid(values: np.ndarray, h: float) -> np.ndarray:
    """int_{s_i}^1 of the sampled function, composite trapezoid, for every node."""
    panels = 0.5 * h * (values[:-1] + values[1:])
    out = np.zeros_like(values)
    out[:-1] = np.cumsum(panels[::-1])[::-1]
    return out


def _prefix_trapezoid(values: np.ndarray, h: float) -> np.ndarray:
    panels = 0.5 * h * (values[:-1] + values[1:])
    out = np.zeros_like(values)
    out[1:] = np.cumsum(panels)
    return out


def apply_T(field: ThetaField, b: float) -> ThetaField:
    """One application of T by nested cumulative trapezoid sums.

    The derivative of the output is the inner integral itself, so the result
    carries an exact-by-construction ``dtheta`` with ``dtheta[-1] == 0``.
    """
    if b < 0:
        raise ValueError("load parameter b must be non-negative")
    grid = field.grid
    h = step(grid)
    inner = b * _suffix_trapezoid((1.0 - grid) * np.cos(field.theta), h)
    return ThetaField(grid, _prefix_trapezoid(inner, h), inner, b)


def picard_solve(b: float, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 n: int = DEFAULT_INTERVALS) -> ThetaField:
    """Iterate ``theta <- T theta`` from zero until the sup-norm update is <= tol.

    Convergence is guaranteed only for b < 6, where T is a contraction with
    constant b / 6. Larger loads may still converge; otherwise NoConvergence.
    """
    if b < 0:
        raise ValueError("load parameter b must be non-negative")
    if tol <= 0 or max_iter < 1:
        raise ValueError("tol must be positive and max_iter at least 1")
    grid = uniform_grid(n)
    current = ThetaField(grid, np.zeros_like(grid), np.zeros_like(grid), b)
    change = np.inf
    for _ in range(max_iter):
        nxt = apply_T(current, b)
        change = float(np.max(np.abs(nxt.theta - current.theta)))
        current = nxt
        if change <= tol:
            return current
        if not np.isfinite(change):
            break
    raise NoConvergence(max_iter, change)


def small_b_profile(b: float, n: int = DEFAULT_INTERVALS) -> ThetaField:
    """Linearized solution theta = (b/6)(1 - (1-s)^3), exact on the grid."""
    if b < 0:
        raise ValueError("load parameter b must be non-negative")
    return ThetaField.from_function(lambda s: b / 6.0 * (1.0 - (1.0 - s) ** 3),
                                    lambda s: 0.5 * b * (1.0 - s) ** 2, n, b)
