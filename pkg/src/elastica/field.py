"""Discretized rotation fields on a uniform grid over the unit interval.

The beam has unit length (loads are pre-scaled by ``b -> b L**3``), so every
field lives on ``s_0 = 0 < s_1 < ... < s_N = 1`` with ``N >= 64`` intervals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_INTERVALS = 64
DEFAULT_INTERVALS = 2048
RICHARDSON_TRIGGER = 1e-8


def uniform_grid(n: int = DEFAULT_INTERVALS) -> np.ndarray:
    """Return ``n + 1`` equispaced nodes on [0, 1] with exact endpoints."""
    if n < MIN_INTERVALS:
        raise ValueError(f"grid needs at least {MIN_INTERVALS} intervals, got {n}")
    grid = np.arange(n + 1, dtype=float) / n
    grid[-1] = 1.0
    return grid


@dataclass(frozen=True, eq=False)
class ThetaField:
    """Samples of the tangent angle and its arc-length derivative.

    ``theta[0]`` is the clamp and is forced to exactly zero.
    """

    grid: np.ndarray
    theta: np.ndarray
    dtheta: np.ndarray
    b: float = 0.0

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        theta = np.array(self.theta, dtype=float)
        dtheta = np.array(self.dtheta, dtype=float)
        if grid.ndim != 1 or grid.size < MIN_INTERVALS + 1:
            raise ValueError(f"grid must be 1-D with at least {MIN_INTERVALS + 1} nodes")
        if grid[0] != 0.0 or grid[-1] != 1.0 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must increase strictly from 0 to 1")
        if theta.shape != grid.shape or dtheta.shape != grid.shape:
            raise ValueError("theta and dtheta must match the grid")
        if self.b < 0:
            raise ValueError("load parameter b must be non-negative")
        theta[0] = 0.0
        for arr in (grid, theta, dtheta):
            arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "dtheta", dtheta)
        object.__setattr__(self, "b", float(self.b))

    @classmethod
    def from_theta(cls, theta, b: float = 0.0, grid=None) -> "ThetaField":
        """Build a field from angle samples, reconstructing the derivative."""
        theta = np.asarray(theta, dtype=float)
        if grid is None:
            grid = uniform_grid(theta.size - 1)
        return cls(grid, theta, derivative(theta, step(grid)), b)

    @classmethod
    def from_function(cls, fun, dfun, n: int = DEFAULT_INTERVALS, b: float = 0.0) -> "ThetaField":
        grid = uniform_grid(n)
        return cls(grid, fun(grid), dfun(grid), b)

    @property
    def n(self) -> int:
        """Number of grid intervals."""
        return self.grid.size - 1

    @property
    def h(self) -> float:
        return step(self.grid)

    def at(self, s) -> np.ndarray:
        """Cubic Hermite interpolation of theta (uses both samples and slopes)."""
        return hermite(self.grid, self.theta, self.dtheta, s)


def step(grid: np.ndarray) -> float:
    """Spacing of a uniform grid; raises if the grid is not uniform."""
    diffs = np.diff(grid)
    h = 1.0 / diffs.size
    if np.max(np.abs(diffs - h)) > 1e-12:
        raise ValueError("operation requires a uniform grid")
    return h


def derivative(y: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative of uniform samples."""
    y = np.asarray(y, dtype=float)
    d = np.empty_like(y)
    d[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)
    d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h)
    d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) / (12.0 * h)
    d[-2] = (3.0 * y[-1] + 10.0 * y[-2] - 18.0 * y[-3] + 6.0 * y[-4] - y[-5]) / (12.0 * h)
    d[-1] = (25.0 * y[-1] - 48.0 * y[-2] + 36.0 * y[-3] - 16.0 * y[-4] + 3.0 * y[-5]) / (12.0 * h)
    return d


def hermite(grid, y, dy, s) -> np.ndarray:
    """Piecewise cubic Hermite interpolant through (y, dy) evaluated at s."""
    s = np.asarray(s, dtype=float)
    i = np.clip(np.searchsorted(grid, s, side="right") - 1, 0, grid.size - 2)
    h = grid[i + 1] - grid[i]
    t = (s - grid[i]) / h
    t2, t3 = t * t, t * t * t
    return ((2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * h * dy[i]
            + (-2 * t3 + 3 * t2) * y[i + 1] + (t3 - t2) * h * dy[i + 1])


def trapezoid(values: np.ndarray, h: float) -> float:
    return h * (float(np.sum(values)) - 0.5 * (values[0] + values[-1]))


def integrate(values: np.ndarray, h: float) -> float:
    """Composite trapezoid, upgraded to Richardson (Simpson) when needed.

    When halving the grid moves the trapezoid value by more than 1e-8 the
    extrapolated value ``(4 T_h - T_2h) / 3`` is returned instead.
    """
    fine = trapezoid(values, h)
    if (values.size - 1) % 2:
        return fine
    coarse = trapezoid(values[::2], 2.0 * h)
    if abs(fine - coarse) > RICHARDSON_TRIGGER:
        return (4.0 * fine - coarse) / 3.0
    return fine
