"""Total energy, its load derivative, the second variation and a spectral oracle.

With unit length and unit bending stiffness the energy of a rotation field is

    E = 1/2 int_0^1 theta'^2 ds - b int_0^1 (1 - s) sin theta ds.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import NotStationary
from .field import ThetaField, integrate, step, uniform_grid
from .ode_ivp import DEFAULT_CONTROL, residual_max

STATIONARY_SLOPE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class VariationField:
    """Admissible variation h sampled on a grid, with h(0) = 0."""

    grid: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        h = np.array(self.h, dtype=float)
        if h.shape != grid.shape:
            raise ValueError("variation samples must match the grid")
        if h[0] != 0.0:
            raise ValueError("admissible variations vanish at s = 0")
        grid.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "h", h)

    @classmethod
    def from_function(cls, fun, grid) -> "VariationField":
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(fun(grid), dtype=float)
        values = values - values[0]
        return cls(grid, values)


def energy_terms(field: ThetaField, b: float) -> tuple[float, float]:
    """Elastic part 1/2 int theta'^2 and load part -b int (1-s) sin theta."""
    h = field.h
    elastic = 0.5 * integrate(np.asarray(field.dtheta) ** 2, h)
    load = -b * integrate((1.0 - field.grid) * np.sin(field.theta), h)
    return elastic, load


def energy(field: ThetaField, b: float) -> float:
    elastic, load = energy_terms(field, b)
    return elastic + load


def energy_db(field: ThetaField, b: float, residual_bound: float = DEFAULT_CONTROL.residual_bound) -> float:
    """dE/db along a family of stationary points, -int (1-s) sin theta.

    The identity is only valid at equilibria, so the field must pass the
    residual certificate and the free-end condition first.
    """
    if field.b != b:
        field = dataclasses.replace(field, b=b)
    res = residual_max(field)
    slope = abs(float(field.dtheta[-1]))
    if not res <= residual_bound or not slope <= STATIONARY_SLOPE_TOL:
        raise NotStationary(f"field is not an equilibrium at b={b}: residual {res:.2e}, "
                            f"theta'(1) = {slope:.2e}")
    return -integrate((1.0 - field.grid) * np.sin(field.theta), field.h)


def _mass_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n + 1, h)
    w[0] = w[-1] = 0.5 * h
    return w


def second_variation(field: ThetaField, b: float, var: VariationField) -> float:
    """V[h] = int h'^2 + b (1-s) sin(theta) h^2.

    The gradient term uses chord slopes of h, so V is exactly the quadratic
    form whose matrix ``jacobi_min_eigenvalue`` diagonalizes on the same grid.
    """
    if var.grid.shape != field.grid.shape or np.any(var.grid != field.grid):
        raise ValueError("variation and field must share a grid")
    h = field.h
    hv = var.h
    stiff = float(np.sum(np.diff(hv) ** 2)) / h
    potential = b * (1.0 - field.grid) * np.sin(field.theta) * hv ** 2
    return stiff + float(np.dot(_mass_weights(field.n, h), potential))


def jacobi_operator(field: ThetaField, b: float, n: int | None = None):
    """Symmetric tridiagonal form of -h'' + q h, h(0) = 0, h'(1) = 0.

    Uses a ghost node for the Neumann end and is symmetrized by the trapezoid
    mass matrix W. Returns ``(diag, offdiag)`` of ``W^-1/2 (A + W q) W^-1/2``
    acting on the unknowns h_1 .. h_n.
    """
    n = field.n if n is None else int(n)
    if n < 64:
        raise ValueError("spectral oracle needs n >= 64")
    grid = uniform_grid(n)
    h = step(grid)
    theta = field.theta if n == field.n else field.at(grid)
    q = b * (1.0 - grid[1:]) * np.sin(theta[1:])
    w = _mass_weights(n, h)[1:]
    # stiffness from sum (h_{i+1} - h_i)^2 / h with h_0 = 0
    a_diag = np.full(n, 2.0 / h)
    a_diag[-1] = 1.0 / h
    a_off = np.full(n - 1, -1.0 / h)
    scale = 1.0 / np.sqrt(w)
    diag = (a_diag + w * q) * scale ** 2
    off = a_off * scale[:-1] * scale[1:]
    return diag, off


def jacobi_min_eigenvalue(field: ThetaField, b: float, n: int | None = None) -> float:
    """Smallest eigenvalue of the second-variation operator (spectral oracle)."""
    diag, off = jacobi_operator(field, b, n)
    vals = eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, 0))
    return float(vals[0])
