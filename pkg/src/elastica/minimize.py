"""Direct minimization of the discretized energy by gradient descent.

The discrete energy on a uniform grid with spacing h is

    E_h = 1/2 sum (theta_{i+1} - theta_i)^2 / h - b sum w_i (1 - s_i) sin theta_i

with trapezoid weights w_i. The clamp theta_0 = 0 is kept by never moving the
first node; the free-end condition emerges from stationarity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .errors import MaxIterations
from .field import DEFAULT_INTERVALS, ThetaField, step, uniform_grid

SOBOLEV = "sobolev"
PLAIN = "plain"


@dataclass(frozen=True)
class DescentParams:
    """Line-search descent settings.

    ``method="sobolev"`` measures the gradient in the H1 metric of the
    elastic term (a unit step is then one fixed-point sweep); ``"plain"``
    uses the Euclidean gradient and needs O(N^2) iterations. Each trial
    step starts at ``step0`` but never moves any node by more than
    ``max_move`` radians, which keeps the descent inside the basin of its
    starting point.
    """

    gtol: float = 1e-8
    max_iter: int = 20000
    step0: float = 1.0
    shrink: float = 0.5
    c1: float = 1e-4
    min_step: float = 1e-14
    max_move: float = 0.25
    method: str = SOBOLEV

    def __post_init__(self):
        if self.gtol <= 0 or self.max_iter < 1:
            raise ValueError("gtol must be positive and max_iter at least 1")
        if not 0 < self.shrink < 1 or not 0 < self.c1 < 1:
            raise ValueError("shrink and c1 must lie in (0, 1)")
        if self.max_move <= 0:
            raise ValueError("max_move must be positive")
        if self.method not in (SOBOLEV, PLAIN):
            raise ValueError(f"unknown descent method {self.method!r}")


DEFAULT_PARAMS = DescentParams()


@dataclass(frozen=True, eq=False)
class DescentResult:
    field: ThetaField
    iterations: int
    energies: np.ndarray
    grad_norm: float


def _weights(n, h):
    w = np.full(n + 1, h)
    w[0] = w[-1] = 0.5 * h
    return w


def discrete_energy(theta: np.ndarray, b: float) -> float:
    theta = np.asarray(theta, dtype=float)
    n = theta.size - 1
    h = 1.0 / n
    s = np.arange(n + 1) / n
    elastic = 0.5 * float(np.sum(np.diff(theta) ** 2)) / h
    return elastic - b * float(np.dot(_weights(n, h), (1.0 - s) * np.sin(theta)))


def discrete_gradient(theta: np.ndarray, b: float) -> np.ndarray:
    """Exact partial derivatives of ``discrete_energy`` (first entry included)."""
    theta = np.asarray(theta, dtype=float)
    n = theta.size - 1
    h = 1.0 / n
    s = np.arange(n + 1) / n
    d = np.diff(theta) / h
    g = np.zeros_like(theta)
    g[:-1] -= d
    g[1:] += d
    return g - b * _weights(n, h) * (1.0 - s) * np.cos(theta)


def l2_gradient(theta: np.ndarray, b: float) -> np.ndarray:
    """Gradient divided by the quadrature weights, clamp entry zeroed.

    Interior rows are -theta'' - b (1-s) cos theta with the three-point
    second difference; the last row is 2 (theta_N - theta_{N-1}) / h^2.
    """
    n = np.asarray(theta).size - 1
    g = discrete_gradient(theta, b) / _weights(n, 1.0 / n)
    g[0] = 0.0
    return g


def _energy_change(theta, d, alpha, b, w, s):
    """E_h(theta + alpha d) - E_h(theta) without cancellation."""
    h = 1.0 / (theta.size - 1)
    dt, dd = np.diff(theta), np.diff(d)
    elastic = float(np.sum(alpha * dt * dd + 0.5 * alpha ** 2 * dd ** 2)) / h
    dsin = 2.0 * np.cos(theta + 0.5 * alpha * d) * np.sin(0.5 * alpha * d)
    return elastic - b * float(np.dot(w, (1.0 - s) * dsin))


def _stiffness_factor(n, h):
    """Banded Cholesky factor of the elastic Hessian on nodes 1..n."""
    ab = np.empty((2, n))
    ab[0, 0] = 0.0
    ab[0, 1:] = -1.0 / h
    ab[1, :] = 2.0 / h
    ab[1, -1] = 1.0 / h
    return cholesky_banded(ab, lower=False)


def descend(b: float, init: ThetaField, params: DescentParams = DEFAULT_PARAMS) -> DescentResult:
    """Armijo backtracking descent until sup |l2_gradient| < gtol."""
    if b < 0:
        raise ValueError("load parameter b must be non-negative")
    theta = np.array(init.theta, dtype=float)
    if theta[0] != 0.0:
        raise ValueError("initial field must satisfy the clamp")
    n = theta.size - 1
    h = step(init.grid)
    s = np.asarray(init.grid)
    w = _weights(n, h)
    chol = _stiffness_factor(n, h) if params.method == SOBOLEV else None
    energies = [discrete_energy(theta, b)]
    for it in range(params.max_iter + 1):
        g = discrete_gradient(theta, b)
        g[0] = 0.0
        gnorm = float(np.max(np.abs(g / w)))
        if gnorm < params.gtol:
            field = ThetaField.from_theta(theta, b, init.grid)
            return DescentResult(field, it, np.array(energies), gnorm)
        if it == params.max_iter:
            break
        d = np.zeros_like(theta)
        if chol is None:
            d[1:] = -g[1:] / w[1:]
        else:
            d[1:] = -cho_solve_banded((chol, False), g[1:])
        slope = float(np.dot(g, d))
        alpha = min(params.step0, params.max_move / max(float(np.max(np.abs(d))), 1e-300))
        while True:
            change = _energy_change(theta, d, alpha, b, w, s)
            if change <= params.c1 * alpha * slope:
                break
            alpha *= params.shrink
            if alpha < params.min_step:
                raise MaxIterations(it, gnorm)
        theta = theta + alpha * d
        theta[0] = 0.0
        energies.append(energies[-1] + change)
    raise MaxIterations(params.max_iter, gnorm)


def minimize_energy(b: float, init: ThetaField, params: DescentParams = DEFAULT_PARAMS) -> ThetaField:
    """Local minimizer of the discretized energy reached from ``init``."""
    return descend(b, init, params).field


def coil_profile(R: float, n: int = DEFAULT_INTERVALS) -> ThetaField:
    """Three-quarter coil: a ramp to -3 pi / 2 over (0, R), constant after.

    At a node sitting exactly on the corner the slope is the mean of the two
    one-sided slopes.
    """
    if not 0.0 < R <= 1.0:
        raise ValueError("coil extent R must lie in (0, 1]")
    grid = uniform_grid(n)
    k = -1.5 * np.pi / R
    theta = np.where(grid < R, k * grid, -1.5 * np.pi)
    dtheta = np.where(grid < R, k, 0.0)
    dtheta[grid == R] = 0.5 * k if R < 1.0 else k
    return ThetaField(grid, theta, dtheta, 0.0)
