"""Planar shape reconstruction and the gluing check for curled solutions."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import HypothesisFailed
from .field import ThetaField, uniform_grid
from .shooting import BranchLabel, Solution

GLUE_TOL = 1e-4
GLUE_POINTS = 1024
MONOTONE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Shape:
    points: np.ndarray

    @property
    def end_point(self) -> np.ndarray:
        return self.points[-1]

    def chord_lengths(self) -> np.ndarray:
        return np.hypot(*np.diff(self.points, axis=0).T)

    def arc_length(self) -> float:
        return float(np.sum(self.chord_lengths()))


def reconstruct_shape(field: ThetaField) -> Shape:
    """Chain of chords along the tangent angle at each cell midpoint.

    The midpoint angle comes from the cubic Hermite interpolant, so every
    chord has exactly the cell length and the curve is second-order accurate.
    """
    grid = field.grid
    theta, dtheta = field.theta, field.dtheta
    h = np.diff(grid)
    mid = 0.5 * (theta[:-1] + theta[1:]) + h * (dtheta[:-1] - dtheta[1:]) / 8.0
    pts = np.zeros((grid.size, 2))
    pts[1:, 0] = np.cumsum(h * np.cos(mid))
    pts[1:, 1] = np.cumsum(h * np.sin(mid))
    return Shape(pts)


@dataclass(frozen=True, eq=False)
class GlueReport:
    s_bar: float
    b_eff: float
    sup_error: float
    passed: bool
    gamma_start: float = 0.0
    gamma_end_slope: float = 0.0
    tail: ThetaField | None = dc_field(default=None, repr=False)
    reference: Solution | None = dc_field(default=None, repr=False)


def _check_hypotheses(theta: np.ndarray):
    if theta.max() > MONOTONE_TOL or theta.min() <= -1.5 * np.pi:
        raise HypothesisFailed("range", f"theta spans [{theta.min():.4f}, {theta.max():.4f}], "
                                        "not inside (-3 pi/2, 0]")
    if np.diff(theta).max() > MONOTONE_TOL:
        raise HypothesisFailed("monotone", "theta is not nonincreasing")
    shifted = theta + np.pi
    crossings = np.flatnonzero((shifted[:-1] >= 0) & (shifted[1:] < 0))
    if crossings.size != 1 or shifted[-1] >= 0:
        raise HypothesisFailed("crossing", f"theta crosses -pi {crossings.size} times")
    return int(crossings[0])


def crossing_point(field: ThetaField, i: int) -> float:
    """Bisection for theta = -pi on the Hermite interpolant over cell i."""
    lo, hi = float(field.grid[i]), float(field.grid[i + 1])
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if field.at(mid) + np.pi >= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def glue_check(sol: Solution, points: int = GLUE_POINTS, reference: Solution | None = None) -> GlueReport:
    """Compare the reflected tail beyond the -pi crossing with a shorter beam.

    The tail gamma(x) = -theta(s_bar + x) - pi on [0, 1 - s_bar], stretched to
    unit length, must match the primary solution at b (1 - s_bar)^3.
    Hypotheses checked in turn: ``range`` (theta in (-3 pi/2, 0]),
    ``monotone`` and ``crossing`` (a single crossing of -pi).
    """
    theta = np.asarray(sol.field.theta)
    i = _check_hypotheses(theta)
    s_bar = crossing_point(sol.field, i)
    length = 1.0 - s_bar
    b_eff = sol.b * length ** 3
    if reference is None:
        reference = primary_solution(b_eff)
    grid = uniform_grid(points - 1)
    s = s_bar + length * grid
    s[-1] = 1.0
    gamma = -sol.field.at(s) - np.pi
    gamma_slope = -length * np.interp(s, sol.field.grid, sol.field.dtheta)
    gamma_slope[-1] = -length * sol.field.dtheta[-1]
    tail = ThetaField(grid, gamma, gamma_slope, b_eff)
    sup_error = float(np.max(np.abs(gamma - reference.field.at(grid))))
    return GlueReport(s_bar, b_eff, sup_error, sup_error <= GLUE_TOL, float(gamma[0]),
                      float(gamma_slope[-1] / length), tail, reference)


def primary_solution(b: float) -> Solution:
    """The primary-labelled root at load b from the default scan."""
    from .shooting import solve_all

    for cand in solve_all(b):
        if cand.branch_label is BranchLabel.PRIMARY:
            return cand
    raise HypothesisFailed("reference", f"no primary solution found at b={b}")
