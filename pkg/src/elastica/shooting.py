"""Shooting on the initial slope K for the clamped/free boundary value problem.

A solution is a zero of F(K, b) = theta'(1) for the initial value problem
started from theta(0) = 0, theta'(0) = K.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .energy import energy
from .errors import LostBracket
from .field import ThetaField
from .ode_ivp import DEFAULT_CONTROL, IvpControl, end_state, integrate_ivp

K_MIN, K_MAX, NK = -40.0, 40.0, 8001
ROOT_TOL = 1e-7
BRACKET_WIDTH = 1e-12
DEDUPE_TOL = 1e-6


class BranchLabel(str, enum.Enum):
    PRIMARY = "Primary"
    SECONDARY_LOWER = "SecondaryLower"
    SECONDARY_UPPER = "SecondaryUpper"
    UNCLASSIFIED = "Unclassified"


class Verdict(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Stability:
    """Verdict plus the certificate backing it; ``min_eigenvalue`` is evidence only."""

    verdict: Verdict = Verdict.INCONCLUSIVE
    certificate: Optional[object] = None
    min_eigenvalue: Optional[float] = None


@dataclass(frozen=True)
class Bracket:
    K_lo: float
    K_hi: float
    F_lo: float = dc_field(default=np.nan, compare=False)
    F_hi: float = dc_field(default=np.nan, compare=False)

    def __post_init__(self):
        if not self.K_lo < self.K_hi:
            raise ValueError("bracket needs K_lo < K_hi")
        if np.sign(self.F_lo) * np.sign(self.F_hi) > 0:
            raise ValueError("bracket end values must differ in sign")


@dataclass(frozen=True, eq=False)
class Solution:
    b: float
    K: float
    field: ThetaField
    residual_bvp: float
    energy: float
    residual_ivp: float = 0.0
    branch_label: BranchLabel = BranchLabel.UNCLASSIFIED
    stability: Stability = Stability()


def shoot_residual(K, b: float, ctrl: IvpControl = DEFAULT_CONTROL):
    """F(K, b) = theta'(1); vectorized over K."""
    return end_state(b, K, ctrl)[1]


def scan_roots(b: float, K_min: float = K_MIN, K_max: float = K_MAX, nK: int = NK,
               ctrl: IvpControl = DEFAULT_CONTROL) -> list[Bracket]:
    """Sign changes of F on a uniform K grid, ordered by K_lo.

    Grid nodes where F is exactly zero are skipped, so a root sitting on a
    node is bracketed by its nonzero neighbours. Tangential zeros are missed.
    """
    if not K_min < K_max or nK < 2:
        raise ValueError("need K_min < K_max and nK >= 2")
    Ks = np.linspace(K_min, K_max, int(nK))
    Fs = shoot_residual(Ks, b, ctrl)
    keep = np.flatnonzero(np.sign(Fs) != 0)
    brackets = []
    for a, c in zip(keep[:-1], keep[1:]):
        if np.sign(Fs[a]) != np.sign(Fs[c]):
            brackets.append(Bracket(float(Ks[a]), float(Ks[c]), float(Fs[a]), float(Fs[c])))
    return brackets


def solution_at(b: float, K: float, ctrl: IvpControl = DEFAULT_CONTROL) -> Solution:
    """Integrate at (b, K) and package the result without any root check."""
    res = integrate_ivp(b, K, ctrl)
    return Solution(float(b), float(K), res.field, abs(float(res.field.dtheta[-1])),
                    energy(res.field, b), res.residual_max)


def refine_root(br: Bracket, b: float, tol: float = ROOT_TOL, ctrl: IvpControl = DEFAULT_CONTROL,
                width: float = BRACKET_WIDTH) -> Solution:
    """Bisection down to ``width``, then one verifying integration."""
    lo, hi = float(br.K_lo), float(br.K_hi)
    f_lo, f_hi = shoot_residual(np.array([lo, hi]), b, ctrl)
    if f_lo == 0.0:
        hi = lo
    elif f_hi == 0.0:
        lo = hi
    elif np.sign(f_lo) == np.sign(f_hi):
        raise LostBracket(f"F has the same sign at K={lo!r} and K={hi!r} (b={b!r})")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = shoot_residual(mid, b, ctrl)
        if f_mid == 0.0:
            lo = hi = mid
        elif np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    sol = solution_at(b, 0.5 * (lo + hi), ctrl)
    if not sol.residual_bvp <= tol:
        raise LostBracket(f"bisection ended at K={sol.K!r} with |F| = {sol.residual_bvp:.2e} > {tol:.1e}; "
                          "the sign change is not a root")
    return sol


def solve_all(b: float, K_min: float = K_MIN, K_max: float = K_MAX, nK: int = NK,
              ctrl: IvpControl = DEFAULT_CONTROL, tol: float = ROOT_TOL) -> list[Solution]:
    """Every root found by scan and refinement, classified and sorted by K."""
    from .branch import label_all

    sols: list[Solution] = []
    for br in scan_roots(b, K_min, K_max, nK, ctrl):
        sol = refine_root(br, b, tol, ctrl)
        if sols and abs(sol.K - sols[-1].K) < DEDUPE_TOL:
            continue
        sols.append(sol)
    return label_all(sols)
