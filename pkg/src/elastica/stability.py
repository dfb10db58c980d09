"""Closed-form second-variation certificates for stationary points.

Two sufficient conditions are checked from the sign pattern of sin(theta):

* stable: sin(theta) >= 0 on [lam, 1] and b < pi^2 / (2 lam^3 (2 - lam));
* unstable: sin(theta) > 0 on (0, lam), sin(theta) < 0 on (mu, nu) and
  b > 12 / (lam (3 lam^2 - 16 lam + 12) I) with I = int_mu^nu |sin theta|.

The spectral oracle from the energy module is attached as evidence but never
replaces a certificate.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .energy import VariationField, jacobi_min_eigenvalue, second_variation
from .errors import DomainError
from .field import ThetaField, trapezoid
from .shooting import Solution, Stability, Verdict

SIGN_TOL = 1e-6
ORACLE_N = 1024
# maximizer of lam (3 lam^2 - 16 lam + 12) on (0, 1)
LAMBDA_OPT = (32.0 - math.sqrt(32.0 ** 2 - 4 * 9 * 12)) / 18.0


class CertificateKind(str, enum.Enum):
    STABLE = "StableByProp10"
    UNSTABLE = "UnstableByProp11"


@dataclass(frozen=True)
class SignInterval:
    lo: float
    hi: float
    sign: int
    margin: float


@dataclass(frozen=True)
class SignIntervalSet:
    intervals: tuple
    tol: float

    def of_sign(self, sign: int) -> list[SignInterval]:
        return [iv for iv in self.intervals if iv.sign == sign]


@dataclass(frozen=True)
class StabilityCertificate:
    kind: CertificateKind
    lam: float
    threshold: float
    b: float
    mu: Optional[float] = None
    nu: Optional[float] = None
    integral_I: Optional[float] = None
    ramp_variation: Optional[float] = None

    def __post_init__(self):
        ok = self.b < self.threshold if self.kind is CertificateKind.STABLE else self.b > self.threshold
        if not ok:
            raise ValueError(f"{self.kind.value} certificate needs the load on the right side of its threshold")


def _runs(mask: np.ndarray):
    """(start, stop) index pairs of maximal True runs, stop inclusive."""
    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return list(zip(edges[::2], edges[1::2] - 1))


def sign_intervals(field: ThetaField, tol: float = SIGN_TOL) -> SignIntervalSet:
    """Maximal runs of nodes where |sin theta| > tol with one sign.

    Endpoints are the first and last verified nodes of each run, so a smaller
    tol can only grow the intervals. A run that starts at the first interior
    node is extended to s = 0, where the clamp makes sin theta vanish exactly.
    """
    grid = field.grid
    v = np.sin(field.theta)
    out = []
    for sign in (1, -1):
        for i, j in _runs((sign * v) > tol):
            lo = 0.0 if i == 1 else float(grid[i])
            out.append(SignInterval(lo, float(grid[j]), sign, float(np.min(np.abs(v[i:j + 1])))))
    out.sort(key=lambda iv: iv.lo)
    return SignIntervalSet(tuple(out), tol)


def stability_threshold(lam: float) -> float:
    """pi^2 / (2 lam^3 (2 - lam)), defined for 0 < lam <= 1."""
    if not 0.0 < lam <= 1.0:
        raise DomainError(f"lambda must lie in (0, 1], got {lam!r}")
    return math.pi ** 2 / (2.0 * lam ** 3 * (2.0 - lam))


def instability_threshold(lam: float, integral_I: float) -> float:
    """12 / (lam (3 lam^2 - 16 lam + 12) I)."""
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda must lie in (0, 1), got {lam!r}")
    cubic = 3.0 * lam ** 2 - 16.0 * lam + 12.0
    if cubic <= 0.0:
        raise DomainError(f"3 lam^2 - 16 lam + 12 = {cubic:.3g} is not positive at lam={lam!r}")
    if not integral_I > 0.0:
        raise DomainError("the sign integral must be positive")
    return 12.0 / (lam * cubic * integral_I)


def check_stable(sol: Solution) -> Optional[StabilityCertificate]:
    """Smallest grid lam with sin(theta) >= 0 at every node of [lam, 1]."""
    field = sol.field
    v = np.sin(field.theta)
    neg = np.flatnonzero(v[1:] < 0.0) + 1
    k = 1 if neg.size == 0 else int(neg[-1]) + 1
    if k > field.n:
        return None
    lam = float(field.grid[k])
    threshold = stability_threshold(lam)
    if sol.b < threshold:
        return StabilityCertificate(CertificateKind.STABLE, lam, threshold, sol.b)
    return None


def ramp(grid: np.ndarray, lam: float) -> VariationField:
    """The variation s / lam on (0, lam), 1 on (lam, 1)."""
    return VariationField(grid, np.minimum(np.asarray(grid) / lam, 1.0))


def check_unstable(sol: Solution, tol: float = SIGN_TOL) -> Optional[StabilityCertificate]:
    """Search (lam, mu, nu) over the sign intervals for the smallest threshold.

    lam is the end of a leading (+) interval, capped where the cubic factor
    peaks; each later (-) interval supplies (mu, nu) and I by trapezoid over
    its verified nodes.
    """
    field = sol.field
    grid = field.grid
    ivs = sign_intervals(field, tol).intervals
    if not ivs or ivs[0].sign != 1 or ivs[0].lo != 0.0:
        return None
    lam = min(ivs[0].hi, LAMBDA_OPT)
    abs_sin = np.abs(np.sin(field.theta))
    best = None
    for iv in ivs[1:]:
        if iv.sign != -1 or iv.lo <= lam or iv.hi <= iv.lo:
            continue
        inside = (grid >= iv.lo) & (grid <= iv.hi)
        integral = trapezoid(abs_sin[inside], field.h)
        thr = instability_threshold(lam, integral)
        if best is None or thr < best[0]:
            best = (thr, iv.lo, iv.hi, integral)
    if best is None or not sol.b > best[0]:
        return None
    thr, mu, nu, integral = best
    ramp_v = second_variation(field, sol.b, ramp(grid, lam))
    return StabilityCertificate(CertificateKind.UNSTABLE, lam, thr, sol.b, mu, nu, integral, ramp_v)


def assess(sol: Solution, oracle_n: int = ORACLE_N) -> Solution:
    """Attach a stability verdict: certificate if one applies, else Inconclusive."""
    stable = check_stable(sol)
    unstable = check_unstable(sol)
    if stable is not None and unstable is not None:
        raise AssertionError("stability certificates are mutually exclusive")
    eig = jacobi_min_eigenvalue(sol.field, sol.b, oracle_n)
    if stable is not None:
        st = Stability(Verdict.STABLE, stable, eig)
    elif unstable is not None:
        st = Stability(Verdict.UNSTABLE, unstable, eig)
    else:
        st = Stability(Verdict.INCONCLUSIVE, None, eig)
    return dataclasses.replace(sol, stability=st)
