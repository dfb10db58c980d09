"""Continuation in the load b, fold location and branch labels."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BadStraddle, ElasticaError, SeedInvalid
from .ode_ivp import DEFAULT_CONTROL, IvpControl, residual_max
from .shooting import ROOT_TOL, BranchLabel, Solution, refine_root, scan_roots

LABEL_TOL = 1e-8
FOLD_TOL = 1e-2
# local scans around the predicted slope: (half width factor, grid points)
_WINDOWS = ((1.0, 41), (2.0, 101), (None, 401))
_MAX_HALF = 1.0
_FOLD_BISECTIONS = 12


@dataclass(frozen=True, eq=False)
class Branch:
    points: tuple
    label: str
    fold: Optional[tuple] = None

    @property
    def b(self) -> np.ndarray:
        return np.array([p.b for p in self.points])

    @property
    def K(self) -> np.ndarray:
        return np.array([p.K for p in self.points])


def classify(sol: Solution) -> BranchLabel:
    """Shape-based label: nonnegative increasing, nonpositive decreasing, or mixed."""
    theta = np.asarray(sol.field.theta)
    d = np.diff(theta)
    if theta.min() >= -LABEL_TOL and d.min() >= -LABEL_TOL:
        return BranchLabel.PRIMARY
    if theta.max() <= LABEL_TOL and d.max() <= LABEL_TOL:
        return BranchLabel.SECONDARY_LOWER
    return BranchLabel.SECONDARY_UPPER


def label_all(sols: list[Solution]) -> list[Solution]:
    """Classify every solution at one load and sort by K.

    Near the fold both secondary profiles can be monotone; the one with the
    lowest K keeps the lower label and the others become upper.
    """
    sols = sorted(sols, key=lambda s: s.K)
    labels = [classify(s) for s in sols]
    lower = [i for i, lab in enumerate(labels) if lab is BranchLabel.SECONDARY_LOWER]
    for i in lower[1:]:
        labels[i] = BranchLabel.SECONDARY_UPPER
    return [dataclasses.replace(s, branch_label=lab) for s, lab in zip(sols, labels)]


def _local_brackets(b, center, half, n, ctrl):
    return scan_roots(b, center - half, center + half, n, ctrl)


def _nearest(brackets, K):
    return min(brackets, key=lambda br: abs(0.5 * (br.K_lo + br.K_hi) - K))


def _correct(b, K_pred, K_last, ctrl):
    """Bracket the root closest to the prediction, widening the search if needed."""
    w = max(0.05, 2.0 * abs(K_pred - K_last))
    for factor, n in _WINDOWS:
        half = _MAX_HALF if factor is None else min(factor * w, _MAX_HALF)
        brackets = _local_brackets(b, K_pred, half, n, ctrl)
        if brackets:
            return _nearest(brackets, K_pred)
    return None


def _fold_between(b_in, K_in, b_out, ctrl):
    """Bisect on b between a load with the root and one without it."""
    center = K_in
    pair = None
    for _ in range(_FOLD_BISECTIONS):
        mid = 0.5 * (b_in + b_out)
        brackets = _local_brackets(mid, center, _MAX_HALF, 401, ctrl)
        if brackets:
            b_in, pair = mid, brackets
            center = 0.5 * (pair[0].K_lo + pair[-1].K_hi)
        else:
            b_out = mid
    if pair is None:
        pair = _local_brackets(b_in, center, _MAX_HALF, 401, ctrl)
    if not pair:
        return 0.5 * (b_in + b_out), center
    near = sorted(pair, key=lambda br: abs(0.5 * (br.K_lo + br.K_hi) - center))[:2]
    K0 = float(np.mean([0.5 * (br.K_lo + br.K_hi) for br in near]))
    return 0.5 * (b_in + b_out), K0


def _validate_seed(seed: Solution, ctrl: IvpControl):
    res = residual_max(seed.field)
    if not (np.isfinite(seed.K) and seed.residual_bvp <= ROOT_TOL and res <= ctrl.residual_bound):
        raise SeedInvalid(f"seed at b={seed.b} fails its certificate "
                          f"(|F| = {seed.residual_bvp:.2e}, residual {res:.2e})")


def trace_branch(seed: Solution, b_target: float, db: float,
                 ctrl: IvpControl = DEFAULT_CONTROL) -> Branch:
    """Natural-parameter continuation from ``seed`` toward ``b_target``.

    Each step predicts K by the secant through the last two points and
    corrects by bracketing and bisection. If the root disappears the loop
    stops and the fold is located between the last two loads.
    """
    if db == 0 or not np.isfinite(db):
        raise ValueError("continuation step db must be nonzero")
    if b_target < 0:
        raise ValueError("b_target must be non-negative")
    if (b_target - seed.b) * db < 0:
        raise ValueError("db points away from b_target")
    _validate_seed(seed, ctrl)
    seed_label = seed.branch_label
    if seed_label is BranchLabel.UNCLASSIFIED:
        seed_label = classify(seed)
    secondary = seed_label in (BranchLabel.SECONDARY_LOWER, BranchLabel.SECONDARY_UPPER)

    points = [dataclasses.replace(seed, branch_label=seed_label)]
    fold = None
    n_steps = int(np.floor(abs(b_target - seed.b) / abs(db) + 1e-9))
    loads = [seed.b + k * db for k in range(1, n_steps + 1)]
    if not loads or abs(loads[-1] - b_target) > 1e-9 * max(1.0, abs(b_target)):
        loads.append(b_target)
    else:
        loads[-1] = b_target
    for b_next in loads:
        last = points[-1]
        if len(points) >= 2:
            prev = points[-2]
            K_pred = last.K + (last.K - prev.K) * (b_next - last.b) / (last.b - prev.b)
        else:
            K_pred = last.K
        br = _correct(b_next, K_pred, last.K, ctrl)
        sol = None
        if br is not None:
            try:
                sol = refine_root(br, b_next, ROOT_TOL, ctrl)
            except ElasticaError:
                sol = None
        if sol is None:
            fold = _fold_between(last.b, last.K, b_next, ctrl)
            break
        label = classify(sol)
        if secondary and label is not BranchLabel.PRIMARY:
            label = seed_label
        points.append(dataclasses.replace(sol, branch_label=label))
    points.sort(key=lambda p: p.b)
    return Branch(tuple(points), "Secondary" if secondary else "Primary", fold)


def _negative_roots(b, K_min, nK, ctrl):
    return scan_roots(b, K_min, 0.0, nK, ctrl)


def detect_fold(b_lo: float, b_hi: float, K_min: float = -40.0, nK: int = 4001,
                tol_b: float = FOLD_TOL, ctrl: IvpControl = DEFAULT_CONTROL) -> tuple[float, float]:
    """Locate the load where the secondary pair appears by bisection on existence.

    Existence means at least one root with K in [K_min, 0]. Returns the
    midpoint of the final load interval and the mean slope of the pair at
    the last load where it exists.
    """
    if not b_lo < b_hi:
        raise ValueError("need b_lo < b_hi")
    if _negative_roots(b_lo, K_min, nK, ctrl):
        raise BadStraddle(f"negative-slope solutions already exist at b_lo={b_lo}")
    hi_brackets = _negative_roots(b_hi, K_min, nK, ctrl)
    if not hi_brackets:
        raise BadStraddle(f"no negative-slope solutions at b_hi={b_hi}")
    while b_hi - b_lo > tol_b:
        mid = 0.5 * (b_lo + b_hi)
        found = _negative_roots(mid, K_min, nK, ctrl)
        if found:
            b_hi, hi_brackets = mid, found
        else:
            b_lo = mid
    roots = [refine_root(br, b_hi, ROOT_TOL, ctrl).K for br in hi_brackets[:2]]
    return 0.5 * (b_lo + b_hi), float(np.mean(roots))
