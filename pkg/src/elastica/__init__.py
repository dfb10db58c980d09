"""Equilibria, branches and stability of a clamped elastica under uniform load."""

__version__ = "0.1.0"

from .errors import (BadStraddle, DomainError, ElasticaError, HypothesisFailed, LostBracket,
                     MaxIterations, NoConvergence, NotStationary, SeedInvalid, StepUnderflow)
from .field import ThetaField, uniform_grid
from .ode_ivp import IvpControl, IvpResult, integrate_ivp, rhs
from .analytic import apply_T, picard_solve, small_b_profile
from .energy import VariationField, energy, energy_db, jacobi_min_eigenvalue, second_variation
from .shooting import (Bracket, BranchLabel, Solution, Stability, Verdict, refine_root, scan_roots,
                       shoot_residual, solve_all)
from .branch import Branch, classify, detect_fold, trace_branch
from .stability import (SignIntervalSet, StabilityCertificate, assess, check_stable, check_unstable,
                        instability_threshold, sign_intervals, stability_threshold)
from .minimize import DescentParams, coil_profile, minimize_energy
from .geometry import GlueReport, Shape, glue_check, reconstruct_shape

__all__ = [
    "BadStraddle", "DomainError", "ElasticaError", "HypothesisFailed", "LostBracket", "MaxIterations",
    "NoConvergence", "NotStationary", "SeedInvalid", "StepUnderflow",
    "ThetaField", "uniform_grid", "IvpControl", "IvpResult", "integrate_ivp", "rhs",
    "apply_T", "picard_solve", "small_b_profile",
    "VariationField", "energy", "energy_db", "jacobi_min_eigenvalue", "second_variation",
    "Bracket", "BranchLabel", "Solution", "Stability", "Verdict", "refine_root", "scan_roots",
    "shoot_residual", "solve_all",
    "Branch", "classify", "detect_fold", "trace_branch",
    "SignIntervalSet", "StabilityCertificate", "assess", "check_stable", "check_unstable",
    "instability_threshold", "sign_intervals", "stability_threshold",
    "DescentParams", "coil_profile", "minimize_energy",
    "GlueReport", "Shape", "glue_check", "reconstruct_shape",
]
