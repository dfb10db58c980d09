"""Command-line interface: ``elastica solve|scan|branch|stability|shape|glue|minimize``.

Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.
Options may also come from a JSON file given with ``--config``; flags given
on the command line win over the file, which wins over the defaults.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .branch import classify, detect_fold, trace_branch
from .energy import energy
from .errors import BadStraddle, ElasticaError
from .field import ThetaField, uniform_grid
from .geometry import glue_check, reconstruct_shape
from .minimize import DescentParams, coil_profile, minimize_energy
from .ode_ivp import IvpControl, residual_max
from .records import RecordError, csv_text, dumps, read_solutions, write_solutions
from .shooting import BranchLabel, Solution, scan_roots, shoot_residual, solve_all
from .stability import assess
from .svg import Plot

DEFAULTS = {
    "b": None,
    "k_min": -40.0,
    "k_max": 40.0,
    "nk": 8001,
    "db": 0.5,
    "b_max": None,
    "grid_n": 2048,
    "tol": None,
    "out": None,
    "init": "zero",
    "coil_r": 0.1,
    "index": None,
    "solution": None,
}
ROOT_TOL = 1e-7
GTOL = 1e-8
FOLD_SEARCH_LO = 5.0


class UsageError(Exception):
    pass


def _add_common(p, *names):
    add = {
        "b": lambda: p.add_argument("--b", type=float, help="load parameter (>= 0)"),
        "k_min": lambda: p.add_argument("--k-min", dest="k_min", type=float, help="lowest initial slope scanned"),
        "k_max": lambda: p.add_argument("--k-max", dest="k_max", type=float, help="highest initial slope scanned"),
        "nk": lambda: p.add_argument("--nk", type=int, help="number of slopes in the scan"),
        "db": lambda: p.add_argument("--db", type=float, help="continuation step in b"),
        "b_max": lambda: p.add_argument("--b-max", dest="b_max", type=float, help="largest load traced"),
        "grid_n": lambda: p.add_argument("--grid-n", dest="grid_n", type=int, help="output grid intervals"),
        "tol": lambda: p.add_argument("--tol", type=float,
                                      help="root tolerance on |theta'(1)| (solve) or gradient tolerance (minimize)"),
        "out": lambda: p.add_argument("--out", help="output file (default: stdout)"),
        "init": lambda: p.add_argument("--init", choices=["zero", "coil"], help="initial field for descent"),
        "coil_r": lambda: p.add_argument("--coil-r", dest="coil_r", type=float, help="coil extent R in (0, 1]"),
        "index": lambda: p.add_argument("--index", type=int, help="record to use from the solution file"),
        "solution": lambda: p.add_argument("solution", nargs="?", help="solution JSON file"),
    }
    for name in names:
        add[name]()
    p.add_argument("--config", help="JSON file with option values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elastica", description="Equilibria of a clamped elastica under uniform load.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "solve": ("all equilibria at one load (JSON records)", ("b", "k_min", "k_max", "nk", "grid_n", "tol", "out")),
        "scan": ("shooting residual on a slope grid (CSV)", ("b", "k_min", "k_max", "nk", "grid_n", "out")),
        "branch": ("continuation table (CSV) and level-set plot (SVG)", ("b_max", "db", "grid_n", "out")),
        "stability": ("certificates for solutions of a file or a load", ("solution", "b", "grid_n", "out")),
        "shape": ("deformed shape of a solution record (SVG)", ("solution", "index", "out")),
        "glue": ("gluing check of a curled solution (JSON + SVG)", ("solution", "index", "out")),
        "minimize": ("direct energy minimization (JSON record)", ("b", "init", "coil_r", "grid_n", "tol", "out")),
    }
    for name, (help_text, opts) in specs.items():
        _add_common(sub.add_parser(name, help=help_text, description=help_text), *opts)
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags, then validate."""
    given = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        unknown = sorted(set(cfg) - set(given))
        if unknown:
            raise UsageError(f"unknown config keys for '{args.command}': {', '.join(unknown)}")
    opts = {k: DEFAULTS[k] for k in given}
    opts.update(cfg)
    opts.update({k: v for k, v in given.items() if v is not None})
    _validate(args.command, opts)
    return opts


def _number(opts, key, cond, msg):
    v = opts.get(key)
    if v is None:
        return
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or not cond(v):
        raise UsageError(f"--{key.replace('_', '-')} {msg} (got {v!r})")


def _validate(command, opts):
    if command in ("solve", "scan", "minimize") and opts.get("b") is None:
        raise UsageError("--b is required")
    if command == "branch" and opts.get("b_max") is None:
        raise UsageError("--b-max is required")
    if command in ("shape", "glue") and opts.get("solution") is None:
        raise UsageError("a solution file is required")
    if command == "stability" and opts.get("solution") is None and opts.get("b") is None:
        raise UsageError("give a solution file or --b")
    _number(opts, "b", lambda v: v >= 0, "must be non-negative")
    _number(opts, "b_max", lambda v: v > 0, "must be positive")
    _number(opts, "db", lambda v: v > 0, "must be positive")
    _number(opts, "tol", lambda v: v > 0, "must be positive")
    _number(opts, "coil_r", lambda v: 0 < v <= 1, "must lie in (0, 1]")
    _number(opts, "grid_n", lambda v: v >= 64 and float(v).is_integer(), "must be an integer >= 64")
    _number(opts, "nk", lambda v: v >= 2 and float(v).is_integer(), "must be an integer >= 2")
    _number(opts, "k_min", lambda v: True, "must be a number")
    _number(opts, "k_max", lambda v: True, "must be a number")
    _number(opts, "index", lambda v: float(v).is_integer(), "must be an integer")
    if "k_min" in opts and "k_max" in opts and not opts["k_min"] < opts["k_max"]:
        raise UsageError("--k-min must be below --k-max")
    if opts.get("init") not in (None, "zero", "coil"):
        raise UsageError("--init must be 'zero' or 'coil'")
    for key in ("grid_n", "nk", "index"):
        if opts.get(key) is not None:
            opts[key] = int(opts[key])


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _control(opts) -> IvpControl:
    return IvpControl(grid_n=opts.get("grid_n") or 2048)


def cmd_solve(opts):
    sols = solve_all(float(opts["b"]), opts["k_min"], opts["k_max"], opts["nk"], _control(opts),
                     opts["tol"] or ROOT_TOL)
    _emit(write_solutions([assess(s) for s in sols], None), opts["out"])


def cmd_scan(opts):
    b = float(opts["b"])
    Ks = np.linspace(opts["k_min"], opts["k_max"], opts["nk"])
    Fs = shoot_residual(Ks, b, _control(opts))
    for br in scan_roots(b, opts["k_min"], opts["k_max"], opts["nk"], _control(opts)):
        print(f"sign change in [{br.K_lo:.6g}, {br.K_hi:.6g}]", file=sys.stderr)
    _emit(csv_text(("K", "F"), zip(Ks, Fs)), opts["out"])


def _branch_data(b_max, db, ctrl):
    b0 = min(db, b_max)
    seed = next(s for s in solve_all(b0, ctrl=ctrl) if s.branch_label is BranchLabel.PRIMARY)
    branches = [trace_branch(seed, b_max, db, ctrl)]
    seeds = {}
    for s in solve_all(b_max, ctrl=ctrl):
        if s.branch_label in (BranchLabel.SECONDARY_LOWER, BranchLabel.SECONDARY_UPPER):
            seeds.setdefault(s.branch_label, s)
    for label in (BranchLabel.SECONDARY_LOWER, BranchLabel.SECONDARY_UPPER):
        if label in seeds:
            branches.append(trace_branch(seeds[label], 0.0, -db, ctrl))
    fold = None
    if seeds and b_max > FOLD_SEARCH_LO:
        try:
            fold = detect_fold(FOLD_SEARCH_LO, b_max, ctrl=ctrl)
        except BadStraddle:
            fold = None
    return branches, fold


def cmd_branch(opts):
    ctrl = _control(opts)
    branches, fold = _branch_data(float(opts["b_max"]), float(opts["db"]), ctrl)
    rows = []
    for br in branches:
        for p in br.points:
            rows.append((p.branch_label.value, p.b, p.K, p.energy, assess(p).stability.verdict.value))
    _emit(csv_text(("branch_label", "b", "K", "energy", "stability"), rows), opts["out"])
    if opts["out"] is not None:
        plot = Plot(title="Solutions in the (K, b) plane")
        plot.line(branches[0].K, branches[0].b, color="#1f4e9c", width=2)
        if len(branches) > 1:
            loop = [br.points for br in branches[1:]]
            ks = np.concatenate([[p.K for p in loop[0]][::-1]] + [[p.K for p in pts] for pts in loop[1:]])
            bs = np.concatenate([[p.b for p in loop[0]][::-1]] + [[p.b for p in pts] for pts in loop[1:]])
            plot.line(ks, bs, color="#c0392b", width=2)
        if fold is not None:
            plot.marker(fold[1], fold[0])
            plot.label(fold[1], fold[0], f"b0 = {fold[0]:.2f}, K0 = {fold[1]:.2f}")
        Path(opts["out"]).with_suffix(".svg").write_text(plot.render(), encoding="utf-8", newline="\n")
    if fold is not None:
        print(f"fold at b0 = {fold[0]:.4f}, K0 = {fold[1]:.4f}", file=sys.stderr)


def _load(opts) -> list[Solution]:
    return read_solutions(opts["solution"])


def _pick(sols, index, prefer=None):
    if index is None:
        if prefer is not None:
            for s in sols:
                if s.branch_label is prefer:
                    return s
        index = 0
    if not -len(sols) <= index < len(sols):
        raise UsageError(f"--index {index} out of range for {len(sols)} records")
    return sols[index]


def _stability_record(sol):
    from .records import certificate_record

    st = sol.stability
    return {"b": sol.b, "K": sol.K, "branch_label": sol.branch_label.value, "verdict": st.verdict.value,
            "certificate": certificate_record(st.certificate), "min_eigenvalue": st.min_eigenvalue}


def cmd_stability(opts):
    if opts["solution"] is not None:
        sols = _load(opts)
    else:
        sols = solve_all(float(opts["b"]), ctrl=_control(opts))
    _emit(dumps([_stability_record(assess(s)) for s in sols], indent=2) + "\n", opts["out"])


def cmd_shape(opts):
    sol = _pick(_load(opts), opts["index"])
    pts = reconstruct_shape(sol.field).points
    plot = Plot(equal_aspect=True, title=f"Deformed shape, b = {sol.b:g}")
    plot.line(pts[:, 0], pts[:, 1], width=2)
    plot.marker(0.0, 0.0, color="#222222")
    _emit(plot.render(), opts["out"])


def cmd_glue(opts):
    sol = _pick(_load(opts), opts["index"], prefer=BranchLabel.SECONDARY_LOWER)
    report = glue_check(sol)
    print(dumps({"s_bar": report.s_bar, "b_eff": report.b_eff, "sup_error": report.sup_error,
                 "passed": report.passed}, indent=2))
    if opts["out"] is not None:
        full = reconstruct_shape(sol.field).points
        ref = reconstruct_shape(report.reference.field).points
        length = 1.0 - report.s_bar
        start = np.array([np.interp(report.s_bar, sol.field.grid, full[:, k]) for k in (0, 1)])
        mapped = start + length * ref * np.array([-1.0, 1.0])
        plot = Plot(equal_aspect=True, title="Curled solution and the reduced primary solution")
        plot.line(full[:, 0], full[:, 1], width=2)
        plot.line(mapped[:, 0], mapped[:, 1], color="#c0392b", width=2, dash="6,4")
        plot.marker(0.0, 0.0, color="#222222")
        plot.marker(*start)
        Path(opts["out"]).write_text(plot.render(), encoding="utf-8", newline="\n")


def cmd_minimize(opts):
    b = float(opts["b"])
    n = opts["grid_n"] or 2048
    if opts["init"] == "coil":
        init = coil_profile(float(opts["coil_r"]), n)
    else:
        grid = uniform_grid(n)
        init = ThetaField(grid, np.zeros_like(grid), np.zeros_like(grid))
    field = minimize_energy(b, init, DescentParams(gtol=opts["tol"] or GTOL))
    sol = Solution(b, float(field.dtheta[0]), field, abs(float(field.dtheta[-1])), energy(field, b),
                   residual_max(field))
    sol = assess(dataclasses.replace(sol, branch_label=classify(sol)))
    _emit(write_solutions([sol], None), opts["out"])


COMMANDS = {
    "solve": cmd_solve,
    "scan": cmd_scan,
    "branch": cmd_branch,
    "stability": cmd_stability,
    "shape": cmd_shape,
    "glue": cmd_glue,
    "minimize": cmd_minimize,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        opts = resolve(args)
        COMMANDS[args.command](opts)
    except (UsageError, RecordError) as exc:
        print(f"elastica {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ElasticaError as exc:
        print(f"elastica {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
