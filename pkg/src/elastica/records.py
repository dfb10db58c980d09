"""JSON solution records and CSV tables with fixed 17-digit float formatting."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .field import ThetaField, uniform_grid
from .shooting import BranchLabel, Solution, Stability, Verdict
from .stability import CertificateKind, StabilityCertificate

SCHEMA_VERSION = 1


class RecordError(ValueError):
    """A solution file that cannot be parsed or fails validation."""


def fmt(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def dumps(obj, indent: int = 0, level: int = 0) -> str:
    """Deterministic JSON: insertion ordered keys, floats with 17 digits."""
    pad = " " * (indent * (level + 1)) if indent else ""
    end = " " * (indent * level) if indent else ""
    nl = "\n" if indent else ""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (float, int, np.floating, np.integer)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[" + nl + ("," + nl).join(pad + dumps(v, indent, level + 1) for v in obj) + nl + end + "]"
    if isinstance(obj, dict):
        items = [pad + json.dumps(str(k)) + ": " + dumps(v, indent, level + 1) for k, v in obj.items()]
        return "{" + nl + ("," + nl).join(items) + nl + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def certificate_record(cert: StabilityCertificate | None):
    if cert is None:
        return None
    return {"kind": cert.kind.value, "lambda": cert.lam, "mu": cert.mu, "nu": cert.nu,
            "integral_I": cert.integral_I, "threshold": cert.threshold, "b": cert.b,
            "ramp_variation": cert.ramp_variation}


def solution_record(sol: Solution) -> dict:
    st = {"verdict": sol.stability.verdict.value}
    if sol.stability.certificate is not None:
        st["certificate"] = certificate_record(sol.stability.certificate)
    if sol.stability.min_eigenvalue is not None:
        st["min_eigenvalue"] = sol.stability.min_eigenvalue
    return {
        "schema_version": SCHEMA_VERSION,
        "b": sol.b,
        "K": sol.K,
        "residual_bvp": sol.residual_bvp,
        "energy": sol.energy,
        "branch_label": sol.branch_label.value,
        "stability": st,
        "grid_n": sol.field.n,
        "theta": np.asarray(sol.field.theta),
        "dtheta": np.asarray(sol.field.dtheta),
    }


def _certificate(data) -> StabilityCertificate | None:
    if data is None:
        return None
    return StabilityCertificate(CertificateKind(data["kind"]), float(data["lambda"]), float(data["threshold"]),
                                float(data["b"]), data.get("mu"), data.get("nu"), data.get("integral_I"),
                                data.get("ramp_variation"))


def parse_solution(data: dict) -> Solution:
    try:
        if data.get("schema_version") != SCHEMA_VERSION:
            raise RecordError(f"unsupported schema_version {data.get('schema_version')!r}")
        n = int(data["grid_n"])
        theta = np.asarray(data["theta"], dtype=float)
        dtheta = np.asarray(data["dtheta"], dtype=float)
        if theta.shape != (n + 1,) or dtheta.shape != (n + 1,):
            raise RecordError("theta and dtheta must have grid_n + 1 samples")
        b = float(data["b"])
        field = ThetaField(uniform_grid(n), theta, dtheta, b)
        st = data.get("stability") or {}
        stability = Stability(Verdict(st.get("verdict", Verdict.INCONCLUSIVE.value)),
                              _certificate(st.get("certificate")), st.get("min_eigenvalue"))
        return Solution(b, float(data["K"]), field, float(data["residual_bvp"]), float(data["energy"]),
                        branch_label=BranchLabel(data.get("branch_label", BranchLabel.UNCLASSIFIED.value)),
                        stability=stability)
    except RecordError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise RecordError(f"invalid solution record: {exc}") from exc


def write_solutions(sols, path: Path | None) -> str:
    text = dumps([solution_record(s) for s in sols], indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text


def read_solutions(path) -> list[Solution]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RecordError(f"cannot read {path}: {exc}") from exc
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list) or not data:
        raise RecordError("solution file must hold a record or a non-empty array of records")
    return [parse_solution(d) for d in data]


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if isinstance(v, (float, int, np.floating, np.integer))
                              and not isinstance(v, bool) else str(v) for v in row))
    return "\n".join(lines) + "\n"
