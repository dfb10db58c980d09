import csv
import io
import json
import re
import subprocess
import sys

import numpy as np
import pytest

from elastica.cli import main
from elastica.records import read_solutions


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def solved60(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "b60.json"
    assert main(["solve", "--b", "60", "--out", str(path)]) == 0
    return path


@pytest.fixture(scope="module")
def branch100(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "branch.csv"
    assert main(["branch", "--b-max", "100", "--db", "0.5", "--out", str(path)]) == 0
    return path


class TestSolve:
    def test_three_records_at_60(self, solved60):
        recs = json.loads(solved60.read_text())
        got = sorted((r["branch_label"], r["stability"]["verdict"]) for r in recs)
        assert got == [("Primary", "Stable"), ("SecondaryLower", "Stable"), ("SecondaryUpper", "Unstable")]

    def test_unloaded(self, capsys):
        code, out, _ = run(capsys, "solve", "--b", 0)
        assert code == 0
        (rec,) = json.loads(out)
        assert rec["K"] == 0.0 and rec["energy"] == 0.0
        assert max(abs(v) for v in rec["theta"]) == 0.0

    def test_below_fold(self, capsys):
        code, out, _ = run(capsys, "solve", "--b", 30)
        recs = json.loads(out)
        assert code == 0 and [r["branch_label"] for r in recs] == ["Primary"]

    def test_round_trip(self, solved60):
        recs = json.loads(solved60.read_text())
        sols = read_solutions(solved60)
        for rec, sol in zip(recs, sols):
            assert sol.b == rec["b"] and sol.K == rec["K"]
            np.testing.assert_allclose(sol.field.theta, rec["theta"], rtol=0, atol=1e-12)
            assert sol.field.theta[0] == 0.0
            assert abs(sol.field.dtheta[-1]) < 1e-6

    def test_deterministic(self, capsys):
        first = run(capsys, "solve", "--b", 5)[1]
        second = run(capsys, "solve", "--b", 5)[1]
        assert first == second

    def test_float_format(self, solved60):
        text = solved60.read_text()
        rec = json.loads(text)[0]
        assert format(rec["K"], ".17g") in text

    @pytest.mark.parametrize("argv", [["solve"], ["solve", "--b", "-1"], ["solve", "--b", "5", "--nk", "1"],
                                      ["solve", "--b", "5", "--k-min", "3", "--k-max", "1"],
                                      ["solve", "--b", "x"], ["frobnicate"]])
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2


class TestConfig:
    def test_precedence(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"b": 30, "nk": 401}))
        from_file = json.loads(run(capsys, "solve", "--config", cfg)[1])
        assert from_file[0]["b"] == 30.0
        flag_wins = json.loads(run(capsys, "solve", "--config", cfg, "--b", "0")[1])
        assert flag_wins[0]["b"] == 0.0

    def test_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"b": 1, "colour": "red"}))
        code, _, err = run(capsys, "solve", "--config", cfg)
        assert code == 2 and "colour" in err

    def test_invalid_value_in_file(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"b": "sixty"}))
        assert run(capsys, "solve", "--config", cfg)[0] == 2

    def test_unreadable(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text("{not json")
        assert run(capsys, "solve", "--config", cfg)[0] == 2


class TestBranch:
    def test_fold_annotated(self, branch100):
        svg = branch100.with_suffix(".svg").read_text()
        m = re.search(r"b0 = ([0-9.]+), K0 = (-?[0-9.]+)", svg)
        assert m is not None
        assert abs(float(m.group(1)) - 41.0) <= 1.0
        assert abs(float(m.group(2)) + 2.6) <= 0.2

    def test_csv_layout(self, branch100):
        raw = branch100.read_bytes()
        assert b"\r" not in raw
        rows = list(csv.DictReader(io.StringIO(raw.decode())))
        assert list(rows[0]) == ["branch_label", "b", "K", "energy", "stability"]
        labels = {r["branch_label"] for r in rows}
        assert labels == {"Primary", "SecondaryLower", "SecondaryUpper"}
        assert {r["stability"] for r in rows if r["branch_label"] == "SecondaryUpper"} <= {"Unstable", "Inconclusive"}

    def test_svg_self_contained(self, branch100):
        svg = branch100.with_suffix(".svg").read_text()
        assert svg.startswith("<svg") and 'viewBox="0 0 ' in svg
        assert "href" not in svg and "<style" not in svg

    def test_small_range_single_curve(self, capsys, tmp_path):
        out = tmp_path / "small.csv"
        assert run(capsys, "branch", "--b-max", 5, "--db", 0.5, "--out", out)[0] == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert {r["branch_label"] for r in rows} == {"Primary"}
        first = rows[0]
        assert float(first["K"]) == pytest.approx(float(first["b"]) / 2, rel=0.02)
        assert "b0 =" not in out.with_suffix(".svg").read_text()

    def test_zero_range_rejected(self, capsys):
        assert run(capsys, "branch", "--b-max", 0)[0] == 2


class TestFileCommands:
    def test_shape(self, capsys, solved60, tmp_path):
        out = tmp_path / "shape.svg"
        assert run(capsys, "shape", solved60, "--index", 1, "--out", out)[0] == 0
        svg = out.read_text()
        assert "<polyline" in svg and "<circle" in svg

    def test_shape_equal_aspect(self, capsys, tmp_path):
        sol = tmp_path / "zero.json"
        run(capsys, "solve", "--b", 0, "--out", sol)
        svg = run(capsys, "shape", sol)[1]
        w, h = map(float, re.search(r'viewBox="0 0 ([0-9.]+) ([0-9.]+)"', svg).groups())
        assert w == pytest.approx(h)
        ys = [float(p.split(",")[1]) for p in re.search(r'points="([^"]+)"', svg).group(1).split()]
        assert max(ys) - min(ys) < 1e-6

    def test_glue(self, capsys, solved60, tmp_path):
        out = tmp_path / "glue.svg"
        code, text, _ = run(capsys, "glue", solved60, "--out", out)
        report = json.loads(text)
        assert code == 0 and report["passed"] is True and report["sup_error"] <= 1e-4
        assert out.read_text().count("<polyline") == 2

    def test_glue_on_primary_fails(self, capsys, solved60):
        recs = json.loads(solved60.read_text())
        idx = next(i for i, r in enumerate(recs) if r["branch_label"] == "Primary")
        assert run(capsys, "glue", solved60, "--index", idx)[0] == 1

    def test_stability_from_file(self, capsys, solved60):
        code, text, _ = run(capsys, "stability", solved60)
        verdicts = {r["branch_label"]: r["verdict"] for r in json.loads(text)}
        assert code == 0 and verdicts["SecondaryUpper"] == "Unstable"

    def test_parse_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"schema_version": 1, "b": 1}')
        assert run(capsys, "shape", bad)[0] == 2
        bad.write_text("[")
        assert run(capsys, "glue", bad)[0] == 2

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "shape", tmp_path / "nope.json")[0] == 2


class TestMinimize:
    def test_zero_start(self, capsys):
        code, out, _ = run(capsys, "minimize", "--b", 5)
        (rec,) = json.loads(out)
        assert code == 0 and rec["branch_label"] == "Primary" and rec["stability"]["verdict"] == "Stable"

    def test_coil_start(self, capsys):
        code, out, _ = run(capsys, "minimize", "--b", 60, "--init", "coil", "--coil-r", 0.1)
        (rec,) = json.loads(out)
        assert code == 0 and rec["branch_label"] == "SecondaryLower"

    def test_bad_coil(self, capsys):
        assert run(capsys, "minimize", "--b", 5, "--init", "coil", "--coil-r", 2)[0] == 2


def test_scan_csv(capsys):
    code, out, err = run(capsys, "scan", "--b", 60, "--nk", 81)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["K", "F"] and len(rows) == 82
    assert err.count("sign change") == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "elastica", "solve", "--b", "0"],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)[0]["branch_label"] == "Primary"
