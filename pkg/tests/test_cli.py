import json
import re
import math

import numpy as np
import pytest

from pathfinder.cli import main
from pathfinder.continuation import ContinuationConfig, EquilibriumPath, run
from pathfinder.io import read_csv
from pathfinder.models import SpringMassChain, VonMisesTruss

from conftest import scan_finite_text


def test_continue_format(tmp_path):
    out = tmp_path / "path.csv"
    rc = main(["continue", "--model", "vmtruss", "--stepper", "crisfield", "--dl", "0.05",
               "--steps", "200", "-o", str(out)])
    assert rc == 0
    header, rows = read_csv(out)
    assert header == ["step", "lambda", "u_0", "u_1", "stability", "dl"]
    assert len(rows) == 200


def test_continue_round_trip_matches_memory(tmp_path):
    out = tmp_path / "path.csv"
    assert main(["continue", "--steps", "50", "-o", str(out)]) == 0
    mem = run(ContinuationConfig(steps=50), VonMisesTruss())
    back = EquilibriumPath.read_csv(out)
    for a, b in zip(mem.points, back.points):
        assert np.array_equal(a.u, b.u) and a.lam == b.lam and a.stability == b.stability


def test_deterministic_reruns(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for f in (a, b):
        assert main(["continue", "--stepper", "riks", "--steps", "60", "-o", str(f)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_uniaxial(tmp_path):
    mat = tmp_path / "nh.txt"
    mat.write_text("model = NH\nnu = 0.5\nmu = 1e5\n")
    out = tmp_path / "uat.csv"
    assert main(["uniaxial", "--material", str(mat), "--lambda-max", "12.5", "--samples", "100",
                 "-o", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["lambda", "lambda3", "sigma", "J"] and len(rows) == 100
    assert max(abs(r[1] - r[0] ** -0.5) for r in rows) <= 1e-10


def test_modal(tmp_path, capsys):
    out = tmp_path / "m.csv"
    assert main(["modal", "--model", "chain", "--n", "5", "--count", "3", "-o", str(out)]) == 0
    printed = [float(x) for x in capsys.readouterr().out.split()]
    assert np.allclose(printed, SpringMassChain(N=5).frequencies_exact()[:3], rtol=1e-10)


def test_buckle_json(tmp_path):
    out = tmp_path / "b.json"
    assert main(["buckle", "--model", "column", "--count", "1", "-o", str(out), "--format", "json"]) == 0
    data = json.loads(out.read_text())
    assert math.isclose(data["modes"][0]["load_factor"], 1.0, rel_tol=1e-7)


@pytest.mark.parametrize("solver", ["newton", "dr", "composite"])
def test_static(tmp_path, solver):
    out = tmp_path / "s.json"
    assert main(["static", "--model", "membrane", "--solver", solver, "-o", str(out), "--format", "json"]) == 0
    assert json.loads(out.read_text())["status"] == "Converged"


def test_apalm_and_report(tmp_path, monkeypatch):
    monkeypatch.setenv("PATHFINDER_WORKERS", "2")
    out, rep = tmp_path / "a.csv", tmp_path / "r.json"
    assert main(["apalm", "--steps", "40", "--max-level", "2", "-o", str(out), "--report", str(rep)]) == 0
    header, rows = read_csv(out)
    assert header[-2:] == ["level", "interval_id"]
    assert json.loads(rep.read_text())["failed"] == 0


def test_spline_demo(tmp_path, capsys):
    out, amap = tmp_path / "s.csv", tmp_path / "A.csv"
    assert main(["spline-demo", "-o", str(out), "--map", str(amap)]) == 0
    assert "18 global functions from 20 local" in capsys.readouterr().out
    assert len(read_csv(amap)[1]) == 22


@pytest.mark.parametrize("argv,needle", [
    (["continue", "--dl", "-1", "-o", "x.csv"], "--dl"),
    (["continue", "--bogus", "-o", "x.csv"], "--bogus"),
    (["apalm", "--n-sub", "1", "-o", "x.csv"], "--n-sub"),
    (["static", "--model", "vmtruss", "--set", "colour=red", "-o", "x.csv"], "colour"),
    (["static", "--model", "nope", "-o", "x.csv"], "--model"),
    (["apalm", "--eps-l", "0.1", "--eps-u", "0.01", "-o", "x.csv"], "--eps-l"),
    (["uniaxial", "--material", "missing.txt", "-o", "x.csv"], "missing"),
    ([], "command"),
])
def test_usage_errors(tmp_path, capsys, monkeypatch, argv, needle):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 1
    assert needle in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


def test_bad_worker_env(tmp_path, monkeypatch):
    monkeypatch.setenv("PATHFINDER_WORKERS", "many")
    assert main(["apalm", "--steps", "2", "-o", str(tmp_path / "x.csv")]) == 1


@pytest.mark.parametrize("argv", [
    ["continue", "--stepper", "crisfield"],
    ["continue", "--stepper", "riks"],
    ["apalm", "--steps", "140"],
    ["static", "--model", "vmtruss", "--set", "P_ref=10"],
    ["static", "--model", "vmtruss", "--set", "P_ref=10", "--solver", "dr"],
    ["static", "--model", "vmtruss", "--set", "P_ref=10", "--solver", "composite"],
    ["buckle", "--model", "vmtruss", "--set", "P_ref=100"],
])
def test_poisoned_runs_exit_2_with_valid_partial_output(tmp_path, argv):
    out = tmp_path / "p.csv"
    assert main(argv + ["--poison", "0.3", "-o", str(out)]) == 2
    scan_finite_text(out)
    header, rows = read_csv(out)
    ok = lambda v: isinstance(v, float) or re.fullmatch(r"(\d+(:\d+)*)?", v)
    assert header and all(ok(v) for r in rows for v in r)
