import json
import subprocess
import sys

import numpy as np
import pytest

from umbilab import build_grid, read_graph, write_graph
from umbilab.cli import main
from umbilab.conformal import r_to_rho
from umbilab.graph import make_perturbed_graph, make_sphere_graph

SMALL = ["--grid", "16x32"]


def test_analyze_preset(tmp_path, capsys):
    assert main(SMALL + ["--out-dir", str(tmp_path), "analyze", "--preset", "harmonic2", "--eps", "0.1"]) == 0
    data = json.loads((tmp_path / "analysis.json").read_text())
    assert data["ambient"] == "euclidean"
    assert "wrote" in capsys.readouterr().out


def test_analyze_input_file(tmp_path):
    g = make_perturbed_graph(1.0, 0.1, "tesseral3", build_grid(16, 32), "hyperbolic")
    write_graph(g, tmp_path / "g.json")
    out = tmp_path / "rep.json"
    assert main(["analyze", "--input", str(tmp_path / "g.json"), "--report", str(out), "--p", "4"]) == 0
    assert json.loads(out.read_text())["ambient"] == "hyperbolic"


def test_global_flags_work_after_the_subcommand(tmp_path):
    assert main(["analyze", "--grid", "16x32", "--out-dir", str(tmp_path), "--preset", "sphere"]) == 0
    assert (tmp_path / "analysis.json").exists()


def test_convert_round_trip_with_report(tmp_path):
    g = make_sphere_graph(1.2, build_grid(16, 32), "hyperbolic")
    write_graph(g, tmp_path / "h.json")
    assert main(["convert", "--input", str(tmp_path / "h.json"), "--output", str(tmp_path / "b.json"),
                 "--reference-radius", "1.0", "--report", str(tmp_path / "c.json")]) == 0
    ball = read_graph(tmp_path / "b.json")
    assert ball.ambient.kind == "euclidean"
    assert np.allclose(ball.u, r_to_rho(1.2))
    rep = json.loads((tmp_path / "c.json").read_text())
    assert {"psi_max", "dH_hyperbolic", "dH_ball"} <= set(rep)
    assert rep["dH_hyperbolic"] == pytest.approx(0.2, abs=1e-12)
    assert main(["convert", "--input", str(tmp_path / "b.json"), "--output", str(tmp_path / "h2.json")]) == 0
    assert np.allclose(read_graph(tmp_path / "h2.json").u, g.u, atol=1e-14)


def test_flow_sphere_passes_its_oracle(tmp_path, capsys):
    args = SMALL + ["--ambient", "hyperbolic", "--out-dir", str(tmp_path), "flow", "--initial", "sphere",
                    "--radius", "1.0", "--t-end", "1.0", "--sample-every", "0.25", "--report", str(tmp_path / "f.json")]
    assert main(args) == 0
    assert "PASS sphere_oracle" in capsys.readouterr().out
    lines = (tmp_path / "flow.csv").read_text().splitlines()
    assert len(lines) == 6 and len(lines[0].split(",")) == 12
    assert json.loads((tmp_path / "f.json").read_text())["sphere_oracle"]["rel_error"] <= 1e-4


def test_flow_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"t_end": 0.5, "sample_every": 0.25, "cfl": 0.1}))
    out = tmp_path / "x.csv"
    assert main(SMALL + ["--config", str(cfg), "flow", "--initial", "harmonic2", "--eps", "0.1", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 4


def test_bad_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"t_end": 0.5, "bogus": 1}))
    assert main(SMALL + ["--config", str(cfg), "flow"]) == 2
    cfg.write_text("[1, 2]")
    assert main(SMALL + ["--config", str(cfg), "sweep"]) == 2
    assert main(["--grid", "4x4", "analyze"]) == 2
    assert main(SMALL + ["convert", "--input", str(tmp_path / "missing.json"), "--output", str(tmp_path / "o.json")]) == 2


def test_sweep_writes_rows(tmp_path):
    rc = main(SMALL + ["--out-dir", str(tmp_path), "sweep", "--eps", "logspace:-3,-1,12"])
    assert rc == 0
    assert len((tmp_path / "sweep.csv").read_text().splitlines()) == 13
    assert json.loads((tmp_path / "sweep.json").read_text())["passed"] is True


def test_failing_criteria_give_nonzero_exit(tmp_path, capsys):
    # Andrews' deviation is only defined for Euclidean surfaces, so this criterion cannot hold
    rc = main(SMALL + ["--ambient", "hyperbolic", "--out-dir", str(tmp_path), "sweep", "--eps", "0.01,0.05,0.1"])
    assert rc == 1
    assert "FAIL andrews_ratio_stable" in capsys.readouterr().out


def test_empty_sweep_exits_0(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"eps": []}))
    assert main(SMALL + ["--config", str(cfg), "--out-dir", str(tmp_path), "sweep"]) == 0
    assert json.loads((tmp_path / "sweep.json").read_text())["records"] == []


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "umbilab.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("analyze", "flow", "sweep", "optimality", "convert"):
        assert cmd in res.stdout
