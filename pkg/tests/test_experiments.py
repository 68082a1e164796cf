import csv
import json
import math

import numpy as np
import pytest

from umbilab import build_grid
from umbilab.experiments import (
    PinchRecord,
    SweepConfig,
    dumps,
    generic_initial,
    optimality_analysis,
    optimality_run,
    pinch_sweep,
    report_emit,
)
from umbilab.imcf import FlowControls, FlowDiagnostics, FlowSample, run_flow
from umbilab.graph import make_sphere_graph


@pytest.fixture(scope="module")
def small_sweep():
    return pinch_sweep(SweepConfig(eps=list(np.logspace(-3, -1, 12)), grid=(24, 48)))


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(eps=[0.1, 0.05])
    with pytest.raises(ValueError):
        SweepConfig(eps=[0.0, 0.1])
    with pytest.raises(ValueError):
        SweepConfig(p=2.0)
    with pytest.raises(ValueError):
        SweepConfig(ambient="torus")
    with pytest.raises(ValueError):
        SweepConfig.from_dict({"epsilon": [0.1]})
    cfg = SweepConfig.from_dict({"eps": [0.01, 0.1], "grid": [16, 32]})
    assert cfg.grid == (16, 32) and cfg.eps == [0.01, 0.1]
    assert len(SweepConfig().eps) == 12


def test_empty_sweep_is_valid(tmp_path):
    rep = pinch_sweep(SweepConfig(eps=[], grid=(16, 32)))
    assert rep.records == []
    paths = report_emit(rep, tmp_path)
    data = json.loads(paths[0].read_text())
    assert data["records"] == []
    assert data["baseline"]["eps"] == 0.0
    assert (tmp_path / "sweep.csv").read_text().count("\n") == 1


def test_baseline_sphere_is_exactly_round(small_sweep):
    base = small_sweep.baseline
    assert base.eps == 0.0
    assert base.dH <= 1e-12
    assert base.A0_p <= 1e-8
    assert base.area == pytest.approx(1.0, abs=1e-8)


def test_records_are_at_unit_area(small_sweep):
    assert len(small_sweep.records) == 12
    assert all(r.area == pytest.approx(1.0, abs=1e-8) for r in small_sweep.records)
    assert small_sweep.criteria["unit_area"]


def test_sweep_quantities_grow_with_eps(small_sweep):
    a0 = [r.A0_p for r in small_sweep.records]
    dH = [r.dH for r in small_sweep.records]
    assert np.all(np.diff(a0) > 0) and np.all(np.diff(dH) > 0)
    assert small_sweep.n_fit >= 10
    assert 0.9 <= small_sweep.alpha_emp <= 1.1


def test_sweep_is_self_consistent(small_sweep):
    # the smallest perturbation is well inside the pinched regime the fit describes
    first = small_sweep.records[0]
    assert first.A0_p < first.H_p * small_sweep.eps0_standin
    assert first.pinching < small_sweep.pinching_at_eps0
    assert all(r.convex for r in small_sweep.records)
    assert all(abs(r.lambda1_normalized - 2.0) <= small_sweep.lambda1_K * r.eps + 1e-12 for r in small_sweep.records)


def test_emit_is_byte_deterministic(small_sweep, tmp_path):
    a = report_emit(small_sweep, tmp_path / "a")
    again = pinch_sweep(SweepConfig(eps=list(np.logspace(-3, -1, 12)), grid=(24, 48)))
    b = report_emit(again, tmp_path / "b")
    assert [p.name for p in a] == ["sweep.json", "sweep.csv", "sweep_dH.dat", "sweep_perez.dat", "sweep_aubry.dat"]
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()
    with open(a[1]) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(PinchRecord.__dataclass_fields__)
    assert len(rows) == 13
    dat = a[2].read_text().splitlines()
    assert dat[0].startswith("#") and len(dat) == 13


def test_dumps_handles_numpy_and_nan():
    text = dumps({"b": np.float64(1.5), "a": [np.nan, np.int64(2), np.bool_(True)], "c": np.arange(2)})
    assert json.loads(text) == {"a": [None, 2, True], "b": 1.5, "c": [0, 1]}
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("\n")


def test_generic_initial_is_reproducible():
    grid = build_grid(16, 32)
    a, b = generic_initial(grid, 3), generic_initial(grid, 3)
    assert np.array_equal(a.u, b.u)
    assert not np.array_equal(a.u, generic_initial(grid, 4).u)
    assert a.ambient.kind == "hyperbolic"
    assert a.u.min() > 1.4 and a.u.max() < 2.6


def _synthetic_diag(rate_ball=0.5, noise=0.0):
    diag = FlowDiagnostics("hyperbolic")
    rng = np.random.default_rng(0)
    for t in np.arange(0.0, 10.0 + 1e-9, 0.1):
        a_ball = 0.3 * math.exp(-rate_ball * t) * (1 + noise * rng.standard_normal())
        diag.samples.append(FlowSample(
            t=float(t), sup_A_trfree_hyp=math.exp(-t), sup_A_trfree_ball=a_ball,
            dH_ball_bestfit=0.1 * a_ball, dH_ball_S2=0.2 * math.exp(-0.5 * t), osc_uhat=0.0,
            what_min=0.5, what_max=0.6, H_min=2.0, H_max=2.0, v_max=1.0, dt=0.01,
        ))
    return diag


def test_optimality_analysis_on_exact_rates():
    rep = optimality_analysis(_synthetic_diag(), window=(5.0, 10.0))
    assert rep.passed, rep.criteria
    assert rep.fits["sup_A_trfree_hyp"].slope == pytest.approx(-1.0, abs=1e-9)
    assert rep.ratio_band == pytest.approx(1.0, abs=1e-12)
    assert rep.what_interval == (0.5, 0.6)
    assert len(rep.table) == 51


def test_optimality_analysis_rejects_wrong_rates():
    rep = optimality_analysis(_synthetic_diag(rate_ball=0.3), window=(5.0, 10.0))
    assert not rep.criteria["slope_sup_A_trfree_ball"]
    assert not rep.passed


def test_optimality_run_needs_hyperbolic_data():
    with pytest.raises(ValueError):
        optimality_run(make_sphere_graph(1.0, build_grid(16, 32), "euclidean"))


def test_decay_report_emit(tmp_path):
    grid = build_grid(16, 32)
    diag = run_flow(generic_initial(grid, 0), FlowControls(t_end=2.0, sample_every=0.1))
    rep = optimality_analysis(diag, window=(1.0, 2.0))
    paths = report_emit(rep, tmp_path)
    assert [p.name for p in paths] == ["optimality.json", "optimality_flow.csv", "optimality_ratio.dat"]
    data = json.loads(paths[0].read_text())
    assert set(data["criteria"]) == {
        "slope_sup_A_trfree_hyp", "slope_sup_A_trfree_ball", "slope_dH_ball_S2",
        "what_positive_interval", "ratio_alpha1_bounded", "ratio_alpha15_increasing",
    }
    assert paths[1].read_text().count("\n") == 22
    with pytest.raises(TypeError):
        report_emit(object(), tmp_path)
