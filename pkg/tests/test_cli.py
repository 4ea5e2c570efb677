import json
import time

import numpy as np
import pytest

from tradeoff.cli import ExperimentConfig, main, run_fig1, run_greedy, run_identities, run_kansa


def test_fig1_summary_and_curves(tmp_path):
    cfg = ExperimentConfig("fig1", out_dir=tmp_path)
    summary = run_fig1(cfg)
    assert set(summary) == {"equidistant", "chebyshev_extrema", "chebyshev_zeros"}
    for fam, vals in summary.items():
        assert vals["lagr_norm"] > vals["bump_norm"] > 0
        assert vals["product"] >= 1.0 - 1e-8  # trade-off inequality
        dat = (tmp_path / f"fig1_{fam}.dat").read_text().splitlines()
        assert len(dat) == 402  # header + 401 samples
    assert (tmp_path / "fig1_summary.json").exists()


def test_fig1_curve_endpoint_values(tmp_path):
    # the Lagrangian curve is 1 at the extra point and 0 at every node
    cfg = ExperimentConfig("fig1", params={"families": ["equidistant"]},
                           out_dir=tmp_path)
    run_fig1(cfg)
    rows = np.loadtxt(tmp_path / "fig1_equidistant.dat")
    xs, lagr = rows[:, 0], rows[:, 2]
    nodes = np.linspace(-1, 1, 11)
    for nd in nodes:
        assert abs(lagr[np.argmin(np.abs(xs - nd))]) < 0.05


def test_kansa_smoke_reduced(tmp_path):
    t0 = time.time()
    cfg = ExperimentConfig(
        "kansa",
        params={"n_side": 5, "eval_interior_side": 9, "eval_boundary": 16},
        out_dir=tmp_path)
    summary = run_kansa(cfg)
    assert time.time() - t0 < 5.0
    assert summary["M"] == 41 and summary["N"] == 25
    assert summary["pointwise_violations"] == 0
    header = (tmp_path / "kansa_interior.csv").read_text().splitlines()[0]
    assert header == "x,y,p2_unsym,p2_sym,recip_pseudo_norm2"
    sites = np.genfromtxt(tmp_path / "kansa_data_sites.csv", delimiter=",",
                          skip_header=1)
    assert sites.shape == (41, 5)
    assert np.all(np.isfinite(sites[:, 4]))


def test_identities_deterministic(tmp_path):
    cfg1 = ExperimentConfig("identities", out_dir=tmp_path / "a", seed=123)
    text1, ok1 = run_identities(cfg1)
    cfg2 = ExperimentConfig("identities", out_dir=tmp_path / "b", seed=123)
    text2, ok2 = run_identities(cfg2)
    assert ok1 and ok2
    assert (tmp_path / "a/identities_report.txt").read_bytes() \
        == (tmp_path / "b/identities_report.txt").read_bytes()


def test_identities_perturbation_fails(tmp_path):
    cfg = ExperimentConfig("identities", params={"perturb": True},
                           out_dir=tmp_path)
    text, ok = run_identities(cfg)
    assert not ok
    assert "FAIL kernel" in text


def test_identities_suite_filter(tmp_path):
    cfg = ExperimentConfig("identities", params={"suites": ["poly"]},
                           out_dir=tmp_path)
    text, ok = run_identities(cfg)
    assert ok
    assert "poly" in text and "svd" not in text


def test_greedy_runner(tmp_path):
    cfg = ExperimentConfig("greedy", params={"grid_side": 5, "max_steps": 8},
                           out_dir=tmp_path)
    summary = run_greedy(cfg)
    assert summary["steps"] == 8
    rows = (tmp_path / "greedy_trace.csv").read_text().splitlines()
    assert rows[0] == "step,candidate_id,x,y,max_power"
    powers = [float(r.split(",")[4]) for r in rows[1:]]
    assert all(a >= b - 1e-9 for a, b in zip(powers, powers[1:]))
    assert (tmp_path / "greedy_selected.csv").exists()


def test_greedy_single_step(tmp_path):
    cfg = ExperimentConfig("greedy", params={"grid_side": 4, "max_steps": 1},
                           out_dir=tmp_path)
    run_greedy(cfg)
    assert len((tmp_path / "greedy_trace.csv").read_text().splitlines()) == 2


def test_greedy_tolerance_immediate_stop(tmp_path):
    cfg = ExperimentConfig("greedy",
                           params={"grid_side": 4, "max_steps": 9, "tolerance": 1.0},
                           out_dir=tmp_path)
    summary = run_greedy(cfg)
    assert summary["steps"] == 1 and summary["stop_reason"] == "tolerance"


def test_cli_main_audit(tmp_path):
    spec = {
        "kernel": {"family": "matern", "m": 5, "d": 1, "c": 1.0},
        "data": [{"kind": "point", "x": [0.0]}, {"kind": "point", "x": [0.5]}],
        "eval": [{"kind": "point", "x": [0.25]}, {"kind": "point", "x": [0.0]}],
    }
    cfg_file = tmp_path / "audit.json"
    cfg_file.write_text(json.dumps(spec))
    rc = main(["audit", "--config", str(cfg_file), "--out", str(tmp_path / "out")])
    assert rc == 0
    lines = (tmp_path / "out/audit_report.csv").read_text().splitlines()
    assert lines[0] == "mu_kind,mu_x,mu_y,power,stability_norm,product,flag"
    assert lines[1].endswith("ok") and lines[2].endswith("excluded")
    prod = float(lines[1].split(",")[5])
    assert prod == pytest.approx(1.0, rel=1e-6)


def test_cli_main_identities_exit_codes(tmp_path):
    rc = main(["identities", "--out", str(tmp_path / "ok"), "--suite", "poly"])
    assert rc == 0
    rc = main(["identities", "--out", str(tmp_path / "bad"), "--perturb"])
    assert rc == 1


def test_cli_chebweight_audit(tmp_path):
    spec = {
        "kernel": {"family": "chebweight", "weights": "(j+1)^2", "K": 40},
        "data": [{"kind": "point", "x": [-0.5]}, {"kind": "point", "x": [0.5]}],
        "eval": [{"kind": "point", "x": [0.1]}],
    }
    cfg_file = tmp_path / "audit.json"
    cfg_file.write_text(json.dumps(spec))
    rc = main(["audit", "--config", str(cfg_file), "--out", str(tmp_path / "out")])
    assert rc == 0
    line = (tmp_path / "out/audit_report.csv").read_text().splitlines()[1]
    assert float(line.split(",")[5]) == pytest.approx(1.0, rel=1e-5)


def test_fig1_parallel_flag_matches_serial(tmp_path):
    cfg_s = ExperimentConfig("kansa", params={"n_side": 3, "eval_interior_side": 5,
                                              "eval_boundary": 8},
                             out_dir=tmp_path / "s", parallel=1)
    cfg_p = ExperimentConfig("kansa", params={"n_side": 3, "eval_interior_side": 5,
                                              "eval_boundary": 8},
                             out_dir=tmp_path / "p", parallel=3)
    run_kansa(cfg_s)
    run_kansa(cfg_p)
    assert (tmp_path / "s/kansa_interior.csv").read_bytes() \
        == (tmp_path / "p/kansa_interior.csv").read_bytes()
