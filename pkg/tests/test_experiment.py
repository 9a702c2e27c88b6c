"""Experiment harness: method isolation, diagnostics, persistence, sweeps."""

import json

import numpy as np
import pytest

from edof.config import config_from_mapping
from edof.errors import ConfigError, ResourceError
from edof.experiment import report_mapping, run_experiment, run_sweep


def _scene_mapping(grid=16, distance=10.0, methods=None, **extra):
    mapping = {
        "wave": {"wavelength_m": 0.01},
        "tx": {"center_m": [0.0, 0.0, 0.0], "size_m": [0.5, 0.5],
               "grid": [grid, grid]},
        "rx": {"center_m": [0.0, 0.0, distance], "size_m": [0.5, 0.5],
               "grid": [grid, grid]},
        "landau_options": {"lag_grid": 41, "lag_extent_m": 6.3},
        "seed": 3,
    }
    if methods is not None:
        mapping["methods"] = methods
    mapping.update(extra)
    return mapping


@pytest.fixture(scope="module")
def full_report():
    cfg = config_from_mapping(_scene_mapping())
    return run_experiment(cfg, write=False)


def test_run_produces_one_row_per_method(full_report):
    assert full_report.status == "complete"
    assert [r.method for r in full_report.edof_reports] == ["svd", "cutset", "landau"]
    by_method = {r.method: r.n_edof for r in full_report.edof_reports}
    assert by_method["svd"] == 4
    assert by_method["cutset"] == pytest.approx(6.239645902918315, rel=1e-9)
    assert by_method["landau"] == pytest.approx(6.053162005542919, rel=1e-9)
    assert full_report.spectrum is not None
    assert full_report.bandwidth is not None
    assert full_report.response is not None


def test_run_diagnostics_flags(full_report):
    d = full_report.diagnostics
    assert d["adjoint_residual"]["flag"] == "pass"
    assert d["adjoint_residual"]["max_relative_residual"] <= 1e-12
    # the half-resolution probe of a 16-point grid is genuinely coarse
    assert d["convergence"]["flag"] == "drifting"
    assert d["convergence"]["coarse_grids"] == {"tx": [8, 8], "rx": [8, 8]}
    assert d["injectivity"]["flag"] == "consistent"
    assert d["injectivity"]["relative_difference"] <= 0.05
    assert d["stationarity"]["flag"] == "stationary"
    assert d["method_errors"] == {}
    assert any("landau" in w for w in d["warnings"])


def test_report_mapping_is_json_ready(full_report):
    mapping = report_mapping(full_report)
    text = json.dumps(mapping)  # must not hit numpy scalars
    assert mapping["schema_version"] == "1"
    assert mapping["status"] == "complete"
    assert len(mapping["edof"]) == 3
    assert mapping["spectrum"]["n_values"] == 256
    assert config_from_mapping(mapping["config"]) == full_report.config
    assert "generated_at" not in text


def test_run_writes_all_outputs(tmp_path):
    cfg = config_from_mapping(_scene_mapping(methods=["svd", "cutset"]))
    report = run_experiment(cfg, out_dir=str(tmp_path))
    names = sorted(p.split("/")[-1] for p in report.output_files)
    assert names == ["edof.csv", "report.json", "spectrum.csv"]
    edof_lines = (tmp_path / "edof.csv").read_text().splitlines()
    assert edof_lines[0] == "method,n_edof,gamma_mode,gamma_value"
    assert len(edof_lines) == 3
    assert edof_lines[1].startswith("svd,4,relative,0.5")
    # cutset carries no threshold: trailing columns stay empty
    assert edof_lines[2].startswith("cutset,") and edof_lines[2].endswith(",,")
    spectrum_lines = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert spectrum_lines[0] == "index,s_squared,s_squared_normalized"
    assert len(spectrum_lines) == 257
    assert spectrum_lines[1].split(",")[2] == "1"
    payload = json.loads((tmp_path / "report.json").read_text())
    assert "generated_at" in payload


def test_cutset_only_run_skips_spectrum_output(tmp_path):
    cfg = config_from_mapping(_scene_mapping(methods=["cutset"]))
    report = run_experiment(cfg, out_dir=str(tmp_path))
    assert not (tmp_path / "spectrum.csv").exists()
    assert (tmp_path / "edof.csv").exists()
    payload = json.loads((tmp_path / "report.json").read_text())
    assert payload["spectrum"] == "not-applicable"
    assert payload["wavenumber_response"] == "not-applicable"
    assert payload["diagnostics"]["adjoint_residual"]["flag"] == "not-applicable"
    assert report.status == "complete"


def test_json_only_format_filter(tmp_path):
    cfg = config_from_mapping(_scene_mapping(
        methods=["cutset"], output={"directory": "unused", "formats": ["json"]}))
    run_experiment(cfg, out_dir=str(tmp_path))
    assert not (tmp_path / "edof.csv").exists()
    assert (tmp_path / "report.json").exists()


def test_rerun_is_deterministic(tmp_path):
    cfg = config_from_mapping(_scene_mapping(methods=["svd"]))
    a, b = tmp_path / "a", tmp_path / "b"
    run_experiment(cfg, out_dir=str(a))
    run_experiment(cfg, out_dir=str(b))
    assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()
    assert (a / "edof.csv").read_bytes() == (b / "edof.csv").read_bytes()
    ja = json.loads((a / "report.json").read_text())
    jb = json.loads((b / "report.json").read_text())
    ja.pop("generated_at"), jb.pop("generated_at")
    assert ja == jb


def test_method_failure_yields_partial_status():
    # 0.05 wavelengths of separation: assembly refuses, the others still run
    cfg = config_from_mapping(_scene_mapping(distance=0.0005,
                                             methods=["svd", "cutset"]))
    report = run_experiment(cfg, write=False)
    assert report.status == "partial"
    assert [r.method for r in report.edof_reports] == ["cutset"]
    assert "svd" in report.diagnostics["method_errors"]
    assert "SingularKernelError" in report.diagnostics["method_errors"]["svd"]


def test_matrix_budget_guards_svd_runs():
    cfg = config_from_mapping(_scene_mapping(methods=["svd"]))
    with pytest.raises(ResourceError, match="budget"):
        run_experiment(cfg, write=False, max_matrix_entries=1000)
    # without svd the matrix is never built, so the budget does not apply
    cheap = config_from_mapping(_scene_mapping(methods=["cutset"]))
    report = run_experiment(cheap, write=False, max_matrix_entries=1000)
    assert report.status == "complete"


def test_distance_sweep_follows_inverse_square(tmp_path):
    cfg = config_from_mapping(_scene_mapping(grid=40, methods=["cutset"]))
    result = run_sweep(cfg, "distance", [5.0, 10.0, 20.0], out_dir=str(tmp_path))
    assert result.failures == ()
    values = {row["axis_value"]: row["n_edof"] for row in result.rows}
    assert values[5.0] / values[20.0] == pytest.approx(16.0, rel=0.05)
    assert values[10.0] == pytest.approx(6.2396118929650184, rel=1e-9)
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "axis_value,method,n_edof"
    assert len(lines) == 4


def test_single_value_sweep_matches_direct_run():
    cfg = config_from_mapping(_scene_mapping(methods=["cutset"]))
    direct = run_experiment(cfg, write=False).edof_reports[0].n_edof
    swept = run_sweep(cfg, "distance", [10.0], write=False)
    assert swept.rows[0]["n_edof"] == direct


def test_sweep_records_failed_rows(tmp_path):
    cfg = config_from_mapping(_scene_mapping(methods=["cutset"]))
    result = run_sweep(cfg, "distance", [0.0, 10.0], out_dir=str(tmp_path))
    assert len(result.failures) == 1
    assert "distance=0" in result.failures[0]
    assert result.rows[0]["n_edof"] is None
    assert result.rows[1]["n_edof"] is not None
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[1].endswith(",nan")


def test_size_and_wavelength_sweeps_shift_the_scene():
    cfg = config_from_mapping(_scene_mapping(methods=["cutset"]))
    by_size = run_sweep(cfg, "tx_size", [0.25, 0.5], write=False)
    n_small, n_base = [row["n_edof"] for row in by_size.rows]
    assert n_small == pytest.approx(n_base / 4.0, rel=0.02)
    by_wl = run_sweep(cfg, "wavelength", [0.01, 0.02], write=False)
    n1, n2 = [row["n_edof"] for row in by_wl.rows]
    assert n1 / n2 == pytest.approx(4.0, rel=0.02)


def test_scale_r_sweep_reports_svd_rows(tmp_path):
    mapping = _scene_mapping()
    mapping["tx"]["size_m"] = [0.1, 0.1]
    mapping["rx"]["size_m"] = [0.1, 0.1]
    cfg = config_from_mapping(mapping)
    result = run_sweep(cfg, "scale_r", [1.0], out_dir=str(tmp_path))
    assert [row["method"] for row in result.rows] == ["svd"]
    assert result.rows[0]["axis_value"] == 1.0
    assert result.rows[0]["n_edof"] >= 0
    assert (tmp_path / "sweep.csv").exists()


def test_scale_r_sweep_requires_relative_threshold():
    cfg = config_from_mapping(_scene_mapping(
        gamma={"mode": "absolute", "value": 1.0}))
    with pytest.raises(ConfigError, match="relative"):
        run_sweep(cfg, "scale_r", [1.0], write=False)


def test_sweep_validates_axis_and_values():
    cfg = config_from_mapping(_scene_mapping(methods=["cutset"]))
    with pytest.raises(ConfigError, match="axis"):
        run_sweep(cfg, "frequency", [1.0], write=False)
    with pytest.raises(ConfigError, match="at least one"):
        run_sweep(cfg, "distance", [], write=False)
