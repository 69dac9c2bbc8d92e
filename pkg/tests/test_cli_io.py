import json
import math
import subprocess
import sys

import numpy as np
import pytest

from feynman_index.cli import OUT_ENV, main
from feynman_index.config import load_config, parse_config
from feynman_index.errors import ErrorCode, OperationError
from feynman_index.report import Check, Report, dumps, emit_csv
from feynman_index.suite import run


# --- configuration -----------------------------------------------------------


@pytest.mark.parametrize(
    "command,data,field",
    [
        ("dist-check", {"betas": ["abc"]}, "betas[0]"),
        ("eta", {"K": -3}, "K"),
        ("eta", {"flux": 0.2, "unknown": 1}, "unknown"),
        ("index", {"start": 0.3}, "end"),
        ("propagator-check", {"refinements": [100, 150, 300]}, "refinements"),
        ("hadamard", {"n": 3, "points": [[0.1, 0.2]]}, "<root>"),
        ("full-suite", {"criteria": [0, 12]}, "criteria"),
    ],
)
def test_invalid_config_names_the_field(command, data, field):
    with pytest.raises(OperationError) as info:
        parse_config(data, command)
    assert info.value.code is ErrorCode.CONFIG_INVALID
    assert field in str(info.value)


def test_config_command_must_match_request():
    with pytest.raises(OperationError) as info:
        parse_config({"command": "eta"}, "index")
    assert info.value.code is ErrorCode.CONFIG_INVALID


def test_config_accepts_complex_and_decimal_strings():
    cfg = parse_config({"flux": {"re": 0.3, "im": 0.2}, "ray_angle": "3.0"}, "eta")
    assert cfg.payload.flux == 0.3 + 0.2j and cfg.payload.ray_angle == 3.0
    assert parse_config({"flux": "0.1"}, "eta").payload.flux == 0.1


def test_unreadable_and_malformed_files_are_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    for path in (bad, tmp_path / "missing.json"):
        with pytest.raises(OperationError) as info:
            load_config(path, "eta")
        assert info.value.code is ErrorCode.CONFIG_INVALID


def test_seed_must_fit_in_64_bits():
    with pytest.raises(OperationError):
        parse_config({"seed": 2**64}, "full-suite")


# --- serialisation -----------------------------------------------------------


def test_empty_series_gives_header_only_csv(tmp_path):
    path = emit_csv([], tmp_path / "empty.csv", ["a", "b"])
    assert path.read_text() == "a,b\n"
    assert emit_csv([], tmp_path / "bare.csv").read_text() == "\n"


def test_single_row_csv_splits_complex_values(tmp_path):
    path = emit_csv([{"x": 1 + 2j, "k": 3}], tmp_path / "one.csv")
    lines = path.read_text().splitlines()
    assert lines == ["k,x_im,x_re", "3,2,1"]


def test_json_encoding_is_deterministic_and_lossless():
    text = dumps({"b": 0.1, "a": [1.0, complex(2, -1)], "c": math.nan, "d": np.float64(1e-300)})
    data = json.loads(text)
    assert list(data) == ["a", "b", "c", "d"]
    assert data["b"] == 0.1 and data["a"][1] == {"im": -1.0, "re": 2.0}
    assert data["c"] == "NaN" and data["d"] == 1e-300


def test_check_defaults_to_absolute_deviation():
    c = Check("x", 1.0005, 1.0, 1e-3, "closed_form")
    assert c.passed and abs(c.deviation - 5e-4) < 1e-15
    failed = Check.failure("y", OperationError(ErrorCode.POLE_AT_BETA, "pole"))
    assert not failed.passed and failed.error.startswith("POLE_AT_BETA")


def test_reports_are_byte_identical_across_runs():
    cfg = parse_config({"flux": 0.25, "K": 60, "methods": ["zeta", "heat_fit"]}, "eta", seed=3)
    first = run(cfg, {}).to_json()
    second = run(cfg, {}).to_json()
    assert first == second
    assert json.loads(first)["schema"] == "feynman-index-report/1"


def test_report_summary_counts_failures():
    rep = Report("eta", {}, 0, [Check("ok", 1.0, 1.0, 0.1, "closed_form"), Check("bad", 2.0, 1.0, 0.1, "closed_form")])
    assert not rep.passed and [c.name for c in rep.failures()] == ["bad"]


# --- command line ------------------------------------------------------------


def test_cli_eta_passes_and_writes_outputs(tmp_path, capsys):
    config = tmp_path / "eta.json"
    config.write_text(json.dumps({"flux": 0.25, "K": 100}), encoding="utf-8")
    code = main(["eta", "--config", str(config), "--out", str(tmp_path / "o")])
    assert code == 0
    for name in ("report.json", "checks.csv", "timing.json"):
        assert (tmp_path / "o" / name).exists()
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["failed"] == 0 and summary["command"] == "eta"


def test_cli_reports_a_failed_check(tmp_path):
    config = tmp_path / "eta.json"
    config.write_text(json.dumps({"flux": 0.25, "K": 100, "reference": 0.9}), encoding="utf-8")
    assert main(["eta", "--config", str(config), "--out", str(tmp_path), "--quiet"]) == 1


def test_cli_rejects_invalid_config(tmp_path, capsys):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"betas": ["abc"]}), encoding="utf-8")
    assert main(["dist-check", "--config", str(config), "--out", str(tmp_path)]) == 2
    assert "betas[0]" in capsys.readouterr().err
    assert not (tmp_path / "report.json").exists()


def test_environment_variable_sets_output_directory(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    config = tmp_path / "h.json"
    config.write_text(json.dumps({"k_max": 2}), encoding="utf-8")
    assert main(["hadamard", "--config", str(config), "--quiet"]) == 0
    assert (tmp_path / "env" / "report.json").exists()
    # an explicit --out wins over the environment
    assert main(["hadamard", "--config", str(config), "--quiet", "--out", str(tmp_path / "cli")]) == 0
    assert (tmp_path / "cli" / "report.json").exists()


def test_console_script_module_runs(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "feynman_index.cli", "propagator-check", "--out", str(tmp_path), "--quiet"],
        capture_output=True, text=True, timeout=300,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout.strip())["failed"] == 0
