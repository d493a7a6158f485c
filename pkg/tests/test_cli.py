"""Command-line surface: config handling, outputs, reproducibility."""

import json

import pytest

from siphsim.cli import main
from siphsim.config import ExperimentConfig, parse_config_text
from siphsim.errors import ConfigError


def test_config_defaults_and_override():
    cfg = ExperimentConfig()
    assert cfg["planner.m"] == 32
    cfg.override("planner.m", 16)
    assert cfg["planner.m"] == 16


def test_config_rejects_unknown_key():
    with pytest.raises(ConfigError, match="bogus.key"):
        parse_config_text("bogus.key = 1\n")
    cfg = ExperimentConfig()
    with pytest.raises(ConfigError):
        cfg.override("nope", 1)


def test_config_parse_types_and_comments():
    cfg = parse_config_text(
        "# comment\nplanner.m = 16\nmimo.k_values = 1 2 3\nneumann.requantize = false\n"
    )
    assert cfg["planner.m"] == 16
    assert cfg["mimo.k_values"] == [1, 2, 3]
    assert cfg["neumann.requantize"] is False


def test_config_bad_value_reports_line():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config_text("planner.m = not_a_number\n")


def test_plan_command(tmp_path):
    rc = main(["plan", "--out", str(tmp_path), "--no-plots", "--seed", "5"])
    assert rc == 0
    text = (tmp_path / "plan_channels.csv").read_text()
    assert text.startswith("# siphsim")
    assert "seed=5" in text.splitlines()[0]
    assert (tmp_path / "resolved.cfg").exists()
    assert "951.3" in (tmp_path / "plan_report.txt").read_text()


def test_perf_command_jsonl(tmp_path):
    rc = main(["perf", "--out", str(tmp_path), "--no-plots", "--format", "jsonl"])
    assert rc == 0
    lines = (tmp_path / "perf_table.csv").read_text().splitlines()
    head = json.loads(lines[0])
    assert head["tool"] == "siphsim"
    row = json.loads(lines[1])
    assert row["m"] == 8


def test_mvm_exhaustive_command(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("planner.m = 2\ndevices.l_bits = 2\nengine.exhaustive = true\nengine.fidelity = ideal\n")
    rc = main([
        "mvm", "--config", str(cfg), "--out", str(tmp_path / "o"), "--no-plots",
    ])
    assert rc == 0
    report = (tmp_path / "o" / "mvm_exhaustive.txt").read_text()
    assert "cases = 4096" in report
    assert "mismatches = 0" in report


def test_invert_command(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("neumann.m = 8\nneumann.k_max = 4\n")
    rc = main(["invert", "--config", str(cfg), "--out", str(tmp_path / "o"), "--no-plots"])
    assert rc == 0
    lines = (tmp_path / "o" / "neumann.csv").read_text().splitlines()
    assert len(lines) == 2 + 4  # header + columns + k rows


def test_mimo_command_deterministic(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(
        "mimo.trials = 3\nmimo.k_values = 1 2\nmimo.snr_db_values = 10 20\n"
    )
    rc = main(["mimo", "--config", str(cfg), "--out", str(tmp_path / "a"), "--no-plots"])
    assert rc == 0
    rc = main(["mimo", "--config", str(cfg), "--out", str(tmp_path / "b"), "--no-plots"])
    assert rc == 0
    assert (tmp_path / "a" / "mimo_sweep.csv").read_bytes() == (
        tmp_path / "b" / "mimo_sweep.csv"
    ).read_bytes()


def test_validate_command_reproducible(tmp_path):
    rc1 = main(["validate", "--out", str(tmp_path / "a"), "--seed", "11", "--no-plots"])
    rc2 = main(["validate", "--out", str(tmp_path / "b"), "--seed", "11", "--no-plots"])
    assert rc1 == 0 and rc2 == 0
    a = (tmp_path / "a" / "validation.txt").read_bytes()
    b = (tmp_path / "b" / "validation.txt").read_bytes()
    assert a == b
    assert b"FAIL" not in a


def test_unknown_config_key_exits_with_error(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nope.nope = 1\n")
    rc = main(["plan", "--config", str(bad), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "unknown configuration key" in capsys.readouterr().err


def test_plot_emission(tmp_path):
    rc = main(["plan", "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "plan_spectrum.png").stat().st_size > 0
