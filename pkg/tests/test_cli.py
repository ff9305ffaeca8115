import dataclasses
import math

import numpy as np
import pytest

from cavitycloner import cli
from cavitycloner.analytic import fidelity_unbiased
from cavitycloner.checks import CheckResult
from cavitycloner.config import AVERAGE, BiasMode, RunConfig


def read_csv(text):
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    rows = np.array([[float(value) for value in line.split(",")] for line in lines[1:]])
    return header, rows


def test_unbiased_fidelity_command_matches_closed_form():
    config = RunConfig(
        qubit=(0.6 + 0j, 0.8j), tau_max=12.0, tau_points=200
    ).validate()
    series = cli.cmd_fidelity(config)
    assert series.columns == ["tau", "fidelity"]
    header, rows = read_csv(series.convert_to_csv())
    assert np.max(np.abs(rows[:, 1] - fidelity_unbiased(rows[:, 0]))) < 1e-10


def test_biased_fidelity_command_has_reference_column():
    config = RunConfig(bias=BiasMode.parse("matched:3"), tau_points=50).validate()
    series = cli.cmd_fidelity(config)
    assert series.columns == ["tau", "fidelity", "fidelity_nobias"]


def test_photons_command_columns():
    config = RunConfig(command="photons", bias=BiasMode.parse("matched:3"), tau_points=20)
    series = cli.cmd_photons(config.validate())
    assert series.columns == ["tau", "n_right", "n_all", "n_right_nobias", "n_all_nobias"]
    assert series.value_at(0, "n_right") == pytest.approx(1.0)


def test_averaged_commands():
    config = RunConfig(
        command="avg-fidelity",
        bias=BiasMode.parse("lab:0,8"),
        qubit=AVERAGE,
        tau_max=1.0,
        tau_points=5,
        bloch_grid=(4, 4),
    ).validate()
    series = cli.cmd_avg_fidelity(config)
    assert series.columns == ["tau", "fidelity_avg", "fidelity_avg_nobias"]
    assert math.isclose(series.value_at(0, "fidelity_avg"), 1.0)
    photons = cli.cmd_avg_photons(dataclasses.replace(config, command="avg-photons"))
    assert photons.columns[1:] == [
        "n_right_avg", "n_all_avg", "n_right_avg_nobias", "n_all_avg_nobias"
    ]


def test_main_writes_csv(tmp_path):
    out = tmp_path / "fidelity.csv"
    code = cli.main(["fidelity", "--tau-points", "11", "--tau-max", "2", "--out", str(out)])
    assert code == cli.EXIT_OK
    header, rows = read_csv(out.read_text())
    assert header == ["tau", "fidelity"]
    assert rows.shape == (11, 2)


def test_main_writes_to_stdout(capsys):
    assert cli.main(["photons", "--tau-points", "3", "--alpha-re", "0", "--beta-re", "1"]) == 0
    header, rows = read_csv(capsys.readouterr().out)
    assert header == ["tau", "n_right", "n_all"]
    assert rows[0, 1] == 1.0


def test_flags_override_config_file(tmp_path, capsys):
    settings = tmp_path / "run.cfg"
    settings.write_text("tau_points = 4\ntau_max = 1\n")
    assert cli.main(["fidelity", "--config", str(settings), "--tau-points", "6"]) == 0
    _, rows = read_csv(capsys.readouterr().out)
    assert rows.shape == (6, 2)
    assert rows[-1, 0] == 1.0


def test_output_is_deterministic(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["photons", "--atoms", "2", "--bias", "matched:3", "--tau-points", "40"]
    assert cli.main(args + ["--out", str(first)]) == 0
    assert cli.main(args + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["fidelity", "--atoms", "3"],
        ["fidelity", "--bias", "sideways"],
        ["fidelity", "--alpha-re", "1", "--beta-re", "1"],
        ["fidelity", "--tau-points", "1"],
        ["avg-fidelity", "--alpha-re", "1"],
        ["preset", "fig9"],
        ["fidelity", "--unknown"],
        [],
    ],
)
def test_invalid_configuration_exits_with_one(argv, capsys):
    assert cli.main(argv) == cli.EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_list_presets(capsys):
    assert cli.main(["--list-presets"]) == 0
    out = capsys.readouterr().out
    for name in ("fig2", "fig4", "fig6b"):
        assert name in out


def test_preset_with_overrides(capsys):
    assert cli.main(["preset", "fig3b", "--tau-points", "5"]) == 0
    header, rows = read_csv(capsys.readouterr().out)
    assert header == ["tau", "n_right", "n_all", "n_right_nobias", "n_all_nobias"]
    assert rows[-1, 0] == 12.0


def test_verify_exit_codes(monkeypatch, capsys):
    passing = [CheckResult("conservation", 1e-15, 1e-9, True)]
    monkeypatch.setattr(cli, "run_checks", lambda: passing)
    assert cli.main(["verify"]) == cli.EXIT_OK
    assert capsys.readouterr().out.startswith("PASS  conservation")

    failing = passing + [CheckResult("RK5 norm drift", 1e-6, 1e-9, False)]
    monkeypatch.setattr(cli, "run_checks", lambda: failing)
    assert cli.main(["verify"]) == cli.EXIT_VERIFY
    assert "1/2 checks passed" in capsys.readouterr().out


def test_profile_dumps_stats(tmp_path, capsys):
    stats = tmp_path / "run.prof"
    assert cli.main(["fidelity", "--tau-points", "3", "--profile", str(stats)]) == 0
    assert stats.exists()
