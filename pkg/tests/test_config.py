import pytest

import cavitycloner as cc
from cavitycloner import BiasKind, BiasMode, QubitState, RunConfig
from cavitycloner.config import (AVERAGE, PRESETS, load_config_file,
                                 parse_overrides, preset)


def test_bias_mode_parse():
    assert BiasMode.parse("none") == BiasMode()
    assert BiasMode.parse("matched:3") == BiasMode(BiasKind.MATCHED, 3.0)
    assert BiasMode.parse("lab:0,8") == BiasMode(BiasKind.LAB, lab=(0j, 8 + 0j))
    for text in ("matched:-1", "matched", "lab:1", "cycling:2", "none:1"):
        with pytest.raises(cc.ConfigError):
            BiasMode.parse(text)


def test_bias_mode_primed_couplings():
    q = QubitState(0, 1)
    assert BiasMode.parse("none").primed_for(q) == (0j, 0j)
    assert BiasMode.parse("matched:3").primed_for(q) == (0j, 3 + 0j)
    assert BiasMode.parse("lab:0,8").primed_for(q) == (8 + 0j, 0j)
    assert BiasMode.parse("lab:0,8").primed_for(q, "primed") == (0j, 8 + 0j)


def test_bias_mode_fixed_field():
    assert BiasMode.parse("matched:3").fixed_field("lab") == ((0j, 3 + 0j), "primed")
    assert BiasMode.parse("lab:0,8").fixed_field("lab") == ((0j, 8 + 0j), "lab")
    assert str(BiasMode.parse("matched:3")) == "matched:3"


def test_default_config_is_valid():
    config = RunConfig().validate()
    assert config.input_qubit() == QubitState(1, 0)
    taus = config.taus()
    assert len(taus) == 1000
    assert taus[0] == 0.0
    assert taus[-1] == 12.0


@pytest.mark.parametrize(
    "overrides",
    [
        {"tau_points": 1},
        {"tau_max": 0.0},
        {"n_atoms": 3},
        {"phase_grid": 1},
        {"bloch_grid": (2, 16)},
        {"bias_frame": "rotated"},
        {"qubit": (1.0, 1.0)},
        {"qubit": AVERAGE},
        {"command": "plot"},
    ],
)
def test_invalid_configs(overrides):
    with pytest.raises(cc.ConfigError):
        RunConfig().merge(overrides).validate()


def test_averaged_commands_need_the_average_qubit():
    with pytest.raises(cc.ConfigError):
        RunConfig(command="avg-fidelity").validate()
    RunConfig(command="avg-fidelity", qubit=AVERAGE).validate()
    with pytest.raises(cc.ConfigError):
        RunConfig(command="avg-fidelity", qubit=AVERAGE).merge({"alpha_re": 0.0})


def test_qubit_components_patch_the_qubit():
    config = RunConfig().merge({"alpha_re": 0.6, "beta_im": 0.8}).validate()
    assert config.input_qubit() == QubitState(0.6, 0.8j)


def test_parse_overrides():
    overrides = parse_overrides(
        {"atoms": "2", "bias": "matched:8", "tau-max": "6", "bloch_grid": "8x12", "method": "rk5"}
    )
    assert overrides == {
        "n_atoms": 2,
        "bias": BiasMode(BiasKind.MATCHED, 8.0),
        "tau_max": 6.0,
        "bloch_grid": (8, 12),
        "method": cc.Method.RK5,
    }
    assert parse_overrides({"bloch-grid": "24"}) == {"bloch_grid": (24, 24)}
    with pytest.raises(cc.ConfigError):
        parse_overrides({"colour": "red"})
    with pytest.raises(cc.ConfigError):
        parse_overrides({"atoms": "two"})
    with pytest.raises(cc.ConfigError):
        parse_overrides({"method": "euler"})


def test_load_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# two atoms\natoms = 2\n\nbias=matched:3  # cycling field\nout=f.csv\n")
    assert load_config_file(path) == {
        "n_atoms": 2,
        "bias": BiasMode(BiasKind.MATCHED, 3.0),
        "output_path": "f.csv",
    }


def test_load_config_file_errors(tmp_path):
    with pytest.raises(cc.ConfigError):
        load_config_file(tmp_path / "missing.cfg")
    path = tmp_path / "broken.cfg"
    path.write_text("atoms 2\n")
    with pytest.raises(cc.ConfigError):
        load_config_file(path)


def test_presets_are_valid():
    assert set(PRESETS) == {
        "fig2", "fig3a", "fig3b", "fig3c", "fig4", "fig5a", "fig5b", "fig6a", "fig6b"
    }
    for config in PRESETS.values():
        config.validate()
    assert preset("fig4").n_atoms == 2
    assert preset("fig6a").bias == BiasMode(BiasKind.LAB, lab=(0j, 8 + 0j))
    assert preset("fig6b").command == "avg-photons"
    with pytest.raises(cc.ConfigError):
        preset("fig7")
