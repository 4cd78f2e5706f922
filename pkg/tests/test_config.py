"""Tests for the layered settings: defaults, environment, config file and flags."""
from fractions import Fraction

import pytest

from src.config import PHI_MINUS_ONE, LabSettings, default_refined_alpha


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "lab.env"
    path.write_text("SEED=9\nDESK_ALPHA=1/2\nESCAPE_THRESHOLD=2.5\nBOGUS=1\n")
    return str(path)


def test_defaults():
    settings = LabSettings()
    assert settings.trials == 1000 and settings.desk_beta == 4
    assert settings.refined_alpha == default_refined_alpha(64)
    assert settings.as_dict()["out_dir"] == "outputs"


def test_default_refined_alpha_coupling():
    alpha = default_refined_alpha(64)
    assert 9 * float(alpha * 64) ** 0.5 == pytest.approx(PHI_MINUS_ONE / 4)
    assert PHI_MINUS_ONE == pytest.approx(0.158655, abs=1e-6)


def test_environment_layer(monkeypatch):
    monkeypatch.setenv("MSSLAB_SEED", "7")
    monkeypatch.setenv("MSSLAB_UNIVERSAL_ALPHA", "1/8")
    settings = LabSettings.load()
    assert settings.seed == 7
    assert settings.universal_alpha == Fraction(1, 8)


def test_file_beats_environment_and_flags_beat_file(monkeypatch, config_file, capsys):
    monkeypatch.setenv("MSSLAB_SEED", "7")
    settings = LabSettings.load(config_file)
    assert settings.seed == 9
    assert settings.desk_alpha == Fraction(1, 2)
    assert settings.escape_threshold == 2.5
    assert "Unknown config key 'BOGUS'" in capsys.readouterr().out

    assert LabSettings.load(config_file, seed=11).seed == 11
    assert LabSettings.load(config_file, seed=None).seed == 9


def test_bad_inputs(monkeypatch, tmp_path):
    with pytest.raises(ValueError):
        LabSettings.load(str(tmp_path / "missing.env"))
    monkeypatch.setenv("MSSLAB_TRIALS", "many")
    with pytest.raises(ValueError):
        LabSettings.load()
