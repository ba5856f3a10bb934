import math

import pytest

from vertexlab.config import ALL_SUITES, Settings, build_run_config, load_settings, parse_value, read_config_file
from vertexlab.errors import ConfigError


def test_settings_defaults(monkeypatch):
    for name in ("VERTEXLAB_SUITES", "VERTEXLAB_SEED", "VERTEXLAB_N_JOBS", "VERTEXLAB_OUTPUT_DIR", "VERTEXLAB_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    settings = load_settings()
    assert settings.output_dir == "reports"
    assert settings.suites == tuple(ALL_SUITES)
    assert settings.n_jobs == 1


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("VERTEXLAB_SUITES", "kronig, cs-eigen")
    monkeypatch.setenv("VERTEXLAB_SEED", "7")
    monkeypatch.setenv("VERTEXLAB_LOG_LEVEL", "debug")
    settings = load_settings()
    assert settings.suites == ("kronig", "cs-eigen")
    assert settings.seed == 7
    assert settings.log_level == "DEBUG"


@pytest.mark.parametrize("name, value", [("VERTEXLAB_SUITES", "kronig,unknown"), ("VERTEXLAB_N_JOBS", "many")])
def test_invalid_environment(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigError):
        load_settings()


def test_parse_value():
    assert parse_value("Lambda", "8") == 8
    assert parse_value("q", "0.25") == 0.25
    assert parse_value("recipe", "2,1") == "2,1"
    with pytest.raises(ConfigError):
        parse_value("Lambda", "eight")
    with pytest.raises(ConfigError):
        parse_value("colour", "red")


def test_read_config_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("# anyon run\nnu = 1.5\nN = 3  # particles\n\nrecipe = 2,1\n", encoding="utf-8")
    assert read_config_file(str(path)) == {"nu": 1.5, "N": 3, "recipe": "2,1"}


def test_read_config_file_errors(tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("nu 1.5\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        read_config_file(str(bad))
    with pytest.raises(ConfigError):
        read_config_file(str(tmp_path / "missing.conf"))


def test_build_run_config_merges_overrides():
    settings = Settings(output_dir="out", seed=3)
    run_config = build_run_config("cs-eigen", {"nu": 1.5, "N": 3}, {"N": 2, "q": None, "format": "csv"}, settings)
    assert run_config.params == {"nu": 1.5, "N": 2, "seed": 3}
    assert run_config.output == "out"
    assert run_config.format == "csv"
    assert run_config.L == pytest.approx(2 * math.pi)


@pytest.mark.parametrize(
    "overrides",
    [{"L": -1.0}, {"Lambda": -2}, {"q": 1.0}, {"beta": 0.0}, {"nu0": 0.0}, {"format": "xml"}],
)
def test_build_run_config_rejects_invalid_values(overrides):
    with pytest.raises(ConfigError):
        build_run_config("kronig", {}, overrides, Settings())


def test_build_run_config_rejects_unknown_command():
    with pytest.raises(ConfigError):
        build_run_config("check-everything", {}, {}, Settings())
