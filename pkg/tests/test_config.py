import json
from pathlib import Path

import pytest

from src.utils.config import ConfigManager
from src.utils.errors import ConfigError
from src.utils.logger import LOG_LEVEL_ENV, LoggerConfig, PipelineLogger, get_logger


@pytest.fixture
def yaml_config(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("detector:\n  threshold: 12.5\n  procedure: musuc\npredictor:\n  window:\n")
    return path


def test_dotted_lookup(yaml_config):
    config = ConfigManager(str(yaml_config))
    assert config.get("detector.threshold") == 12.5
    assert config.get("detector.procedure") == "musuc"
    assert config.get("detector.missing", 3) == 3
    assert config.get("detector.threshold.deeper", "x") == "x"


def test_null_values_fall_back_to_default(yaml_config):
    assert ConfigManager(str(yaml_config)).get("predictor.window", 7) == 7


def test_singleton_until_reset(yaml_config, tmp_path):
    first = ConfigManager(str(yaml_config))
    assert ConfigManager() is first
    ConfigManager.reset()
    other = tmp_path / "other.json"
    other.write_text(json.dumps({"detector": {"threshold": 3}}))
    assert ConfigManager(str(other)).get("detector.threshold") == 3


def test_empty_manager_serves_defaults():
    assert ConfigManager().get("anything.at.all", "default") == "default"


def test_reload(yaml_config):
    config = ConfigManager(str(yaml_config))
    yaml_config.write_text("detector:\n  threshold: 99\n")
    config.reload()
    assert config.get("detector.threshold") == 99


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        ConfigManager(str(tmp_path / "nope.yaml"))


def test_unsupported_extension(tmp_path):
    path = tmp_path / "settings.toml"
    path.write_text("")
    with pytest.raises(ValueError):
        ConfigManager(str(path))


def test_log_level_from_environment(monkeypatch):
    monkeypatch.setenv(LOG_LEVEL_ENV, "debug")
    assert LoggerConfig(console_level="ERROR").console_level == "DEBUG"
    monkeypatch.delenv(LOG_LEVEL_ENV)
    assert LoggerConfig(console_level="warning").console_level == "WARNING"
    assert LoggerConfig().console_level == "INFO"


def test_logger_is_shared(tmp_path):
    first = get_logger(LoggerConfig(log_dir=str(tmp_path / "logs")))
    assert get_logger() is first
    assert (tmp_path / "logs" / "error").is_dir()
    PipelineLogger.reset()
    assert get_logger() is not None


def test_console_sink_is_stderr(capsys, monkeypatch):
    monkeypatch.setenv(LOG_LEVEL_ENV, "INFO")
    get_logger().info("to stderr")
    captured = capsys.readouterr()
    assert "to stderr" in captured.err
    assert captured.out == ""


def test_typed_getters(tmp_path):
    path = tmp_path / "typed.yaml"
    path.write_text("validity:\n  trials: 500\n  epsilon: 0.02\n  label: abc\n  half: 2.5\n  flag: true\n")
    config = ConfigManager(str(path))
    assert config.get_int("validity.trials") == 500
    assert config.get_float("validity.trials") == 500.0
    assert config.get_float("validity.epsilon") == 0.02
    assert config.get_int("validity.missing", None) is None
    for key, getter in [("validity.label", config.get_float), ("validity.half", config.get_int),
                        ("validity.flag", config.get_int), ("validity.missing", config.get_int)]:
        with pytest.raises(ConfigError):
            getter(key)


def test_top_level_must_be_a_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        ConfigManager(str(path))


def test_logger_config_from_settings(tmp_path, monkeypatch):
    monkeypatch.delenv(LOG_LEVEL_ENV, raising=False)
    path = tmp_path / "logging.yaml"
    path.write_text(f"logging:\n  console_level: warning\n  log_dir: {tmp_path / 'logs'}\n  retention: 1 day\n")
    config = LoggerConfig.from_settings(ConfigManager(str(path)))
    assert config.console_level == "WARNING"
    assert config.log_path == tmp_path / "logs"
    assert (config.rotation, config.retention) == ("10 MB", "1 day")


def test_shipped_config_matches_acceptance_settings():
    config = ConfigManager(str(Path(__file__).resolve().parent.parent / "configs" / "driftguard.yaml"))
    assert config.get_int("mean_check.trials") == 2000
    assert config.get("mean_check.checkpoints") == [2, 10, 50]
    assert config.get_int("validity.trials") == 500
    assert config.get_float("detector.threshold") == 20.0
