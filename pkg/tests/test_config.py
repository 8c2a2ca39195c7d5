import pytest
import yaml

from stlc_lab.config import ConfigManager, StlcLabConfig, get_config_manager, load_config
from stlc_lab.core.errors import InputError


def test_defaults():
    config = StlcLabConfig()
    assert config.integrator.step == 1e-3
    assert config.reach.mode == "bang-bang"
    assert config.jobs == 1
    options = config.steer_options()
    assert options.segments == config.reach.segments
    assert options.step == config.integrator.step
    assert options.duration_scale == 0.99


def test_missing_file_gives_defaults(tmp_path):
    config = ConfigManager(tmp_path / "absent.yaml").load_config()
    assert config.to_dict() == StlcLabConfig().to_dict()


def test_create_and_load(tmp_path):
    path = tmp_path / "config.yaml"
    manager = ConfigManager(path)
    assert manager.create_default_config() == path
    data = yaml.safe_load(path.read_text())
    assert data["reach"]["samples"] == 2000

    data["reach"]["samples"] = 50
    data["steer"]["restarts"] = 2
    path.write_text(yaml.safe_dump(data))
    config = ConfigManager(path).load_config()
    assert config.reach.samples == 50
    assert config.steer_options().restarts == 2


def test_environment_overrides_the_file(tmp_path, monkeypatch):
    path = tmp_path / "config.yaml"
    path.write_text("jobs: 2\nintegrator:\n  step: 0.01\n")
    monkeypatch.setenv("STLC_LAB_JOBS", "6")
    config = ConfigManager(path).load_config()
    assert config.jobs == 6
    assert config.integrator.step == 0.01


def test_bad_environment_values_are_ignored(tmp_path, monkeypatch):
    monkeypatch.setenv("STLC_LAB_JOBS", "many")
    assert ConfigManager(tmp_path / "c.yaml").load_config().jobs == 1


def test_unknown_keys_are_rejected(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("reach:\n  sample_count: 10\n")
    with pytest.raises(InputError, match="reach.sample_count"):
        ConfigManager(path).load_config()


def test_sections_must_be_mappings(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("steer: 3\n")
    with pytest.raises(InputError):
        ConfigManager(path).load_config()


def test_mistyped_values_are_rejected(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("reach:\n  samples: lots\n")
    with pytest.raises(InputError, match="expects int"):
        ConfigManager(path).load_config()


def test_non_mapping_file_is_ignored(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("- 1\n- 2\n")
    assert ConfigManager(path).load_config().jobs == 1


def test_config_info(tmp_path, monkeypatch):
    monkeypatch.setenv("STLC_LAB_MODE", "uniform")
    info = ConfigManager(tmp_path / "config.yaml").get_config_info()
    assert info["config_exists"] is False
    assert info["env_overrides"] == ["STLC_LAB_MODE"]
    assert info["config"]["reach"]["mode"] == "uniform"


def test_global_manager(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("jobs: 3\n")
    assert get_config_manager(path).config_file == path
    assert load_config(path).jobs == 3
