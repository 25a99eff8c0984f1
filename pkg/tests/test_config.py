from pathlib import Path

import pytest
import yaml
from pydantic import ValidationError

from config.config_loader import CONFIG_ENV, ConfigLoader, WorkbenchConfig

ROOT = Path(__file__).resolve().parent.parent


def test_shipped_config_documents_the_defaults():
    assert ConfigLoader(ROOT / "config.yaml").settings == WorkbenchConfig()


def test_missing_file_falls_back_to_defaults(tmp_path):
    loader = ConfigLoader(tmp_path / "absent.yaml")
    assert loader.config == {}
    assert loader.settings == WorkbenchConfig()
    with pytest.raises(FileNotFoundError):
        loader.load_yaml_config()


def test_values_from_file(loader):
    settings = loader.settings
    assert settings.regulator.seed == 7
    assert settings.regulator.mc_samples == 20000
    assert settings.regulator.depth == 200
    assert list(settings.regulator.ks) == [0, 1, 2, 3, 4]


def test_config_path_from_environment(monkeypatch, config_file):
    monkeypatch.setenv(CONFIG_ENV, str(config_file))
    assert ConfigLoader().config_path == config_file


@pytest.mark.parametrize("section, values", [
    ("regulator", {"rel_tol": 0}),
    ("regulator", {"mc_samples": -5}),
    ("regulator", {"seed": 2 ** 64}),
    ("feynman", {"projector": "partial"}),
    ("report", {"format": "xml"}),
    ("regulator", {"tolerance": 1e-8}),
])
def test_invalid_values_are_rejected(section, values):
    with pytest.raises(ValidationError):
        WorkbenchConfig.model_validate({section: values})


def test_update_section_saves_and_revalidates(loader, config_file):
    loader.update_section("regulator", {"seed": 11})
    assert loader.settings.regulator.seed == 11
    assert loader.settings.regulator.mc_samples == 20000
    assert yaml.safe_load(config_file.read_text(encoding="utf-8"))["regulator"]["seed"] == 11


def test_update_section_rejects_bad_input(loader, config_file):
    before = config_file.read_text(encoding="utf-8")
    with pytest.raises(KeyError):
        loader.update_section("scheduler", {"interval": 5})
    with pytest.raises(ValidationError):
        loader.update_section("regulator", {"shards": 0})
    assert config_file.read_text(encoding="utf-8") == before


def test_reload_picks_up_edits(loader, config_file):
    assert loader.settings.regulator.seed == 7
    config_file.write_text("regulator:\n  seed: 99\n", encoding="utf-8")
    loader.reload_config()
    assert loader.settings.regulator.seed == 99
