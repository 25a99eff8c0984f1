import logging
import os
from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

logger = logging.getLogger(__name__)

CONFIG_ENV = "VPD_CONFIG"
DEFAULT_CONFIG = "config.yaml"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RegulatorConfig(_Section):
    rel_tol: float = Field(1e-10, gt=0, lt=1)
    oracle_tol: float = Field(1e-9, gt=0, lt=1)
    depth: int = Field(200, ge=1)
    mc_samples: int = Field(200_000, ge=1)
    shards: int = Field(8, ge=1)
    seed: int = Field(42, ge=0, lt=2 ** 64)
    k_max: int = Field(4, ge=0)
    # Λ values the oracle is re-run at for the scale-invariance check
    scales: list[float] = Field(default_factory=lambda: [0.5, 2.0])

    @property
    def ks(self) -> range:
        return range(self.k_max + 1)


class IbpConfig(_Section):
    depth: int = Field(64, ge=1)


class FeynmanConfig(_Section):
    projector: Literal["simplified", "full"] = "simplified"
    gauge_parameter: Union[int, str] = 1
    workers: Optional[int] = Field(None, ge=1)


class ReportConfig(_Section):
    output: Optional[str] = None
    format: Literal["json", "text"] = "json"
    timing: bool = False


class ApiConfig(_Section):
    host: str = "127.0.0.1"
    port: int = Field(8000, ge=1, le=65535)


class WorkbenchConfig(_Section):
    regulator: RegulatorConfig = Field(default_factory=RegulatorConfig)
    ibp: IbpConfig = Field(default_factory=IbpConfig)
    feynman: FeynmanConfig = Field(default_factory=FeynmanConfig)
    report: ReportConfig = Field(default_factory=ReportConfig)
    api: ApiConfig = Field(default_factory=ApiConfig)


class ConfigLoader:
    def __init__(self, config_path: Union[str, Path, None] = None):
        load_dotenv()
        self.config_path = Path(config_path or os.getenv(CONFIG_ENV, DEFAULT_CONFIG))
        self._config = None
        self._settings = None

    @property
    def config(self) -> dict:
        if self._config is None:
            if self.config_path.exists():
                self._config = self.load_yaml_config() or {}
            else:
                logger.info("No config at %s, using defaults", self.config_path)
                self._config = {}
        return self._config

    @property
    def settings(self) -> WorkbenchConfig:
        """Validated view of the YAML; raises pydantic.ValidationError on bad values"""
        if self._settings is None:
            self._settings = WorkbenchConfig.model_validate(self.config)
        return self._settings

    def load_yaml_config(self):
        """Load configuration from YAML file"""
        if not self.config_path.exists():
            raise FileNotFoundError(f"Config file not found: {self.config_path}")

        with open(self.config_path, 'r', encoding='utf-8') as f:
            return yaml.safe_load(f)

    def save_yaml_config(self, config):
        """Save configuration to YAML file"""
        WorkbenchConfig.model_validate(config)
        with open(self.config_path, 'w', encoding='utf-8') as f:
            yaml.safe_dump(config, f, default_flow_style=False, allow_unicode=True)
        self._config = config
        self._settings = None

    def get_env(self, key, default=None):
        """Get environment variable"""
        return os.getenv(key, default)

    def update_section(self, section: str, values: dict):
        """Merge values into one config section and save"""
        if section not in WorkbenchConfig.model_fields:
            raise KeyError(f"Unknown config section: {section}")
        config = dict(self.config)
        config[section] = {**config.get(section, {}), **values}
        self.save_yaml_config(config)

    def reload_config(self):
        """Reload configuration from file"""
        self._config = None
        self._settings = None
        return self.config


# Global config instance
config_loader = ConfigLoader()
