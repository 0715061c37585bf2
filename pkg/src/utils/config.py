import json
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from src.utils.errors import ConfigError


class ConfigLoader(ABC):
    @abstractmethod
    def load(self, path: Path) -> Dict[str, Any]:
        pass


class YAMLConfigLoader(ConfigLoader):
    def load(self, path: Path) -> Dict[str, Any]:
        with open(path, 'r') as f:
            return yaml.safe_load(f) or {}


class JSONConfigLoader(ConfigLoader):
    def load(self, path: Path) -> Dict[str, Any]:
        with open(path, 'r') as f:
            return json.load(f)


LOADERS: Dict[str, ConfigLoader] = {
    '.yaml': YAMLConfigLoader(),
    '.yml': YAMLConfigLoader(),
    '.json': JSONConfigLoader(),
}

_MISSING = object()


class ConfigManager:
    """
    Configuration Manager with Singleton pattern.

    Holds the driftguard defaults (predictor, detector, experiments, logging).
    Constructed without a path it serves an empty config, so every lookup
    falls through to the caller's default. Keys are dotted paths such as
    "detector.threshold"; a key present with a null value counts as absent.
    """
    _instance: Optional['ConfigManager'] = None
    _config: Dict[str, Any] = {}

    def __new__(cls, config_path: Optional[str] = None):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self, config_path: Optional[str] = None):
        if config_path and not self._config:
            self.config_path = Path(config_path)
            if not self.config_path.exists():
                raise FileNotFoundError(f"Config file not found: {self.config_path}")
            self._loader = self._get_loader()
            self._config = self._load_config()

    def _get_loader(self) -> ConfigLoader:
        extension = self.config_path.suffix.lower()
        if extension not in LOADERS:
            raise ConfigError(f"Unsupported config file format: {extension}")
        return LOADERS[extension]

    def _load_config(self) -> Dict[str, Any]:
        config = self._loader.load(self.config_path)
        if not isinstance(config, dict):
            raise ConfigError(f"Config file {self.config_path} must hold a mapping at the top level")
        return config

    @property
    def config(self) -> Dict[str, Any]:
        return self._config

    def get(self, key_path: str, default: Any = None) -> Any:
        value = self._config
        for key in key_path.split('.'):
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default
        return default if value is None else value

    def get_int(self, key_path: str, default: Any = _MISSING) -> Optional[int]:
        return self._typed(key_path, default, int)

    def get_float(self, key_path: str, default: Any = _MISSING) -> Optional[float]:
        return self._typed(key_path, default, float)

    def _typed(self, key_path: str, default: Any, kind: type) -> Any:
        value = self.get(key_path)
        if value is None:
            if default is _MISSING:
                raise ConfigError(f"Missing required config value: {key_path}")
            return default
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"Config value {key_path} must be a number, got {value!r}")
        if kind is int and value != int(value):
            raise ConfigError(f"Config value {key_path} must be an integer, got {value!r}")
        return kind(value)

    def reload(self) -> None:
        self._config = self._load_config()

    @classmethod
    def reset(cls) -> None:
        cls._instance = None
        cls._config = {}
