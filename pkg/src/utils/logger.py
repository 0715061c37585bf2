import os
import sys
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Optional, Tuple

from loguru import logger

LOG_LEVEL_ENV = "DRIFTGUARD_LOG"
DEFAULT_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} | {message}"

# one rotating file per level, each under its own sub-directory of log_dir
FILE_SINK_LEVELS: Tuple[str, ...] = ("DEBUG", "INFO", "ERROR")


@dataclass
class LoggerConfig:
    console_level: Optional[str] = None
    log_dir: Optional[str] = None
    log_format: str = DEFAULT_FORMAT
    rotation: str = "10 MB"
    retention: str = "7 days"
    compression: str = "zip"

    def __post_init__(self):
        # DRIFTGUARD_LOG wins over whatever the caller passes
        self.console_level = (os.environ.get(LOG_LEVEL_ENV) or self.console_level or "INFO").upper()

    @property
    def log_path(self) -> Optional[Path]:
        return Path(self.log_dir) if self.log_dir else None

    @classmethod
    def from_settings(cls, settings) -> 'LoggerConfig':
        """Build from the `logging` section of a ConfigManager."""
        return cls(
            console_level=settings.get("logging.console_level"),
            log_dir=settings.get("logging.log_dir"),
            rotation=settings.get("logging.rotation", "10 MB"),
            retention=settings.get("logging.retention", "7 days"),
        )


class PipelineLogger:
    """
    Process-wide loguru setup for driftguard.
    Console output goes to stderr because stdout carries alarm records.
    File sinks with rotation are added only when a log directory is configured.
    """
    _instance: Optional['PipelineLogger'] = None
    _logger = None

    def __new__(cls, config: Optional[LoggerConfig] = None):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self, config: Optional[LoggerConfig] = None):
        if self._logger is None:
            self.config = config or LoggerConfig()
            self._configure()

    def _configure(self) -> None:
        logger.remove()
        logger.add(sys.stderr, format=self.config.log_format, level=self.config.console_level, colorize=False)
        if self.config.log_path is not None:
            self._add_file_sinks(self.config.log_path)
        type(self)._logger = logger

    def _add_file_sinks(self, log_path: Path) -> None:
        stamp = datetime.now().strftime('%Y-%m-%d_%H-%M-%S')
        for level in FILE_SINK_LEVELS:
            sink_dir = log_path / level.lower()
            sink_dir.mkdir(parents=True, exist_ok=True)
            logger.add(
                sink_dir / f"{level.lower()}_driftguard_{stamp}.log",
                format=self.config.log_format,
                level=level,
                rotation=self.config.rotation,
                retention=self.config.retention,
                compression=self.config.compression,
            )

    def get_logger(self):
        return self._logger

    @classmethod
    def reset(cls) -> None:
        cls._instance = None
        cls._logger = None


def get_logger(config: Optional[LoggerConfig] = None):
    return PipelineLogger(config=config).get_logger()
