import time
from abc import ABC, abstractmethod
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator, Optional


@dataclass
class StageOutcome:
    success: bool = True


class BaseComponent(ABC):
    """
    Abstract base class for driftguard components (ingestion, experiments).
    Logger and configuration are injected; work is bracketed by stage().
    """
    def __init__(self, logger, config_manager):
        self.logger = logger
        self.config_manager = config_manager
        self._validate_dependencies()

    def _validate_dependencies(self) -> None:
        if self.logger is None:
            raise ValueError("Logger cannot be None")
        if self.config_manager is None:
            raise ValueError("Config manager cannot be None")

    @abstractmethod
    def execute(self, *args, **kwargs) -> Any:
        pass

    def get_config(self, key_path: str, default: Any = None) -> Any:
        return self.config_manager.get(key_path, default)

    def validate_path(self, path: str, must_exist: bool = False) -> Path:
        path_obj = Path(path)
        if must_exist and not path_obj.is_file():
            raise FileNotFoundError(f"Input file does not exist: {path}")
        return path_obj

    def create_directory(self, path: str) -> Path:
        path_obj = Path(path)
        path_obj.mkdir(parents=True, exist_ok=True)
        return path_obj

    def log_execution_start(self, component_name: str) -> None:
        self.logger.info(f"{'='*60}")
        self.logger.info(f"Starting: {component_name}")
        self.logger.info(f"{'='*60}")

    def log_execution_end(self, component_name: str, success: bool = True, elapsed: Optional[float] = None) -> None:
        status = "✓ COMPLETED" if success else "✗ FAILED"
        timing = f" in {elapsed:.2f}s" if elapsed is not None else ""
        self.logger.info(f"{'='*60}")
        self.logger.info(f"{status}: {component_name}{timing}")
        self.logger.info(f"{'='*60}")

    @contextmanager
    def stage(self, component_name: str) -> Iterator[StageOutcome]:
        """Start/end banners around a block; set outcome.success = False to report a failed run."""
        outcome = StageOutcome()
        self.log_execution_start(component_name)
        started = time.perf_counter()
        try:
            yield outcome
        except Exception as e:
            outcome.success = False
            self.logger.error(f"Error during {component_name}: {e}")
            raise
        finally:
            self.log_execution_end(component_name, outcome.success, time.perf_counter() - started)


class ExperimentComponent(BaseComponent):
    """Base class for Monte Carlo experiments that write reports under reports.dir."""

    def get_report_dir(self, config_key: str = "reports.dir") -> Path:
        return self.create_directory(self.get_config(config_key, "reports"))

    def report_path(self, path: Optional[str]) -> Optional[Path]:
        """Bare file names land in the report directory; anything with a directory part is kept as given."""
        if path is None:
            return None
        path = Path(path)
        return path if path.is_absolute() or path.parent != Path(".") else self.get_report_dir() / path
