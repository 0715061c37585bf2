import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.utils.config import ConfigManager
from src.utils.logger import PipelineLogger, get_logger


@pytest.fixture(autouse=True)
def fresh_singletons():
    ConfigManager.reset()
    PipelineLogger.reset()
    yield
    ConfigManager.reset()
    PipelineLogger.reset()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def logger():
    return get_logger()


@pytest.fixture
def config_manager():
    return ConfigManager()


@pytest.fixture
def write_lines(tmp_path):
    def _write(lines, name="stream.csv"):
        path = tmp_path / name
        path.write_text("".join(f"{line}\n" for line in lines))
        return path
    return _write
