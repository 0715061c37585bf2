import csv
import json
import sys
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, TextIO

import numpy as np

from src.utils.base import BaseComponent
from src.utils.errors import ConfigError


@dataclass(frozen=True)
class Record:
    """One input line: parsed values, or the reason it could not be parsed."""
    line: int
    values: Optional[np.ndarray] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def parse_columns(spec: Optional[str]) -> Optional[List[str]]:
    if spec is None or not spec.strip():
        return None
    return [part.strip() for part in spec.split(",") if part.strip()]


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def _as_indices(columns: Sequence[str]) -> Optional[List[int]]:
    if all(col.isdigit() for col in columns):
        return [int(col) for col in columns]
    return None


class RecordSource(ABC):
    def __init__(self, columns: Optional[Sequence[str]] = None):
        self.columns = list(columns) if columns else None

    @abstractmethod
    def records(self, handle: TextIO) -> Iterator[Record]:
        pass


class CSVRecordSource(RecordSource):
    """
    Comma-separated rows, one observation per row. The first row is a header
    when columns are selected by name or when any selected field is not numeric.
    """
    def records(self, handle: TextIO) -> Iterator[Record]:
        reader = csv.reader(handle)
        selected: Optional[List[int]] = None
        first = True
        for row in reader:
            line = reader.line_num
            if not row or all(not field.strip() for field in row):
                continue
            if first:
                first = False
                if self._is_header(row):
                    selected = self._resolve_names(row)
                    continue
                selected = self._resolve_indices(len(row))
            yield self._parse(line, row, selected)

    def _is_header(self, row: List[str]) -> bool:
        if self.columns and _as_indices(self.columns) is None:
            return True
        positions = _as_indices(self.columns) if self.columns else range(len(row))
        return any(not _is_number(row[i]) for i in positions if i < len(row))

    def _resolve_names(self, header: List[str]) -> List[int]:
        names = [name.strip() for name in header]
        if not self.columns:
            return list(range(len(names)))
        indices = _as_indices(self.columns)
        if indices is not None:
            return self._check_range(indices, len(names))
        missing = [col for col in self.columns if col not in names]
        if missing:
            raise ConfigError(f"Columns not found in header {names}: {missing}")
        return [names.index(col) for col in self.columns]

    def _resolve_indices(self, width: int) -> List[int]:
        if not self.columns:
            return list(range(width))
        return self._check_range(_as_indices(self.columns), width)

    @staticmethod
    def _check_range(indices: List[int], width: int) -> List[int]:
        missing = [i for i in indices if i >= width]
        if missing:
            raise ConfigError(f"Column indices {missing} out of range for {width} columns")
        return indices

    @staticmethod
    def _parse(line: int, row: List[str], selected: List[int]) -> Record:
        if max(selected) >= len(row):
            return Record(line, error=f"expected at least {max(selected) + 1} fields, got {len(row)}")
        try:
            return Record(line, np.array([float(row[i]) for i in selected]))
        except ValueError:
            return Record(line, error=f"non-numeric field in {row}")


class JSONLRecordSource(RecordSource):
    """One JSON object per line with the observation under "x" (a number or a list of numbers)."""
    def records(self, handle: TextIO) -> Iterator[Record]:
        indices = _as_indices(self.columns) if self.columns else None
        if self.columns and indices is None:
            raise ConfigError("JSON Lines columns must be integer positions within x")
        for line, text in enumerate(handle, 1):
            if not text.strip():
                continue
            yield self._parse(line, text, indices)

    @staticmethod
    def _parse(line: int, text: str, indices: Optional[List[int]]) -> Record:
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            return Record(line, error=f"invalid JSON ({e.msg})")
        if not isinstance(payload, dict) or "x" not in payload:
            return Record(line, error='record has no "x" field')
        raw = payload["x"] if isinstance(payload["x"], list) else [payload["x"]]
        if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw):
            return Record(line, error=f"non-numeric entry in x: {raw}")
        if indices is not None:
            if max(indices) >= len(raw):
                return Record(line, error=f"x has {len(raw)} entries, column {max(indices)} requested")
            raw = [raw[i] for i in indices]
        return Record(line, np.array(raw, dtype=np.float64))


class RecordSourceFactory:
    SOURCES = {
        'csv': CSVRecordSource,
        'jsonl': JSONLRecordSource,
        'ndjson': JSONLRecordSource,
    }
    SUFFIXES = {'.csv': 'csv', '.jsonl': 'jsonl', '.ndjson': 'jsonl'}

    @staticmethod
    def create(source_format: str, columns: Optional[Sequence[str]] = None) -> RecordSource:
        source_format = source_format.lower()
        if source_format not in RecordSourceFactory.SOURCES:
            raise ConfigError(f"Unsupported input format: {source_format}")
        return RecordSourceFactory.SOURCES[source_format](columns)

    @staticmethod
    def format_for_path(file_path: Optional[str]) -> Optional[str]:
        """Input format implied by the file suffix; None for stdin or an unknown suffix."""
        if file_path is None or file_path == "-":
            return None
        return RecordSourceFactory.SUFFIXES.get(Path(file_path).suffix.lower())


class ObservationIngestion(BaseComponent):
    """Opens the input (file or stdin) and streams records one at a time."""
    def __init__(self, logger, config_manager):
        super().__init__(logger, config_manager)

    def open_input(self, source_path: Optional[str]) -> TextIO:
        if source_path is None or source_path == "-":
            self.logger.info("Reading observations from standard input")
            return sys.stdin
        path = self.validate_path(source_path, must_exist=True)
        self.logger.info(f"Reading observations from {path}")
        return open(path, "r", newline="")

    def execute(
        self,
        handle: TextIO,
        source_format: Optional[str] = None,
        columns: Optional[Sequence[str]] = None,
    ) -> Iterator[Record]:
        source_format = source_format or self.get_config("ingestion.format", "csv")
        source = RecordSourceFactory.create(source_format, columns)
        self.logger.info(f"Streaming records using {source.__class__.__name__}...")
        return source.records(handle)
