from typing import Optional


class DriftGuardError(Exception):
    """Base class for driftguard errors."""


class DomainError(DriftGuardError, ValueError):
    """A value violates a numeric contract (non-finite observation, negative e-value, ...)."""


class ConfigError(DriftGuardError, ValueError):
    """A parameter is outside its admissible range."""


class MalformedRecordError(DomainError):
    def __init__(self, line: int, reason: str, raw: Optional[str] = None):
        self.line = line
        self.reason = reason
        self.raw = raw
        super().__init__(f"line {line}: {reason}")
