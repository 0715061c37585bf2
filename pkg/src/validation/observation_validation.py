import numpy as np
from typing import List, Optional
from abc import ABC, abstractmethod

from src.utils.errors import DomainError


class ValidationRule(ABC):
    @abstractmethod
    def apply(self, values: np.ndarray) -> Optional[str]:
        """Return a failure reason, or None when the observation passes."""
        pass


class NonEmptyRule(ValidationRule):
    def apply(self, values: np.ndarray) -> Optional[str]:
        if values.size == 0:
            return "observation has no values"
        return None


class FiniteValuesRule(ValidationRule):
    def apply(self, values: np.ndarray) -> Optional[str]:
        if not np.all(np.isfinite(values)):
            return f"non-finite value in observation {values.tolist()}"
        return None


class DimensionRule(ValidationRule):
    def __init__(self, expected: int):
        self.expected = expected

    def apply(self, values: np.ndarray) -> Optional[str]:
        if values.shape[0] != self.expected:
            return f"dimension {values.shape[0]} does not match stream dimension {self.expected}"
        return None


class ObservationValidator:
    """Rule chain applied to every observation before it reaches a predictor."""
    def __init__(self):
        self.rules: List[ValidationRule] = []

    def add_rule(self, rule: ValidationRule) -> 'ObservationValidator':
        self.rules.append(rule)
        return self

    def failures(self, values: np.ndarray) -> List[str]:
        return [reason for rule in self.rules if (reason := rule.apply(values)) is not None]

    def validate(self, values: np.ndarray) -> np.ndarray:
        failures = self.failures(values)
        if failures:
            raise DomainError("; ".join(failures))
        return values

    @classmethod
    def default(cls, dim: Optional[int] = None) -> 'ObservationValidator':
        validator = cls().add_rule(NonEmptyRule()).add_rule(FiniteValuesRule())
        if dim is not None:
            validator.add_rule(DimensionRule(dim))
        return validator
