import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Mapping, Optional

import numpy as np

from src.utils.errors import ConfigError


class DistributionKind(str, Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"
    CONSTANT = "constant"
    DRIFT = "drift"


DEFAULT_PARAMS: Dict[DistributionKind, Dict[str, float]] = {
    DistributionKind.GAUSSIAN: {"mean": 0.0, "scale": 1.0},
    DistributionKind.UNIFORM: {"low": 0.0, "high": 1.0},
    DistributionKind.CONSTANT: {"value": 0.0},
    DistributionKind.DRIFT: {"mean": 0.0, "slope": 0.01, "scale": 1.0},
}


@dataclass(frozen=True)
class DistributionSpec:
    """
    Marginal law of one observation (every coordinate drawn the same way).
    drift is Gaussian around mean + slope * t, with t counted from the start
    of the segment, so a drifting segment is not exchangeable.
    """
    kind: DistributionKind
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        try:
            kind = DistributionKind(self.kind)
        except ValueError as e:
            raise ConfigError(f"Unsupported distribution: {self.kind}") from e
        defaults = DEFAULT_PARAMS[kind]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ConfigError(f"Unknown parameters for {kind.value}: {sorted(unknown)}")
        params = {**defaults, **{key: float(value) for key, value in self.params.items()}}
        if not all(math.isfinite(value) for value in params.values()):
            raise ConfigError(f"Distribution parameters must be finite: {params}")
        if params.get("scale", 1.0) <= 0:
            raise ConfigError(f"scale must be > 0, got {params['scale']}")
        if kind is DistributionKind.UNIFORM and params["high"] <= params["low"]:
            raise ConfigError(f"uniform needs low < high, got {params}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", params)

    @classmethod
    def parse(cls, text: str) -> 'DistributionSpec':
        """Parse 'kind' or 'kind:key=value,key=value', e.g. 'gaussian:mean=0,scale=1'."""
        kind, _, rest = text.strip().partition(":")
        params = {}
        for item in filter(None, (part.strip() for part in rest.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"Malformed distribution parameter '{item}' in '{text}'")
            try:
                params[key.strip()] = float(value)
            except ValueError as e:
                raise ConfigError(f"Parameter {key.strip()} is not a number in '{text}'") from e
        return cls(kind.strip().lower(), params)

    def sample(self, rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
        p = self.params
        if self.kind is DistributionKind.GAUSSIAN:
            return rng.normal(p["mean"], p["scale"], size=(count, dim))
        if self.kind is DistributionKind.UNIFORM:
            return rng.uniform(p["low"], p["high"], size=(count, dim))
        if self.kind is DistributionKind.CONSTANT:
            return np.full((count, dim), p["value"])
        trend = p["mean"] + p["slope"] * np.arange(count)
        return trend[:, None] + rng.normal(0.0, p["scale"], size=(count, dim))

    def describe(self) -> str:
        return f"{self.kind.value}:" + ",".join(f"{key}={value:g}" for key, value in self.params.items())


@dataclass(frozen=True)
class ScenarioSpec:
    pre_change: DistributionSpec
    n: int
    seed: int = 0
    change_at: Optional[int] = None
    post_change: Optional[DistributionSpec] = None
    dim: int = 1

    def __post_init__(self):
        if self.n < 0:
            raise ConfigError(f"horizon n must be >= 0, got {self.n}")
        if self.dim < 1:
            raise ConfigError(f"dim must be >= 1, got {self.dim}")
        if (self.change_at is None) != (self.post_change is None):
            raise ConfigError("change_at and post_change must be given together")
        if self.change_at is not None and not 1 <= self.change_at <= self.n:
            raise ConfigError(f"change_at must lie in [1, {self.n}], got {self.change_at}")

    @property
    def has_change(self) -> bool:
        return self.change_at is not None

    def with_seed(self, seed: int) -> 'ScenarioSpec':
        return replace(self, seed=seed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pre_change": self.pre_change.describe(),
            "change_at": self.change_at,
            "post_change": self.post_change.describe() if self.post_change else None,
            "n": self.n,
            "dim": self.dim,
            "seed": self.seed,
        }


def generate_stream(spec: ScenarioSpec) -> np.ndarray:
    """Observations 1..n as an (n, dim) array; index change_at (1-based) is the first post-change draw."""
    rng = np.random.default_rng(spec.seed)
    if not spec.has_change:
        return spec.pre_change.sample(rng, spec.n, spec.dim)
    before = spec.change_at - 1
    return np.vstack([
        spec.pre_change.sample(rng, before, spec.dim),
        spec.post_change.sample(rng, spec.n - before, spec.dim),
    ])
