import numpy as np
from typing import Iterable, Optional, Union, Sequence

from src.utils.errors import DomainError
from src.validation.observation_validation import ObservationValidator

ObservationLike = Union[float, Sequence[float], np.ndarray]


def as_observation(values: ObservationLike, dim: Optional[int] = None) -> np.ndarray:
    """Coerce a scalar or vector to a 1-d float64 observation and validate it."""
    try:
        obs = np.atleast_1d(np.asarray(values, dtype=np.float64))
    except (TypeError, ValueError) as e:
        raise DomainError(f"observation is not numeric: {values!r}") from e
    if obs.ndim != 1:
        raise DomainError(f"observation must be a vector, got shape {obs.shape}")
    return ObservationValidator.default(dim).validate(obs)


def as_sequence(observations: Union[Iterable[ObservationLike], np.ndarray]) -> np.ndarray:
    """Stack observations into an (m, d) array; rows are observations."""
    rows = []
    dim = None
    for obs in observations:
        row = as_observation(obs, dim)
        dim = row.shape[0]
        rows.append(row)
    if not rows:
        raise DomainError("sequence must contain at least one observation")
    return np.vstack(rows)


class Bag:
    """
    Multiset of observations of one fixed dimension.

    Contents are only ever handed out in canonical (lexicographic) order, so two
    bags built from the same observations in different orders are
    indistinguishable to every score function.
    """
    def __init__(self, dim: Optional[int] = None):
        self._dim = dim
        self._rows = []

    @classmethod
    def of(cls, observations: Iterable[ObservationLike]) -> 'Bag':
        bag = cls()
        for obs in observations:
            bag.add(obs)
        return bag

    def add(self, observation: ObservationLike) -> None:
        obs = as_observation(observation, self._dim)
        if self._dim is None:
            self._dim = obs.shape[0]
        self._rows.append(obs)

    @property
    def size(self) -> int:
        return len(self._rows)

    @property
    def dim(self) -> Optional[int]:
        return self._dim

    def __len__(self) -> int:
        return self.size

    def contents(self) -> np.ndarray:
        if not self._rows:
            return np.empty((0, self._dim or 0))
        rows = np.vstack(self._rows)
        # lexsort keys run last-to-first: first column is the primary key
        order = np.lexsort(rows.T[::-1])
        return rows[order]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Bag):
            return NotImplemented
        return self.size == other.size and np.array_equal(self.contents(), other.contents())

    def __repr__(self) -> str:
        return f"Bag(size={self.size}, dim={self._dim})"
