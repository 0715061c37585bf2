"""
Bag-equivariant nonconformity scores.

A score function maps every observation of a finite sequence to a nonnegative
number that depends on the rest of the sequence only as a multiset. All
arithmetic here is arranged so that the score of a point is bit-identical no
matter how the other points are ordered: distances are accumulated column by
column, neighbour lists are sorted before averaging, and sums over the whole
sequence are exactly rounded (math.fsum or an exact Fraction total).
"""

import math
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np

from src.epredictor.observations import Bag, as_observation
from src.utils.errors import ConfigError, DomainError


def pairwise_distances(points: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Euclidean distance from z to every row of points."""
    diff = points - z
    acc = np.zeros(points.shape[0])
    for j in range(diff.shape[1]):
        acc += diff[:, j] * diff[:, j]
    return np.sqrt(acc)


def k_smallest(distances: np.ndarray, k: int) -> np.ndarray:
    """Sorted k smallest distances, padded with +inf when fewer than k exist."""
    nearest = np.full(k, np.inf)
    if distances.size:
        head = np.sort(distances)[:k]
        nearest[:head.size] = head
    return nearest


def row_means(nearest: np.ndarray) -> np.ndarray:
    """Mean of the finite entries of each sorted neighbour row; 0 for empty rows."""
    acc = np.zeros(nearest.shape[0])
    count = np.zeros(nearest.shape[0])
    for j in range(nearest.shape[1]):
        col = nearest[:, j]
        finite = np.isfinite(col)
        acc += np.where(finite, col, 0.0)
        count += finite
    return np.divide(acc, count, out=np.zeros_like(acc), where=count > 0)


def knn_score(z, bag: Union[Bag, np.ndarray], k: int) -> float:
    """Mean distance from z to its k nearest neighbours in bag (all of them if fewer than k)."""
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    points = bag.contents() if isinstance(bag, Bag) else np.asarray(bag, dtype=np.float64)
    z = as_observation(z)
    if points.size == 0:
        return 0.0
    points = points.reshape(len(points), -1)
    nearest = k_smallest(pairwise_distances(points, z), k)
    return float(row_means(nearest[None, :])[0])


class ScoreTracker(ABC):
    """Incremental scorer behind a stream: one push per observation."""

    @abstractmethod
    def push(self, z: np.ndarray) -> Tuple[float, float]:
        """Append z; return (score of z, exactly rounded sum of all current scores)."""
        pass

    @property
    @abstractmethod
    def length(self) -> int:
        """Number of observations in the currently scored sequence."""
        pass


class RecomputeTracker(ScoreTracker):
    """Rescores the whole (optionally windowed) sequence on every push."""
    def __init__(self, score_function: 'ScoreFunction', window: Optional[int] = None):
        self.score_function = score_function
        self.window = window
        self._rows = []

    def push(self, z: np.ndarray) -> Tuple[float, float]:
        self._rows.append(z)
        if self.window is not None and len(self._rows) > self.window + 1:
            self._rows.pop(0)
        scores = self.score_function.score_batch(np.vstack(self._rows))
        return float(scores[-1]), math.fsum(scores)

    @property
    def length(self) -> int:
        return len(self._rows)


class ScoreFunction(ABC):
    name: str = "abstract"

    @abstractmethod
    def score_batch(self, points: np.ndarray) -> np.ndarray:
        """Score each row of an (m, d) array against the bag of all m rows."""
        pass

    def tracker(self, window: Optional[int] = None) -> ScoreTracker:
        return RecomputeTracker(self, window)

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


class ConstantScore(ScoreFunction):
    """Every observation scores 1, so every e-value is exactly 1."""
    name = "const"

    def score_batch(self, points: np.ndarray) -> np.ndarray:
        return np.ones(points.shape[0])

    def tracker(self, window: Optional[int] = None) -> ScoreTracker:
        if window is not None:
            return RecomputeTracker(self, window)
        return _ConstantTracker()


class KNNScore(ScoreFunction):
    """Mean distance to the k nearest other members of the bag."""
    name = "knn"

    def __init__(self, k: int = 1):
        if k < 1:
            raise ConfigError(f"k must be >= 1, got {k}")
        self.k = k

    def score_batch(self, points: np.ndarray) -> np.ndarray:
        m = points.shape[0]
        nearest = np.empty((m, self.k))
        for i in range(m):
            others = np.delete(pairwise_distances(points, points[i]), i)
            nearest[i] = k_smallest(others, self.k)
        return row_means(nearest)

    def tracker(self, window: Optional[int] = None) -> ScoreTracker:
        if window is not None:
            return RecomputeTracker(self, window)
        return _KNNTracker(self.k)

    def __repr__(self) -> str:
        return f"KNNScore(k={self.k})"


class DistanceToMeanScore(ScoreFunction):
    """Distance from an observation to the centroid of the whole bag."""
    name = "dist-mean"

    def score_batch(self, points: np.ndarray) -> np.ndarray:
        m = points.shape[0]
        centroid = np.array([math.fsum(points[:, j]) for j in range(points.shape[1])]) / m
        return pairwise_distances(points, centroid)

    def tracker(self, window: Optional[int] = None) -> ScoreTracker:
        if window is not None:
            return RecomputeTracker(self, window)
        return _CentroidTracker()


class _GrowingRows:
    """Row storage with amortised doubling."""
    def __init__(self, width: int, fill: float = 0.0):
        self.width = width
        self.fill = fill
        self.data = np.full((64, width), fill)
        self.size = 0

    def append(self, row: np.ndarray) -> None:
        if self.size == self.data.shape[0]:
            grown = np.full((2 * self.size, self.width), self.fill)
            grown[:self.size] = self.data
            self.data = grown
        self.data[self.size] = row
        self.size += 1

    @property
    def view(self) -> np.ndarray:
        return self.data[:self.size]


class _ConstantTracker(ScoreTracker):
    def __init__(self):
        self._n = 0

    def push(self, z: np.ndarray) -> Tuple[float, float]:
        self._n += 1
        return 1.0, float(self._n)

    @property
    def length(self) -> int:
        return self._n


class _KNNTracker(ScoreTracker):
    """
    Keeps each stored point's sorted k nearest distances. A new point only
    touches the rows it lands inside of, and the score total is kept as an
    exact Fraction so it rounds to the same float math.fsum would give.
    """
    def __init__(self, k: int):
        self.k = k
        self._points: Optional[_GrowingRows] = None
        self._nearest = _GrowingRows(k, fill=np.inf)
        self._scores = _GrowingRows(1)
        self._total = Fraction(0)

    def push(self, z: np.ndarray) -> Tuple[float, float]:
        if self._points is None:
            self._points = _GrowingRows(z.shape[0])
        n = self._points.size
        if n:
            d = pairwise_distances(self._points.view, z)
            nearest = self._nearest.view
            changed = np.flatnonzero(d < nearest[:, -1])
            if changed.size:
                merged = np.sort(np.concatenate([nearest[changed], d[changed, None]], axis=1), axis=1)[:, :self.k]
                nearest[changed] = merged
                fresh = row_means(merged)
                scores = self._scores.view[:, 0]
                for idx, new in zip(changed, fresh):
                    self._total += Fraction(float(new)) - Fraction(float(scores[idx]))
                scores[changed] = fresh
            own = k_smallest(d, self.k)
        else:
            own = np.full(self.k, np.inf)
        own_score = float(row_means(own[None, :])[0])
        self._points.append(z)
        self._nearest.append(own)
        self._scores.append(np.array([own_score]))
        self._total += Fraction(own_score)
        return own_score, float(self._total)

    @property
    def length(self) -> int:
        return 0 if self._points is None else self._points.size


class _CentroidTracker(ScoreTracker):
    """Exact column sums give the same centroid as math.fsum over the stored points."""
    def __init__(self):
        self._points: Optional[_GrowingRows] = None
        self._sums = []

    def push(self, z: np.ndarray) -> Tuple[float, float]:
        if self._points is None:
            self._points = _GrowingRows(z.shape[0])
            self._sums = [Fraction(0)] * z.shape[0]
        self._points.append(z)
        self._sums = [total + Fraction(float(v)) for total, v in zip(self._sums, z)]
        m = self._points.size
        centroid = np.array([float(total) for total in self._sums]) / m
        scores = pairwise_distances(self._points.view, centroid)
        return float(scores[-1]), math.fsum(scores)

    @property
    def length(self) -> int:
        return 0 if self._points is None else self._points.size


class ScoreFunctionFactory:
    @staticmethod
    def create(name: str, k: int = 1) -> ScoreFunction:
        name = name.lower()
        if name == "knn":
            return KNNScore(k=k)
        if name in ("dist-mean", "dist_mean"):
            return DistanceToMeanScore()
        if name in ("const", "constant"):
            return ConstantScore()
        raise ConfigError(f"Unsupported predictor: {name}")


def check_scores(scores: np.ndarray) -> np.ndarray:
    if np.any(scores < 0) or not np.all(np.isfinite(scores)):
        raise DomainError("score function produced a negative or non-finite score")
    return scores
