"""
Conformal e-predictors built by score normalisation.

For a sequence z_1..z_m with bag-equivariant scores s_i the e-predictor returns
alpha_i = m * s_i / sum_j s_j, or all ones when every score is zero. The
denominator is exactly rounded, so the mean of alpha is 1 up to a few ulps
without a second renormalisation pass, and permuting the input permutes the
output bit for bit. The stream computes the same value from an incremental total.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

import numpy as np
from loguru import logger

from src.epredictor.observations import Bag, ObservationLike, as_observation, as_sequence
from src.epredictor.scores import ScoreFunction, check_scores
from src.utils.errors import ConfigError, DomainError

MEAN_TOLERANCE = 1e-12


@dataclass(frozen=True)
class EVector:
    alphas: np.ndarray

    def __post_init__(self):
        if np.any(self.alphas < 0):
            raise DomainError("e-vector entries must be nonnegative")

    @property
    def mean(self) -> float:
        return math.fsum(self.alphas) / len(self.alphas)

    def __len__(self) -> int:
        return len(self.alphas)


def normalize(m: int, score: float, total: float) -> float:
    return 1.0 if total == 0 else m * score / total


def evaluate_batch(predictor: ScoreFunction, sequence: Union[Iterable[ObservationLike], np.ndarray]) -> EVector:
    points = as_sequence(sequence)
    m = points.shape[0]
    scores = check_scores(predictor.score_batch(points))
    total = math.fsum(scores)
    if total == 0:
        return EVector(np.ones(m))
    return EVector(m * scores / total)


def conformal_e(predictor: ScoreFunction, bag: Bag, z: ObservationLike) -> float:
    """The e-value of z given the bag of earlier observations (1.0 for an empty bag)."""
    z = as_observation(z, bag.dim)
    if bag.size == 0:
        return 1.0
    return float(evaluate_batch(predictor, np.vstack([bag.contents(), z])).alphas[-1])


class ConformalEStream:
    """
    Online e-values E_n = f(bag of Z_1..Z_{n-1}, Z_n).

    With window=None the bag is the full prefix. With window=w only the w most
    recent observations are kept, which bounds the per-step cost but departs
    from the full-prefix definition.
    """
    def __init__(self, predictor: ScoreFunction, window: Optional[int] = None):
        if window is not None and window < 1:
            raise ConfigError(f"window must be >= 1, got {window}")
        self.predictor = predictor
        self.window = window
        self.dim: Optional[int] = None
        self.n = 0
        self._tracker = predictor.tracker(window)

    def update(self, z: ObservationLike) -> float:
        z = as_observation(z, self.dim)
        score, total = self._tracker.push(z)
        if score < 0 or not math.isfinite(score) or not math.isfinite(total):
            raise DomainError(f"score function produced an invalid score at step {self.n + 1}")
        self.dim = z.shape[0]
        self.n += 1
        e = normalize(self._tracker.length, score, total)
        logger.debug("step {}: score={:.6g} total={:.6g} e={:.6g}", self.n, score, total, e)
        return e


def stream_e_values(
    predictor: ScoreFunction,
    stream: Iterable[ObservationLike],
    window: Optional[int] = None,
) -> Iterator[float]:
    e_stream = ConformalEStream(predictor, window=window)
    for z in stream:
        yield e_stream.update(z)


def e_pseudomartingale(e_values: Iterable[float]) -> np.ndarray:
    """log S_n for n = 0, 1, ...: the log running product of e-values, -inf once a zero appears."""
    e = np.asarray(list(e_values), dtype=np.float64)
    with np.errstate(divide="ignore"):
        return np.concatenate([[0.0], np.cumsum(np.log(e))])
