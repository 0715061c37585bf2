import numpy as np

from src.epredictor.scores import ConstantScore, DistanceToMeanScore, KNNScore

BUILT_IN_PREDICTORS = [ConstantScore(), KNNScore(k=1), KNNScore(k=3), DistanceToMeanScore()]


def random_sequence(rng, max_len=200, max_dim=5):
    m = int(rng.integers(1, max_len + 1))
    d = int(rng.integers(1, max_dim + 1))
    points = rng.normal(0.0, rng.uniform(0.1, 10.0), size=(m, d))
    # repeated points exercise ties and zero distances
    if m > 2 and rng.random() < 0.3:
        points[rng.integers(0, m)] = points[0]
    return points


def log_uniform_e(rng, length, low=1e-6, high=1e6):
    return list(np.exp(rng.uniform(np.log(low), np.log(high), size=length)))
