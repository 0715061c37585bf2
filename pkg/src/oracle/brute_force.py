"""
Literal, deliberately slow evaluations of the forward stopping rules.

Nothing is carried between candidate times: every candidate n rebuilds the run
products from e_{sigma+1} onwards and re-sums them with math.fsum. These are the
ground truth the incremental detectors are checked against.
"""

import math
import operator
from itertools import accumulate
from typing import List, Sequence

from src.detector.alarm_log import AlarmLog
from src.utils.errors import ConfigError


def _check_threshold(c: float) -> None:
    if not c > 1:
        raise ConfigError(f"threshold c must be > 1, got {c}")


def run_products(e: Sequence[float], start: int, stop: int) -> List[float]:
    """Products e[start], e[start]*e[start+1], ..., up to index stop-1 (0-based, left to right)."""
    return list(accumulate(e[start:stop], operator.mul))


def rs_statistic(e: Sequence[float], start: int, n: int) -> float:
    """sum_{i=start+1}^{n} e_{start+1}...e_i for 1-based n, start = previous alarm."""
    return math.fsum(run_products(e, start, n))


def brute_force_rs(e: Sequence[float], c: float) -> AlarmLog:
    _check_threshold(c)
    e = [float(x) for x in e]
    alarms = []
    last = 0
    for n in range(1, len(e) + 1):
        if rs_statistic(e, last, n) >= c:
            alarms.append(n)
            last = n
    return AlarmLog(alarms, len(e), "rs", c)


def brute_force_musuc(e: Sequence[float], c: float) -> AlarmLog:
    _check_threshold(c)
    e = [float(x) for x in e]
    alarms = []
    last = 0
    for n in range(1, len(e) + 1):
        if math.prod(e[last:n]) >= c:
            alarms.append(n)
            last = n
    return AlarmLog(alarms, len(e), "musuc", c)
