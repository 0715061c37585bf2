"""
Shiryaev-Roberts run backwards in time over a fixed horizon N.

Starting from tau_0 = N + 1, each tau_k is the largest n < tau_{k-1} whose
backward statistic sum_{i=n}^{tau_{k-1}-1} e_n...e_i reaches c (0 if none).
The number of positive tau_k bounds the forward Roberts-Shiryaev alarm count
over the same horizon (see src.oracle.dominance).
"""

import math
from dataclasses import dataclass
from typing import List, Sequence

from src.oracle.brute_force import run_products
from src.utils.errors import ConfigError, DomainError


@dataclass(frozen=True)
class ReversedRun:
    n_horizon: int
    tau_times: List[int]  # strictly decreasing, always ends with the terminating 0
    alarm_count: int


def reversed_sr(e: Sequence[float], c: float) -> ReversedRun:
    if not c > 1:
        raise ConfigError(f"threshold c must be > 1, got {c}")
    e = [float(x) for x in e]
    if any(not (x > 0 and math.isfinite(x)) for x in e):
        raise DomainError("the reversed procedure needs strictly positive finite e-values")
    horizon = len(e)
    taus = []
    upper = horizon + 1
    while True:
        tau = 0
        for n in range(upper - 1, 0, -1):
            if math.fsum(run_products(e, n - 1, upper - 1)) >= c:
                tau = n
                break
        taus.append(tau)
        if tau == 0:
            break
        upper = tau
    return ReversedRun(horizon, taus, len(taus) - 1)
