"""Executable forms of the two dominance arguments behind the false-alarm bounds."""

import math
from typing import List, Sequence, Tuple

from src.oracle.brute_force import brute_force_musuc, brute_force_rs
from src.oracle.reversed_sr import reversed_sr

WITNESS_TOLERANCE = 1e-9


def interval_coverage(e: Sequence[float], c: float) -> List[Tuple[int, int]]:
    """Forward alarm intervals {sigma_k+1..sigma_{k+1}} that hold no reversed stopping time."""
    sigmas = [0] + brute_force_rs(e, c).alarm_times
    taus = reversed_sr(e, c).tau_times
    return [
        (lo + 1, hi)
        for lo, hi in zip(sigmas, sigmas[1:])
        if not any(lo < tau <= hi for tau in taus)
    ]


def check_dominance_rs(e: Sequence[float], c: float) -> bool:
    """A_N (forward Roberts-Shiryaev alarms) <= A'_N (reversed Shiryaev-Roberts alarms)."""
    return brute_force_rs(e, c).count <= reversed_sr(e, c).alarm_count


def check_dominance_musuc(e: Sequence[float], c: float) -> bool:
    """
    Every MUSUC alarm is matched by an earlier-or-equal Roberts-Shiryaev alarm
    with the same index. Where Roberts-Shiryaev is strictly ahead at index k-1,
    the e-values between the two (k-1)-th alarms must multiply to at least 1.
    """
    e = [float(x) for x in e]
    rs = brute_force_rs(e, c).alarm_times
    mu = brute_force_musuc(e, c).alarm_times
    if len(rs) < len(mu):
        return False
    if any(sigma > sigma_prime for sigma, sigma_prime in zip(rs, mu)):
        return False
    for k in range(1, len(mu)):
        sigma, sigma_prime = rs[k - 1], mu[k - 1]
        if sigma < sigma_prime and math.prod(e[sigma:sigma_prime]) < 1 - WITNESS_TOLERANCE:
            return False
    return True
