import json
from dataclasses import dataclass, field
from bisect import bisect_right
from typing import Any, Dict, List, Optional, TextIO

from src.utils.errors import DomainError


def alarm_record(k: int, sigma: int) -> Dict[str, int]:
    return {"k": k, "sigma": sigma}


def summary_record(n: int, count: int) -> Dict[str, Any]:
    return {"n": n, "A_n": count, "freq": count / n if n else 0.0}


@dataclass
class AlarmLog:
    """Alarm times sigma_1 < sigma_2 < ... (1-based) over a horizon of n observations."""
    alarm_times: List[int] = field(default_factory=list)
    horizon: int = 0
    procedure: Optional[str] = None
    c: Optional[float] = None

    def __post_init__(self):
        previous = 0
        for sigma in self.alarm_times:
            if sigma <= previous:
                raise DomainError(f"alarm times must be strictly increasing positive integers: {self.alarm_times}")
            previous = sigma
        if previous > self.horizon:
            raise DomainError(f"alarm at {previous} is beyond the horizon {self.horizon}")

    @property
    def count(self) -> int:
        return len(self.alarm_times)

    def count_up_to(self, n: int) -> int:
        """A_n = max{k : sigma_k <= n}."""
        return bisect_right(self.alarm_times, n)

    def to_records(self) -> List[Dict[str, Any]]:
        records = [alarm_record(k, sigma) for k, sigma in enumerate(self.alarm_times, 1)]
        records.append(summary_record(self.horizon, self.count))
        return records

    def write_jsonl(self, handle: TextIO) -> None:
        for record in self.to_records():
            handle.write(json.dumps(record) + "\n")


def alarm_frequency(log: AlarmLog) -> float:
    if log.horizon < 1:
        raise DomainError("alarm frequency needs a horizon of at least one observation")
    return log.count / log.horizon
