"""
Roberts-Shiryaev and MUSUC stopping rules over an e-value stream.

Within a run (the steps after the previous alarm) the product
P_n = E_{sigma+1} ... E_n is kept as mantissa * 2**exponent, which never
overflows or underflows and agrees bit for bit with the plain float product
whenever that product is representable. Roberts-Shiryaev alarms when
S_n = P_{sigma+1} + ... + P_n reaches c, MUSUC when P_n reaches c; both
statistics restart after every alarm. S_n is accumulated as an exact Fraction
and compared after a single rounding, the value math.fsum gives for the same terms.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Tuple

from loguru import logger

from src.detector.alarm_log import AlarmLog
from src.epredictor.conformal import ConformalEStream
from src.epredictor.observations import ObservationLike
from src.epredictor.scores import ScoreFunction
from src.utils.errors import ConfigError, DomainError


class Procedure(str, Enum):
    ROBERTS_SHIRYAEV = "rs"
    MUSUC = "musuc"


@dataclass(frozen=True)
class DetectorConfig:
    c: float
    procedure: Procedure = Procedure.ROBERTS_SHIRYAEV
    e_floor: Optional[float] = None

    def __post_init__(self):
        if not math.isfinite(self.c) or self.c <= 1:
            raise ConfigError(f"threshold c must be a finite number > 1, got {self.c}")
        try:
            object.__setattr__(self, "procedure", Procedure(self.procedure))
        except ValueError as e:
            raise ConfigError(f"unknown procedure: {self.procedure}") from e
        if self.e_floor is not None and not (self.e_floor >= 0 and math.isfinite(self.e_floor)):
            raise ConfigError(f"e_floor must be a finite number >= 0, got {self.e_floor}")


@dataclass
class DetectorState:
    mantissa: float = 1.0
    exponent: int = 0
    sum_stat: Fraction = field(default_factory=Fraction)
    steps_in_run: int = 0

    @property
    def log_product(self) -> float:
        if self.mantissa == 0:
            return -math.inf
        return math.log(self.mantissa) + self.exponent * math.log(2)

    @property
    def product(self) -> float:
        try:
            return math.ldexp(self.mantissa, self.exponent)
        except OverflowError:
            return math.inf


def _checked(e: float, config: DetectorConfig) -> float:
    e = float(e)
    if not math.isfinite(e) or e < 0:
        raise DomainError(f"e-value must be finite and nonnegative, got {e}")
    if config.e_floor is not None:
        e = max(e, config.e_floor)
    return e


def _advance(state: DetectorState, e: float) -> DetectorState:
    mantissa, shift = math.frexp(state.mantissa * e)
    return DetectorState(mantissa, state.exponent + shift, state.sum_stat, state.steps_in_run + 1)


def _rounded(total: Fraction) -> float:
    try:
        return float(total)
    except OverflowError:
        return math.inf


def rs_step(state: DetectorState, e: float, config: DetectorConfig) -> Tuple[DetectorState, bool]:
    if config.procedure is not Procedure.ROBERTS_SHIRYAEV:
        raise ConfigError("rs_step needs a Roberts-Shiryaev config")
    nxt = _advance(state, _checked(e, config))
    product = nxt.product
    if math.isinf(product):
        return DetectorState(), True
    nxt.sum_stat = state.sum_stat + Fraction(product)
    if _rounded(nxt.sum_stat) >= config.c:
        return DetectorState(), True
    return nxt, False


def musuc_step(state: DetectorState, e: float, config: DetectorConfig) -> Tuple[DetectorState, bool]:
    if config.procedure is not Procedure.MUSUC:
        raise ConfigError("musuc_step needs a MUSUC config")
    nxt = _advance(state, _checked(e, config))
    if nxt.product >= config.c:
        return DetectorState(), True
    return nxt, False


class Detector:
    """Stateful driver: feeds e-values to the configured step function and records alarms."""
    def __init__(self, config: DetectorConfig):
        self.config = config
        self.state = DetectorState()
        self.n = 0
        self.alarm_times: List[int] = []
        self._step = rs_step if config.procedure is Procedure.ROBERTS_SHIRYAEV else musuc_step

    def update(self, e: float) -> bool:
        self.state, alarm = self._step(self.state, e, self.config)
        self.n += 1
        if alarm:
            self.alarm_times.append(self.n)
            logger.debug("alarm {} at step {} ({}, c={})", len(self.alarm_times), self.n, self.config.procedure.value, self.config.c)
        return alarm

    @property
    def log(self) -> AlarmLog:
        return AlarmLog(list(self.alarm_times), self.n, self.config.procedure.value, self.config.c)


def run_on_e_values(e_values: Iterable[float], config: DetectorConfig) -> AlarmLog:
    detector = Detector(config)
    for e in e_values:
        detector.update(e)
    return detector.log


def run_detector(
    predictor: ScoreFunction,
    stream: Iterable[ObservationLike],
    config: DetectorConfig,
    window: Optional[int] = None,
    on_alarm: Optional[Callable[[int, int], None]] = None,
) -> AlarmLog:
    """Compose the e-value stream with a stopping rule; on_alarm(k, sigma) fires as each alarm is raised."""
    e_stream = ConformalEStream(predictor, window=window)
    detector = Detector(config)
    for z in stream:
        if detector.update(e_stream.update(z)) and on_alarm is not None:
            on_alarm(len(detector.alarm_times), detector.n)
    return detector.log
