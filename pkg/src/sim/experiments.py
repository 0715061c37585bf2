"""
Monte Carlo harness for the false-alarm bound and detection delay.

Trial i of an experiment seeded with s draws its stream from
SeedSequence([s, i]), so a report is reproducible and does not depend on how
many joblib workers ran the trials.
"""

import math
from dataclasses import dataclass, field
from itertools import islice
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.detector.alarm_log import AlarmLog
from src.detector.stopping_rules import DetectorConfig, run_detector
from src.epredictor.conformal import stream_e_values
from src.epredictor.scores import ScoreFunction
from src.sim.scenario import ScenarioSpec, generate_stream
from src.utils.errors import ConfigError


@dataclass
class TrialReport:
    alarm_log: AlarmLog
    frequency: float
    first_alarm_after_change: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alarms": self.alarm_log.count,
            "horizon": self.alarm_log.horizon,
            "frequency": self.frequency,
            "delay": self.first_alarm_after_change,
        }


@dataclass
class ValidityReport:
    trials: int
    c: float
    epsilon: float
    exceed_fraction: float
    bound: float
    procedure: str = "rs"
    predictor: str = ""
    horizon: int = 0
    trial_reports: List[TrialReport] = field(default_factory=list, repr=False)

    @property
    def frequencies(self) -> List[float]:
        return [t.frequency for t in self.trial_reports]

    def passes(self, slack: float) -> bool:
        return self.exceed_fraction <= slack

    def to_dict(self) -> Dict[str, Any]:
        freqs = np.asarray(self.frequencies)
        return {
            "trials": self.trials,
            "c": self.c,
            "epsilon": self.epsilon,
            "bound": self.bound,
            "exceed_fraction": self.exceed_fraction,
            "procedure": self.procedure,
            "predictor": self.predictor,
            "n": self.horizon,
            "mean_frequency": float(freqs.mean()) if freqs.size else None,
            "max_frequency": float(freqs.max()) if freqs.size else None,
        }


@dataclass
class DelaySummary:
    trials: int
    change_at: int
    delays: List[Optional[int]] = field(repr=False)
    procedure: str = "rs"
    predictor: str = ""
    trial_reports: List[TrialReport] = field(default_factory=list, repr=False)

    @property
    def detected(self) -> List[int]:
        return [d for d in self.delays if d is not None]

    @property
    def detected_fraction(self) -> float:
        return len(self.detected) / self.trials

    def quantile(self, q: float) -> Optional[float]:
        detected = self.detected
        return float(np.quantile(detected, q)) if detected else None

    def to_dict(self) -> Dict[str, Any]:
        detected = self.detected
        return {
            "exploratory": True,
            "trials": self.trials,
            "change_at": self.change_at,
            "procedure": self.procedure,
            "predictor": self.predictor,
            "detected_fraction": self.detected_fraction,
            "median_delay": self.quantile(0.5),
            "p10_delay": self.quantile(0.1),
            "p90_delay": self.quantile(0.9),
            "mean_delay": float(np.mean(detected)) if detected else None,
        }


@dataclass
class EValueMean:
    n: int
    mean: float
    std_error: float
    trials: int

    @property
    def within_three_se(self) -> bool:
        return abs(self.mean - 1.0) <= 3 * self.std_error

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "mean": self.mean,
            "std_error": self.std_error,
            "trials": self.trials,
            "within_3se": self.within_three_se,
        }


def trial_seed(seed: int, trial_index: int) -> int:
    return int(np.random.SeedSequence([seed, trial_index]).generate_state(1)[0])


def run_trial(
    spec: ScenarioSpec,
    predictor: ScoreFunction,
    config: DetectorConfig,
    window: Optional[int] = None,
) -> TrialReport:
    log = run_detector(predictor, generate_stream(spec), config, window=window)
    frequency = log.count / log.horizon if log.horizon else 0.0
    delay = None
    if spec.has_change:
        first = next((sigma for sigma in log.alarm_times if sigma >= spec.change_at), None)
        delay = None if first is None else first - spec.change_at
    return TrialReport(log, frequency, delay)


def run_trials(
    spec: ScenarioSpec,
    predictor: ScoreFunction,
    config: DetectorConfig,
    trials: int,
    n_jobs: int = 1,
    window: Optional[int] = None,
) -> List[TrialReport]:
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    specs = [spec.with_seed(trial_seed(spec.seed, i)) for i in range(trials)]
    return Parallel(n_jobs=n_jobs)(delayed(run_trial)(s, predictor, config, window) for s in specs)


def validity_experiment(
    spec: ScenarioSpec,
    predictor: ScoreFunction,
    config: DetectorConfig,
    trials: int,
    epsilon: float,
    n_jobs: int = 1,
    window: Optional[int] = None,
) -> ValidityReport:
    """Fraction of IID trials whose alarm frequency exceeds 1/c + epsilon."""
    if spec.has_change:
        raise ConfigError("validity experiments run under the IID null; drop the change-point")
    if not epsilon > 0:
        raise ConfigError(f"epsilon must be > 0, got {epsilon}")
    if spec.n < 1:
        raise ConfigError("validity experiments need a horizon of at least one observation")
    reports = run_trials(spec, predictor, config, trials, n_jobs, window)
    frequencies = [r.frequency for r in reports]
    bound = 1.0 / config.c
    exceed = sum(f > bound + epsilon for f in frequencies) / trials
    return ValidityReport(
        trials=trials,
        c=config.c,
        epsilon=epsilon,
        exceed_fraction=exceed,
        bound=bound,
        procedure=config.procedure.value,
        predictor=repr(predictor),
        horizon=spec.n,
        trial_reports=reports,
    )


def delay_experiment(
    spec: ScenarioSpec,
    predictor: ScoreFunction,
    config: DetectorConfig,
    trials: int,
    n_jobs: int = 1,
    window: Optional[int] = None,
) -> DelaySummary:
    """Exploratory: steps from the change-point to the first alarm at or after it."""
    if not spec.has_change:
        raise ConfigError("delay is undefined without a change-point")
    reports = run_trials(spec, predictor, config, trials, n_jobs, window)
    return DelaySummary(
        trials=trials,
        change_at=spec.change_at,
        delays=[r.first_alarm_after_change for r in reports],
        procedure=config.procedure.value,
        predictor=repr(predictor),
        trial_reports=reports,
    )


def _e_values_at(spec: ScenarioSpec, predictor: ScoreFunction, checkpoints: Sequence[int]) -> List[float]:
    e_values = list(stream_e_values(predictor, islice(generate_stream(spec), max(checkpoints))))
    return [e_values[n - 1] for n in checkpoints]


def e_value_mean_experiment(
    spec: ScenarioSpec,
    predictor: ScoreFunction,
    trials: int,
    checkpoints: Sequence[int] = (2, 10, 50),
    n_jobs: int = 1,
) -> List[EValueMean]:
    """Empirical mean and standard error of E_n across IID trials at each checkpoint n."""
    if trials < 2:
        raise ConfigError(f"need at least two trials for a standard error, got {trials}")
    if spec.has_change:
        raise ConfigError("the mean-one check runs under the IID null; drop the change-point")
    if not checkpoints or min(checkpoints) < 1 or max(checkpoints) > spec.n:
        raise ConfigError(f"checkpoints must lie in [1, {spec.n}], got {list(checkpoints)}")
    specs = [spec.with_seed(trial_seed(spec.seed, i)) for i in range(trials)]
    rows = Parallel(n_jobs=n_jobs)(delayed(_e_values_at)(s, predictor, checkpoints) for s in specs)
    values = np.asarray(rows)
    results = []
    for j, n in enumerate(checkpoints):
        column = values[:, j]
        results.append(EValueMean(n, float(column.mean()), float(column.std(ddof=1) / math.sqrt(trials)), trials))
    return results
