from typing import Optional

from src.detector.stopping_rules import DetectorConfig
from src.epredictor.scores import ScoreFunction
from src.sim.experiments import (
    DelaySummary,
    ValidityReport,
    delay_experiment,
    validity_experiment,
)
from src.sim.reporting import save_json, save_trials_csv
from src.sim.scenario import ScenarioSpec
from src.sim.tracking import ExperimentTracker
from src.utils.base import ExperimentComponent


class _TrackedExperiment(ExperimentComponent):
    def __init__(self, logger, config_manager):
        super().__init__(logger, config_manager)
        self.tracker = ExperimentTracker(
            logger,
            enabled=bool(self.get_config("tracking.enabled", False)),
            experiment_name=self.get_config("tracking.experiment_name", "driftguard"),
            tracking_uri=self.get_config("tracking.uri"),
        )


class ValidityExperiment(_TrackedExperiment):
    """Monte Carlo check of the 1/c false-alarm bound under an IID null."""

    def execute(
        self,
        spec: ScenarioSpec,
        predictor: ScoreFunction,
        config: DetectorConfig,
        trials: int,
        epsilon: float,
        slack: float,
        n_jobs: int = 1,
        window: Optional[int] = None,
        report_path: Optional[str] = None,
        csv_path: Optional[str] = None,
    ) -> ValidityReport:
        with self.stage("Validity Experiment") as outcome:
            self.logger.info(f"Scenario: {spec.to_dict()}")
            self.logger.info(f"Detector: {config.procedure.value}, c={config.c}; predictor {predictor!r}")
            self.logger.info(f"Running {trials} trials (n_jobs={n_jobs})...")
            report = validity_experiment(spec, predictor, config, trials, epsilon, n_jobs=n_jobs, window=window)

            passed = report.passes(slack)
            summary = {**report.to_dict(), "slack": slack, "passed": passed}
            self.logger.info(f"  Bound 1/c: {report.bound:.4f}, epsilon: {epsilon}")
            self.logger.info(f"  Exceed fraction: {report.exceed_fraction:.4f} (slack {slack})")

            if (path := self.report_path(report_path)) is not None:
                self.logger.info(f"✓ Report saved to: {save_json(summary, path)}")
            if (path := self.report_path(csv_path)) is not None:
                self.logger.info(f"✓ Per-trial frequencies saved to: {save_trials_csv(report.trial_reports, path)}")
            self.tracker.log_run(f"validity_{config.procedure.value}", {**spec.to_dict(), "trials": trials}, summary)

            if passed:
                self.logger.info("✓ Validity gate PASSED")
            else:
                self.logger.error("✗ Validity gate FAILED")
            outcome.success = passed
            return report


class DelayExperiment(_TrackedExperiment):
    """Exploratory detection-delay benchmark; never gates."""

    def execute(
        self,
        spec: ScenarioSpec,
        predictor: ScoreFunction,
        config: DetectorConfig,
        trials: int,
        n_jobs: int = 1,
        window: Optional[int] = None,
        report_path: Optional[str] = None,
        csv_path: Optional[str] = None,
    ) -> DelaySummary:
        with self.stage("Delay Benchmark"):
            self.logger.info(f"Scenario: {spec.to_dict()}")
            self.logger.info(f"Running {trials} trials (n_jobs={n_jobs})...")
            summary = delay_experiment(spec, predictor, config, trials, n_jobs=n_jobs, window=window)
            result = summary.to_dict()
            self.logger.info(f"  Detected: {summary.detected_fraction:.2%}, median delay: {result['median_delay']}")

            if (path := self.report_path(report_path)) is not None:
                self.logger.info(f"✓ Report saved to: {save_json(result, path)}")
            if (path := self.report_path(csv_path)) is not None:
                saved = save_trials_csv(summary.trial_reports, path, change_at=spec.change_at)
                self.logger.info(f"✓ Per-trial delays saved to: {saved}")
            self.tracker.log_run(f"delay_{config.procedure.value}", {**spec.to_dict(), "trials": trials}, result)
            return summary
