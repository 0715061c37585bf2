"""
driftguard command line: detect, validate, bench-delay.

Exit codes: 0 ok, 1 validation gate failed, 2 usage, input or data error.
"""

import argparse
import json
import sys
from contextlib import ExitStack
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, List, Optional, Sequence, TextIO

from src.detector.alarm_log import alarm_record, summary_record
from src.detector.stopping_rules import DetectorConfig, Procedure, run_detector
from src.epredictor.observations import as_observation
from src.epredictor.scores import ScoreFunctionFactory
from src.ingestion.load_data import ObservationIngestion, Record, RecordSourceFactory, parse_columns
from src.sim.components import DelayExperiment, ValidityExperiment
from src.sim.reporting import dump_json
from src.sim.scenario import DistributionSpec, ScenarioSpec
from src.utils.config import ConfigManager
from src.utils.errors import ConfigError, DomainError, MalformedRecordError
from src.utils.logger import LoggerConfig, get_logger

DEFAULT_CONFIG_PATH = "configs/driftguard.yaml"

EXIT_OK = 0
EXIT_GATE_FAILED = 1
EXIT_USAGE = 2


@dataclass
class RunConfig:
    input: Optional[str] = None
    format: str = "csv"
    columns: Optional[List[str]] = None
    predictor: str = "knn"
    k: int = 1
    window: Optional[int] = None
    procedure: str = "rs"
    threshold: float = 20.0
    on_bad_record: str = "fail"
    output: Optional[str] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if not self.threshold > 1:
            raise ConfigError(f"--threshold must be > 1, got {self.threshold}")
        if self.k < 1:
            raise ConfigError(f"--k must be >= 1, got {self.k}")
        if self.window is not None and self.window < 1:
            raise ConfigError(f"--window must be >= 1, got {self.window}")
        if self.on_bad_record not in ("fail", "skip"):
            raise ConfigError(f"--on-bad-record must be fail or skip, got {self.on_bad_record}")
        if self.procedure not in {p.value for p in Procedure}:
            raise ConfigError(f"--procedure must be rs or musuc, got {self.procedure}")


def _open_output(stack: ExitStack, path: Optional[str], out: Optional[TextIO]) -> TextIO:
    if out is not None:
        return out
    if path is None or path == "-":
        return sys.stdout
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return stack.enter_context(open(path, "w"))


def _emit(handle: TextIO, record: dict) -> None:
    handle.write(json.dumps(record) + "\n")
    handle.flush()


class _AcceptedObservations:
    """
    Applies the bad-record policy in front of the detector. Records are checked
    against the locked dimension before they reach the e-value stream, so a
    skipped record never touches detector state. `line` is the input line of
    the observation currently being processed.
    """
    def __init__(self, records: Iterable[Record], on_bad_record: str, logger):
        self.records = records
        self.on_bad_record = on_bad_record
        self.logger = logger
        self.line: Optional[int] = None
        self.skipped = 0
        self._dim: Optional[int] = None

    def _checked(self, record: Record):
        if not record.ok:
            raise MalformedRecordError(record.line, record.error)
        try:
            return as_observation(record.values, self._dim)
        except DomainError as err:
            raise MalformedRecordError(record.line, str(err)) from err

    def __iter__(self) -> Iterator:
        for record in self.records:
            try:
                obs = self._checked(record)
            except MalformedRecordError as err:
                if self.on_bad_record == "fail":
                    raise
                self.skipped += 1
                self.logger.warning(f"Skipping {err}")
                continue
            self._dim = obs.shape[0]
            self.line = record.line
            yield obs


def cmd_detect(config: RunConfig, out: Optional[TextIO] = None) -> int:
    """Stream records through the detector, writing each alarm the moment it fires."""
    logger = get_logger()
    try:
        predictor = ScoreFunctionFactory.create(config.predictor, k=config.k)
        detector_config = DetectorConfig(config.threshold, config.procedure)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_USAGE

    if config.seed is not None:
        logger.debug(f"Seed {config.seed} ignored: detection is deterministic")
    ingestion = ObservationIngestion(logger, ConfigManager())
    with ingestion.stage("Detection") as outcome, ExitStack() as stack:
        try:
            handle = ingestion.open_input(config.input)
            if handle is not sys.stdin:
                stack.enter_context(handle)
            sink = _open_output(stack, config.output, out)
            accepted = _AcceptedObservations(
                ingestion.execute(handle, config.format, config.columns), config.on_bad_record, logger,
            )

            def on_alarm(k: int, sigma: int) -> None:
                _emit(sink, alarm_record(k, sigma))
                logger.info(f"ALARM {k} at observation {sigma} (line {accepted.line})")

            try:
                log = run_detector(predictor, accepted, detector_config, window=config.window, on_alarm=on_alarm)
            except DomainError as err:
                if not isinstance(err, MalformedRecordError):
                    err = MalformedRecordError(accepted.line, str(err))
                logger.error(f"Malformed record at {err}")
                outcome.success = False
                return EXIT_USAGE
            _emit(sink, summary_record(log.horizon, log.count))
        except (OSError, ConfigError) as e:
            logger.error(f"Cannot process input: {e}")
            outcome.success = False
            return EXIT_USAGE
        logger.info(f"✓ Processed {log.horizon} observations, {log.count} alarms, {accepted.skipped} skipped")
    return EXIT_OK


def _scenario(args: argparse.Namespace, settings: ConfigManager, section: str, with_change: bool) -> ScenarioSpec:
    pre = DistributionSpec.parse(args.pre or settings.get(f"{section}.pre_change", "gaussian:mean=0,scale=1"))
    change_at = args.change if with_change else None
    post = None
    if change_at is not None:
        post = DistributionSpec.parse(args.post or settings.get(f"{section}.post_change", "gaussian:mean=3,scale=1"))
    return ScenarioSpec(
        pre_change=pre,
        n=args.horizon if args.horizon is not None else settings.get_int(f"{section}.horizon", 20000),
        seed=args.seed if args.seed is not None else settings.get_int(f"{section}.seed", 0),
        change_at=change_at,
        post_change=post,
        dim=args.dim if args.dim is not None else settings.get_int(f"{section}.dim", 1),
    )


def _detector_choice(args: argparse.Namespace, settings: ConfigManager):
    predictor = ScoreFunctionFactory.create(
        args.predictor or settings.get("predictor.name", "knn"),
        k=args.k if args.k is not None else settings.get_int("predictor.k", 1),
    )
    config = DetectorConfig(
        args.threshold if args.threshold is not None else settings.get_float("detector.threshold", 20.0),
        args.procedure or settings.get("detector.procedure", "rs"),
    )
    window = args.window if args.window is not None else settings.get_int("predictor.window", None)
    return predictor, config, window


def _setting(value, lookup: Callable[[str, Any], Any], key: str, default):
    return value if value is not None else lookup(key, default)


def cmd_validate(args: argparse.Namespace, out: Optional[TextIO] = None) -> int:
    logger = get_logger()
    settings = ConfigManager()
    try:
        spec = _scenario(args, settings, "validity", with_change=False)
        predictor, config, window = _detector_choice(args, settings)
        slack = _setting(args.slack, settings.get_float, "validity.slack", 0.05)
        report = ValidityExperiment(logger, settings).execute(
            spec,
            predictor,
            config,
            trials=_setting(args.trials, settings.get_int, "validity.trials", 500),
            epsilon=_setting(args.epsilon, settings.get_float, "validity.epsilon", 0.02),
            slack=slack,
            n_jobs=_setting(args.jobs, settings.get_int, "validity.n_jobs", 1),
            window=window,
            csv_path=args.csv,
        )
    except ConfigError as e:
        logger.error(f"Invalid validity arguments: {e}")
        return EXIT_USAGE
    with ExitStack() as stack:
        dump_json({**report.to_dict(), "slack": slack, "passed": report.passes(slack)},
                  _open_output(stack, args.output, out))
    return EXIT_OK if report.passes(slack) else EXIT_GATE_FAILED


def cmd_bench_delay(args: argparse.Namespace, out: Optional[TextIO] = None) -> int:
    logger = get_logger()
    settings = ConfigManager()
    if args.change is None:
        logger.error("bench-delay needs --change: delay is undefined without a change-point")
        return EXIT_USAGE
    try:
        spec = _scenario(args, settings, "delay", with_change=True)
        predictor, config, window = _detector_choice(args, settings)
        summary = DelayExperiment(logger, settings).execute(
            spec,
            predictor,
            config,
            trials=_setting(args.trials, settings.get_int, "delay.trials", 200),
            n_jobs=_setting(args.jobs, settings.get_int, "delay.n_jobs", 1),
            window=window,
            csv_path=args.csv,
        )
    except ConfigError as e:
        logger.error(f"Invalid delay arguments: {e}")
        return EXIT_USAGE
    with ExitStack() as stack:
        dump_json(summary.to_dict(), _open_output(stack, args.output, out))
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _threshold(text: str) -> float:
    value = float(text)
    if not value > 1:
        raise argparse.ArgumentTypeError(f"must be > 1 (got {value})")
    return value


def _add_detector_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--predictor", choices=["knn", "dist-mean", "const"], help="score function")
    parser.add_argument("--k", type=_positive_int, help="neighbours for the knn score")
    parser.add_argument("--window", type=_positive_int, help="keep only this many past observations (default: all)")
    parser.add_argument("--procedure", choices=["rs", "musuc"], help="stopping rule")
    parser.add_argument("--threshold", type=_threshold, help="alarm threshold c > 1")
    parser.add_argument("--output", help="output file (default: stdout)")


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--trials", type=_positive_int, help="number of Monte Carlo trials")
    parser.add_argument("--horizon", type=_positive_int, help="observations per trial (n)")
    parser.add_argument("--dim", type=_positive_int, help="observation dimension")
    parser.add_argument("--pre", help="pre-change distribution, e.g. gaussian:mean=0,scale=1")
    parser.add_argument("--seed", type=int, help="base seed; trial i uses SeedSequence([seed, i])")
    parser.add_argument("--jobs", type=int, help="joblib workers (-1 for all cores)")
    parser.add_argument("--csv", help="write per-trial results to this CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="driftguard", description="Conformal e-value change detection.")
    parser.add_argument("--config", help=f"YAML/JSON defaults (default: {DEFAULT_CONFIG_PATH} if present)")
    commands = parser.add_subparsers(dest="command", required=True)

    detect = commands.add_parser("detect", help="stream observations and emit alarms as JSON Lines")
    detect.add_argument("--input", help="input file, or - for stdin (default)")
    detect.add_argument("--format", choices=["csv", "jsonl"], help="input format (default: from suffix, else csv)")
    detect.add_argument("--columns", help="comma-separated column names or 0-based positions")
    detect.add_argument("--on-bad-record", choices=["fail", "skip"], help="malformed record policy")
    detect.add_argument("--seed", type=int, help="recorded in the log; detection itself uses no randomness")
    _add_detector_flags(detect)

    validate = commands.add_parser("validate", help="Monte Carlo check of the 1/c false-alarm bound")
    validate.add_argument("--epsilon", type=float, help="excess over 1/c counted as a violation")
    validate.add_argument("--slack", type=float, help="largest admissible exceed fraction")
    _add_experiment_flags(validate)
    _add_detector_flags(validate)

    bench = commands.add_parser("bench-delay", help="exploratory detection-delay benchmark")
    bench.add_argument("--change", type=_positive_int, help="1-based index of the first post-change observation")
    bench.add_argument("--post", help="post-change distribution, e.g. gaussian:mean=3,scale=1")
    _add_experiment_flags(bench)
    _add_detector_flags(bench)
    return parser


def _load_settings(path: Optional[str]) -> ConfigManager:
    ConfigManager.reset()
    if path is None and Path(DEFAULT_CONFIG_PATH).exists():
        path = DEFAULT_CONFIG_PATH
    return ConfigManager(path)


def _run_config(args: argparse.Namespace, settings: ConfigManager) -> RunConfig:
    fmt = args.format or RecordSourceFactory.format_for_path(args.input)
    if fmt is not None:
        RecordSourceFactory.create(fmt)
    return RunConfig(
        input=args.input,
        format=fmt or settings.get("ingestion.format", "csv"),
        columns=parse_columns(args.columns),
        predictor=args.predictor or settings.get("predictor.name", "knn"),
        k=args.k if args.k is not None else settings.get_int("predictor.k", 1),
        window=args.window if args.window is not None else settings.get_int("predictor.window", None),
        procedure=args.procedure or settings.get("detector.procedure", "rs"),
        threshold=args.threshold if args.threshold is not None else settings.get_float("detector.threshold", 20.0),
        on_bad_record=args.on_bad_record or settings.get("ingestion.on_bad_record", "fail"),
        output=args.output,
        seed=args.seed,
    )


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = _load_settings(args.config)
    except (OSError, ValueError) as e:
        parser.error(f"cannot load config: {e}")
    get_logger(LoggerConfig.from_settings(settings))

    if args.command == "detect":
        try:
            config = _run_config(args, settings)
        except ConfigError as e:
            parser.error(str(e))
        return cmd_detect(config, out)
    if args.command == "validate":
        return cmd_validate(args, out)
    return cmd_bench_delay(args, out)
