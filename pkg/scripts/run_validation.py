import sys
from pathlib import Path
sys.path.insert(0, '.')

from src.detector.stopping_rules import DetectorConfig
from src.epredictor.scores import ScoreFunctionFactory
from src.sim.experiments import e_value_mean_experiment
from src.sim.components import ValidityExperiment
from src.sim.reporting import save_json
from src.sim.scenario import DistributionSpec, ScenarioSpec
from src.utils.config import ConfigManager
from src.utils.logger import LoggerConfig, get_logger

config = ConfigManager('configs/driftguard.yaml')
logger = get_logger(LoggerConfig.from_settings(config))
predictor = ScoreFunctionFactory.create(config.get('predictor.name', 'knn'), k=config.get_int('predictor.k', 1))
report_dir = config.get('reports.dir', 'reports')

# mean-one check of E_n at fixed n
mean_spec = ScenarioSpec(
    pre_change=DistributionSpec.parse(config.get('mean_check.pre_change', 'gaussian')),
    n=config.get_int('mean_check.horizon', 50),
    seed=config.get_int('mean_check.seed', 0),
)
means = e_value_mean_experiment(
    mean_spec,
    predictor,
    trials=config.get_int('mean_check.trials', 2000),
    checkpoints=config.get('mean_check.checkpoints', [2, 10, 50]),
    n_jobs=config.get_int('mean_check.n_jobs', 1),
)
for result in means:
    logger.info(f"E_{result.n}: mean {result.mean:.4f} ± {result.std_error:.4f} (within 3 SE: {result.within_three_se})")
mean_path = save_json(
    {"checkpoints": [m.to_dict() for m in means]},
    Path(report_dir) / config.get('mean_check.report_name', 'mean_check.json'),
)
logger.info(f"✓ Mean check saved to: {mean_path}")

all_passed = all(m.within_three_se for m in means)
for procedure in ('rs', 'musuc'):
    report = ValidityExperiment(logger, config).execute(
        ScenarioSpec(
            pre_change=DistributionSpec.parse(config.get('validity.pre_change', 'gaussian')),
            n=config.get_int('validity.horizon', 20000),
            seed=config.get_int('validity.seed', 0),
            dim=config.get_int('validity.dim', 1),
        ),
        predictor,
        DetectorConfig(config.get_float('detector.threshold', 20.0), procedure),
        trials=config.get_int('validity.trials', 500),
        epsilon=config.get_float('validity.epsilon', 0.02),
        slack=config.get_float('validity.slack', 0.05),
        n_jobs=config.get_int('validity.n_jobs', 1),
        window=config.get_int('predictor.window', None),
        report_path=f"{procedure}_{config.get('validity.report_name', 'validity_report.json')}",
        csv_path=f"{procedure}_{config.get('validity.csv_name', 'validity_trials.csv')}",
    )
    all_passed = all_passed and report.passes(config.get_float('validity.slack', 0.05))

sys.exit(0 if all_passed else 1)
