import sys
sys.path.insert(0, '.')

from src.detector.stopping_rules import DetectorConfig
from src.epredictor.scores import ScoreFunctionFactory
from src.sim.components import DelayExperiment
from src.sim.scenario import DistributionSpec, ScenarioSpec
from src.utils.config import ConfigManager
from src.utils.logger import LoggerConfig, get_logger

config = ConfigManager('configs/driftguard.yaml')
logger = get_logger(LoggerConfig.from_settings(config))
predictor = ScoreFunctionFactory.create(config.get('predictor.name', 'knn'), k=config.get_int('predictor.k', 1))

spec = ScenarioSpec(
    pre_change=DistributionSpec.parse(config.get('delay.pre_change', 'gaussian')),
    post_change=DistributionSpec.parse(config.get('delay.post_change', 'gaussian:mean=3')),
    change_at=config.get_int('delay.change_at', 500),
    n=config.get_int('delay.horizon', 1000),
    seed=config.get_int('delay.seed', 0),
    dim=config.get_int('delay.dim', 1),
)
for procedure in ('rs', 'musuc'):
    DelayExperiment(logger, config).execute(
        spec,
        predictor,
        DetectorConfig(config.get_float('detector.threshold', 20.0), procedure),
        trials=config.get_int('delay.trials', 200),
        n_jobs=config.get_int('delay.n_jobs', 1),
        window=config.get_int('predictor.window', None),
        report_path=f"{procedure}_{config.get('delay.report_name', 'delay_report.json')}",
        csv_path=f"{procedure}_{config.get('delay.csv_name', 'delay_trials.csv')}",
    )
