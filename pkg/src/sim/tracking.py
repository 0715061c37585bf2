from typing import Any, Dict, Optional


class ExperimentTracker:
    """Optional MLflow logging of experiment parameters and summary metrics."""
    def __init__(self, logger, enabled: bool = False, experiment_name: str = "driftguard",
                 tracking_uri: Optional[str] = None):
        self.logger = logger
        self.enabled = enabled
        self.experiment_name = experiment_name
        self.tracking_uri = tracking_uri

    def log_run(self, run_name: str, params: Dict[str, Any], metrics: Dict[str, Any]) -> None:
        if not self.enabled:
            return
        try:
            import mlflow

            if self.tracking_uri:
                mlflow.set_tracking_uri(self.tracking_uri)
            mlflow.set_experiment(self.experiment_name)
            with mlflow.start_run(run_name=run_name):
                mlflow.log_params({key: value for key, value in params.items() if value is not None})
                for key, value in metrics.items():
                    if isinstance(value, (int, float)) and not isinstance(value, bool):
                        mlflow.log_metric(key, value)
            self.logger.info(f"Logged {run_name} to MLflow experiment '{self.experiment_name}'")
        except Exception as e:
            self.logger.warning(f"Failed to log {run_name} to MLflow: {e}")
