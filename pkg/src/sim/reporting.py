import json
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO

import pandas as pd

from src.sim.experiments import TrialReport


def dump_json(report: Dict[str, Any], handle: TextIO) -> None:
    handle.write(json.dumps(report, sort_keys=True) + "\n")
    handle.flush()


def save_json(report: Dict[str, Any], save_path: Path) -> Path:
    save_path.parent.mkdir(parents=True, exist_ok=True)
    with open(save_path, "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
    return save_path


def trials_frame(trials: List[TrialReport], change_at: Optional[int] = None) -> pd.DataFrame:
    frame = pd.DataFrame([t.to_dict() for t in trials])
    frame.insert(0, "trial", range(len(trials)))
    if change_at is None:
        frame = frame.drop(columns=["delay"])
    return frame


def save_trials_csv(trials: List[TrialReport], save_path: Path, change_at: Optional[int] = None) -> Path:
    save_path.parent.mkdir(parents=True, exist_ok=True)
    trials_frame(trials, change_at).to_csv(save_path, index=False)
    return save_path
