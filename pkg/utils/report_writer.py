"""
Experiment artifacts: learning reports (JSON), per-generation MSE series and
per-record Part-2 tables (CSV).
"""

import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Dict, Optional

import pandas as pd

from analysis.learning import LearnReport

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6f"


def report_to_dict(report: LearnReport, extra: Optional[Dict] = None) -> Dict:
    payload = {
        "config": report.config.to_dict(),
        "before_mse": report.before_mse,
        "after_mse": report.after_mse,
        "mean_train_mse": report.mean_train_mse,
        "best_fold": report.best_fold,
        "history_best_mse": list(report.history_best_mse),
        "folds": [asdict(fold) for fold in report.fold_results],
    }
    if extra:
        payload.update(extra)
    return payload


def write_json(payload: Dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")
    logger.info(f"Wrote {path}")
    return path


def write_report(report: LearnReport, path, extra: Optional[Dict] = None) -> Path:
    return write_json(report_to_dict(report, extra), path)


def read_report(path) -> Dict:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def history_frame(report: LearnReport) -> pd.DataFrame:
    """fold, generation, best_mse rows; a single run is reported as fold 0."""
    folds = report.fold_results
    series = [(f.fold, f.history_best_mse) for f in folds] if folds else [(0, report.history_best_mse)]
    rows = [
        {"fold": fold, "generation": generation, "best_mse": value}
        for fold, history in series
        for generation, value in enumerate(history, start=1)
    ]
    return pd.DataFrame(rows, columns=["fold", "generation", "best_mse"])


def write_frame(frame: pd.DataFrame, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def write_history(report: LearnReport, path) -> Path:
    return write_frame(history_frame(report), path)
