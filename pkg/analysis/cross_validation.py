"""
K-fold evaluation of knowledge-base learning.
"""

import logging
from typing import Optional

import numpy as np

from analysis.genetic_optimizer import ga_optimize
from analysis.learning import FoldResult, LearnConfig, LearnReport, mse
from analysis.swarm_optimizer import pso_optimize
from core.fuzzy_system import baseline_part1_system
from data.dataset_generator import kfold_split
from data.models import Dataset, FuzzySystem

logger = logging.getLogger(__name__)

OPTIMIZERS = {"GA": ga_optimize, "PSO": pso_optimize}


def optimize(train_set: Dataset, config: LearnConfig, template: Optional[FuzzySystem] = None,
             fold: int = 0) -> LearnReport:
    return OPTIMIZERS[config.method](train_set, config, template=template, fold=fold)


def cross_validate(dataset: Dataset, config: LearnConfig,
                   template: Optional[FuzzySystem] = None) -> LearnReport:
    """
    Learn on each training split and score on the held-out split.

    The returned report carries the learned system of the fold with the
    lowest test MSE, that fold's history, and one FoldResult per fold with
    before/after MSE on both splits.
    """
    template = template or baseline_part1_system()
    folds = kfold_split(dataset, k=config.k_folds, seed=config.seed)
    logger.info(f"{config.method} {config.k_folds}-fold cross validation on {len(dataset)} records")

    results = []
    reports = []
    for fold, (train, test) in enumerate(folds):
        report = optimize(train, config, template=template, fold=fold)
        result = FoldResult(
            fold=fold,
            train_records=len(train),
            test_records=len(test),
            before_train_mse=mse(template, train),
            before_test_mse=mse(template, test),
            train_mse=mse(report.best_system, train),
            test_mse=mse(report.best_system, test),
            history_best_mse=list(report.history_best_mse),
        )
        logger.info(f"Fold {fold}: test MSE {result.before_test_mse:.6f} -> {result.test_mse:.6f}")
        results.append(result)
        reports.append(report)

    best_fold = int(np.argmin([r.test_mse for r in results]))
    aggregated = LearnReport(
        best_system=reports[best_fold].best_system,
        history_best_mse=list(reports[best_fold].history_best_mse),
        config=config,
        fold_results=results,
        best_fold=best_fold,
    )
    logger.info(f"{config.method} mean test MSE {aggregated.before_mse:.6f} -> {aggregated.after_mse:.6f}")
    return aggregated
