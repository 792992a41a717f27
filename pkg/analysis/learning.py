"""
Shared pieces of knowledge-base learning: configuration, reports, and the
MSE fitness used by both optimizers.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from config import config
from core.exceptions import EmptyDataset, SchemaMismatch
from core.inference import FuzzyInferenceEngine, inference_engine
from data.models import Dataset, FuzzySystem

logger = logging.getLogger(__name__)

METHODS = ("GA", "PSO")


@dataclass
class LearnConfig:
    """Optimizer settings; unset fields fall back to the global config."""
    method: str = "GA"
    generations: int = 300
    population_size: int = 50
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    mutation_sigma: float = 0.05
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    velocity_clamp_fraction: float = 0.2
    k_folds: int = 5
    seed: int = 42
    workers: int = 1

    def __post_init__(self):
        self.method = self.method.upper()
        if self.method not in METHODS:
            raise ValueError(f"Unknown learning method {self.method!r}")
        if self.generations < 1:
            raise ValueError("generations must be at least 1")
        if self.population_size < 1:
            raise ValueError("population_size must be at least 1")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    @classmethod
    def from_config(cls, method: str, **overrides) -> "LearnConfig":
        """Defaults from the global config, population size chosen per method."""
        method = method.upper()
        values = dict(
            method=method,
            generations=config.GENERATIONS,
            population_size=config.PSO_SWARM_SIZE if method == "PSO" else config.GA_POPULATION,
            crossover_rate=config.GA_CROSSOVER_RATE,
            mutation_rate=config.GA_MUTATION_RATE,
            mutation_sigma=config.GA_MUTATION_SIGMA,
            inertia=config.PSO_INERTIA,
            cognitive=config.PSO_COGNITIVE,
            social=config.PSO_SOCIAL,
            velocity_clamp_fraction=config.PSO_VELOCITY_CLAMP,
            k_folds=config.KFOLD_K,
            seed=config.SEED,
            workers=config.LEARN_WORKERS,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class FoldResult:
    fold: int
    train_records: int
    test_records: int
    before_train_mse: float
    before_test_mse: float
    train_mse: float
    test_mse: float
    history_best_mse: List[float] = field(default_factory=list)


@dataclass
class LearnReport:
    best_system: FuzzySystem
    history_best_mse: List[float]
    config: LearnConfig
    fold_results: List[FoldResult] = field(default_factory=list)
    best_fold: Optional[int] = None

    @property
    def before_mse(self) -> Optional[float]:
        """Mean before-learning test MSE over folds."""
        if not self.fold_results:
            return None
        return float(np.mean([f.before_test_mse for f in self.fold_results]))

    @property
    def after_mse(self) -> Optional[float]:
        """Mean after-learning test MSE over folds."""
        if not self.fold_results:
            return None
        return float(np.mean([f.test_mse for f in self.fold_results]))

    @property
    def mean_train_mse(self) -> Optional[float]:
        if not self.fold_results:
            return None
        return float(np.mean([f.train_mse for f in self.fold_results]))

    @property
    def final_mse(self) -> float:
        return self.history_best_mse[-1]


def aligned_matrix(system: FuzzySystem, dataset: Dataset) -> np.ndarray:
    names = [v.name for v in system.input_variables]
    missing = [n for n in names if n not in dataset.schema]
    if missing:
        raise SchemaMismatch(f"Dataset schema {dataset.schema} lacks inputs {missing}")
    matrix = dataset.input_matrix()
    return matrix[:, [dataset.schema.index(n) for n in names]]


def mse(system: FuzzySystem, dataset: Dataset, engine: Optional[FuzzyInferenceEngine] = None) -> float:
    """Mean squared error of the system's crisp outputs against desired values."""
    if len(dataset) == 0:
        raise EmptyDataset("Cannot compute MSE on an empty dataset")
    engine = engine or inference_engine
    predicted = engine.predict(system, aligned_matrix(system, dataset))
    return float(np.mean((predicted - dataset.desired_vector()) ** 2))


class FitnessEvaluator:
    """MSE of re-parameterised copies of one template system on a fixed dataset."""

    def __init__(self, template: FuzzySystem, dataset: Dataset, workers: int = 1,
                 engine: Optional[FuzzyInferenceEngine] = None):
        if len(dataset) == 0:
            raise EmptyDataset("Cannot learn from an empty dataset")
        engine = engine or inference_engine
        self.compiled = engine.compile(template)
        lows = np.array([v.domain_left for v in template.input_variables])
        highs = np.array([v.domain_right for v in template.input_variables])
        self.matrix = np.clip(aligned_matrix(template, dataset), lows, highs)
        self.desired = dataset.desired_vector()
        self.workers = max(1, workers)

    def __call__(self, shapes: Sequence[np.ndarray], weights: Optional[np.ndarray] = None,
                 hedge_codes: Optional[Sequence[int]] = None) -> float:
        candidate = self.compiled.with_parameters(shapes, weights, hedge_codes)
        predicted, _ = candidate.evaluate(self.matrix)
        return float(np.mean((predicted - self.desired) ** 2))

    def evaluate_all(self, candidates: Sequence, unpack: Callable) -> np.ndarray:
        """
        Fitness of every candidate, in candidate order. unpack maps a
        candidate to (shapes, weights, hedge_codes). Results do not depend
        on the worker count.
        """
        jobs = [unpack(c) for c in candidates]
        if self.workers == 1 or len(jobs) == 1:
            return np.array([self(*job) for job in jobs])
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return np.array(list(pool.map(lambda job: self(*job), jobs)))


def log_progress(method: str, generation: int, total: int, best: float):
    step = max(1, total // 10)
    if generation == 1 or generation == total or generation % step == 0:
        logger.info(f"{method} generation {generation}/{total} | best MSE: {best:.6f}")
