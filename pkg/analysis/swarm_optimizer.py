"""
Global-best particle swarm tuning of the 84 Part-1 membership parameters.
Rule weights stay at 1.0 and hedges at None.
"""

import logging
from typing import List, Optional

import numpy as np

from analysis.encoding import KnowledgeLayout, decode_particle, encode_particle
from analysis.learning import FitnessEvaluator, LearnConfig, LearnReport, log_progress
from core.fuzzy_system import baseline_part1_system
from data.models import Dataset, FuzzySystem

logger = logging.getLogger(__name__)


class SwarmOptimizer:

    def __init__(self, template: FuzzySystem, config: LearnConfig, fold: int = 0):
        self.template = template
        self.config = config
        self.fold = fold
        self.layout = KnowledgeLayout(template)
        self.v_max = config.velocity_clamp_fraction * self.layout.widths
        n_vars = len(self.layout.variables)
        self._weights = np.ones(len(template.rules))
        self._hedges = np.zeros(n_vars, dtype=int)

    def _rng(self, iteration: int) -> np.random.Generator:
        return np.random.default_rng([self.config.seed, self.fold, iteration])

    def unpack(self, position: np.ndarray):
        return self.layout.shapes(position), self._weights, self._hedges

    def initial_positions(self) -> np.ndarray:
        """Particle 0 sits on the template; the rest are uniform per dimension."""
        rng = self._rng(0)
        n = self.config.population_size
        positions = np.empty((n, self.layout.size))
        positions[0] = encode_particle(self.template)
        if n > 1:
            positions[1:] = rng.uniform(self.layout.lows, self.layout.highs, size=(n - 1, self.layout.size))
        return positions

    def move(self, positions, velocities, pbest, gbest, rng: np.random.Generator):
        r1 = rng.random(positions.shape)
        r2 = rng.random(positions.shape)
        velocities = (self.config.inertia * velocities
                      + self.config.cognitive * r1 * (pbest - positions)
                      + self.config.social * r2 * (gbest[None, :] - positions))
        velocities = np.clip(velocities, -self.v_max, self.v_max)
        positions = np.clip(positions + velocities, self.layout.lows, self.layout.highs)
        return positions, velocities

    def run(self, evaluator: FitnessEvaluator) -> LearnReport:
        iterations = self.config.generations
        positions = self.initial_positions()
        velocities = np.zeros_like(positions)
        fitness = evaluator.evaluate_all(positions, self.unpack)
        pbest, pbest_fitness = positions.copy(), fitness.copy()
        leader = int(np.argmin(pbest_fitness))
        gbest, gbest_fitness = pbest[leader].copy(), float(pbest_fitness[leader])
        history: List[float] = []

        for iteration in range(iterations):
            positions, velocities = self.move(positions, velocities, pbest, gbest, self._rng(iteration + 1))
            fitness = evaluator.evaluate_all(positions, self.unpack)
            improved = fitness < pbest_fitness
            pbest[improved] = positions[improved]
            pbest_fitness[improved] = fitness[improved]
            leader = int(np.argmin(pbest_fitness))
            if pbest_fitness[leader] < gbest_fitness:
                gbest, gbest_fitness = pbest[leader].copy(), float(pbest_fitness[leader])
            history.append(gbest_fitness)
            log_progress("PSO", iteration + 1, iterations, gbest_fitness)

        return LearnReport(best_system=decode_particle(gbest, self.template),
                           history_best_mse=history, config=self.config)


def pso_optimize(train_set: Dataset, config: LearnConfig, template: Optional[FuzzySystem] = None,
                 fold: int = 0) -> LearnReport:
    """Tune membership shapes on train_set; returns the global-best particle's system."""
    if config.method != "PSO":
        raise ValueError(f"pso_optimize needs method PSO, got {config.method}")
    template = template or baseline_part1_system()
    evaluator = FitnessEvaluator(template, train_set, workers=config.workers)
    logger.info(f"PSO fold {fold}: {config.population_size} particles x "
                f"{config.generations} iterations on {len(train_set)} records")
    return SwarmOptimizer(template, config, fold).run(evaluator)
