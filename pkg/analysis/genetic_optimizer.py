"""
Genetic learning of the Part-1 knowledge base over the 266-gene chromosome.
"""

import logging
from typing import List, Optional

import numpy as np

from analysis.encoding import (
    HEDGES, Chromosome, KnowledgeLayout, decode_chromosome, encode_chromosome,
)
from analysis.learning import FitnessEvaluator, LearnConfig, LearnReport, log_progress
from core.fuzzy_system import baseline_part1_system
from data.models import Dataset, FuzzySystem

logger = logging.getLogger(__name__)

TOURNAMENT_SIZE = 3


class GeneticOptimizer:
    """Generational GA with elitism of one and tournament selection."""

    def __init__(self, template: FuzzySystem, config: LearnConfig, fold: int = 0):
        self.template = template
        self.config = config
        self.fold = fold
        self.layout = KnowledgeLayout(template)
        self.baseline = encode_chromosome(template)
        self.n_knowledge = len(self.layout.slices)

    def _rng(self, generation: int) -> np.random.Generator:
        return np.random.default_rng([self.config.seed, self.fold, generation])

    def unpack(self, chromosome: Chromosome):
        return self.layout.shapes(chromosome.knowledge), chromosome.weights, chromosome.hedges

    def mutate(self, chromosome: Chromosome, rng: np.random.Generator) -> Chromosome:
        n_weights = len(chromosome.weights)
        hit = rng.random(self.baseline.gene_count) < self.config.mutation_rate
        for g in np.flatnonzero(hit[:self.n_knowledge]):
            block = self.layout.slices[g]
            index = block.start + int(rng.integers(block.stop - block.start))
            sigma = self.config.mutation_sigma * self.layout.widths[index]
            chromosome.knowledge[index] += rng.normal(0.0, sigma)
        weight_hits = np.flatnonzero(hit[self.n_knowledge:self.n_knowledge + n_weights])
        chromosome.weights[weight_hits] = rng.random(len(weight_hits))
        hedge_hits = np.flatnonzero(hit[self.n_knowledge + n_weights:])
        chromosome.hedges[hedge_hits] = rng.integers(len(HEDGES), size=len(hedge_hits))
        chromosome.knowledge = self.layout.repair(chromosome.knowledge)
        return chromosome

    def crossover(self, first: Chromosome, second: Chromosome, rng: np.random.Generator) -> Chromosome:
        """Uniform crossover; each knowledge gene moves as a whole parameter block."""
        child = first.copy()
        take = rng.random(self.baseline.gene_count) < 0.5
        for g in np.flatnonzero(take[:self.n_knowledge]):
            block = self.layout.slices[g]
            child.knowledge[block] = second.knowledge[block]
        n_weights = len(child.weights)
        weight_mask = take[self.n_knowledge:self.n_knowledge + n_weights]
        child.weights[weight_mask] = second.weights[weight_mask]
        hedge_mask = take[self.n_knowledge + n_weights:]
        child.hedges[hedge_mask] = second.hedges[hedge_mask]
        return child

    def _tournament(self, fitness: np.ndarray, rng: np.random.Generator) -> int:
        entrants = rng.integers(len(fitness), size=TOURNAMENT_SIZE)
        return int(entrants[np.argmin(fitness[entrants])])

    def initial_population(self) -> List[Chromosome]:
        rng = self._rng(0)
        population = [self.baseline.copy()]
        while len(population) < self.config.population_size:
            population.append(self.mutate(self.baseline.copy(), rng))
        return population

    def breed(self, population: List[Chromosome], fitness: np.ndarray,
              rng: np.random.Generator) -> List[Chromosome]:
        offspring = [population[int(np.argmin(fitness))].copy()]
        while len(offspring) < len(population):
            first = population[self._tournament(fitness, rng)]
            second = population[self._tournament(fitness, rng)]
            if rng.random() < self.config.crossover_rate:
                child = self.crossover(first, second, rng)
            else:
                child = first.copy()
            offspring.append(self.mutate(child, rng))
        return offspring

    def run(self, evaluator: FitnessEvaluator) -> LearnReport:
        generations = self.config.generations
        population = self.initial_population()
        best: Optional[Chromosome] = None
        best_mse = np.inf
        history: List[float] = []

        for generation in range(generations):
            if generation > 0:
                population = self.breed(population, fitness, self._rng(generation))
            fitness = evaluator.evaluate_all(population, self.unpack)
            leader = int(np.argmin(fitness))
            if fitness[leader] < best_mse:
                best_mse = float(fitness[leader])
                best = population[leader].copy()
            history.append(best_mse)
            log_progress("GA", generation + 1, generations, best_mse)

        return LearnReport(best_system=decode_chromosome(best), history_best_mse=history,
                           config=self.config)


def ga_optimize(train_set: Dataset, config: LearnConfig, template: Optional[FuzzySystem] = None,
                fold: int = 0) -> LearnReport:
    """Learn shapes, rule weights and hedges on train_set; returns the best-ever individual."""
    if config.method != "GA":
        raise ValueError(f"ga_optimize needs method GA, got {config.method}")
    template = template or baseline_part1_system()
    evaluator = FitnessEvaluator(template, train_set, workers=config.workers)
    logger.info(f"GA fold {fold}: {config.population_size} individuals x "
                f"{config.generations} generations on {len(train_set)} records")
    return GeneticOptimizer(template, config, fold).run(evaluator)
