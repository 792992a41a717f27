"""
Genome layouts for knowledge-base learning.

Chromosome (266 genes): five knowledge genes (the trapezoid parameters of
SA, LCD, SCL, STS and SLP; 16+16+16+16+20 reals), 256 rule-weight genes and
five hedge genes, one per variable.

Particle (84 reals): the same trapezoid parameters without weights or hedges.
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Tuple

import numpy as np

from core.exceptions import ShapeMismatch
from core.inference import HEDGE_CODES
from data.models import FuzzySystem, FuzzyVariable, Hedge, Rule, TrapezoidShape

logger = logging.getLogger(__name__)

HEDGES = (Hedge.NONE, Hedge.VERY, Hedge.MORE_OR_LESS)
PART1_TERM_COUNTS = (4, 4, 4, 4, 5)
PART1_RULE_COUNT = 256
PARTICLE_DIMENSIONS = 4 * sum(PART1_TERM_COUNTS)  # 84
CHROMOSOME_GENES = len(PART1_TERM_COUNTS) + PART1_RULE_COUNT + len(PART1_TERM_COUNTS)  # 266


def learnable_variables(system: FuzzySystem) -> List[FuzzyVariable]:
    """Inputs in order, then the output; checks the 4x4 + 5 / 256-rule layout."""
    variables = system.input_variables + [system.output_variable]
    counts = tuple(len(v.terms) for v in variables)
    if counts != PART1_TERM_COUNTS or len(system.rules) != PART1_RULE_COUNT:
        raise ShapeMismatch(
            f"Expected term counts {PART1_TERM_COUNTS} and {PART1_RULE_COUNT} rules, "
            f"got {counts} and {len(system.rules)}")
    return variables


class KnowledgeLayout:
    """Slices, bounds and repair for the flat 84-parameter shape vector."""

    def __init__(self, system: FuzzySystem):
        self.variables = learnable_variables(system)
        self.slices: List[slice] = []
        start = 0
        for var in self.variables:
            stop = start + 4 * len(var.terms)
            self.slices.append(slice(start, stop))
            start = stop
        self.size = start
        self.lows = np.concatenate([np.full(s.stop - s.start, v.domain_left)
                                    for v, s in zip(self.variables, self.slices)])
        self.highs = np.concatenate([np.full(s.stop - s.start, v.domain_right)
                                     for v, s in zip(self.variables, self.slices)])
        self.widths = self.highs - self.lows

    def flatten(self, system: FuzzySystem) -> np.ndarray:
        variables = learnable_variables(system)
        return np.array([p for var in variables for t in var.terms for p in t.shape.as_tuple()], dtype=float)

    def repair(self, vector: np.ndarray) -> np.ndarray:
        """Sort each term's four params ascending and clamp into the variable domain."""
        terms = np.sort(np.asarray(vector, dtype=float).reshape(-1, 4), axis=1).reshape(-1)
        return np.clip(terms, self.lows, self.highs)

    def shapes(self, vector: np.ndarray) -> List[np.ndarray]:
        """Repaired (T, 4) parameter blocks per variable."""
        repaired = self.repair(vector)
        return [repaired[s].reshape(-1, 4) for s in self.slices]

    def assemble(self, template: FuzzySystem, vector: np.ndarray, weights: np.ndarray,
                 hedge_codes: np.ndarray) -> FuzzySystem:
        """Rebuild a fuzzy system from repaired parameters."""
        blocks = dict(zip((v.name for v in self.variables), self.shapes(vector)))
        hedges = dict(zip((v.name for v in self.variables), (HEDGES[int(c)] for c in hedge_codes)))
        variables = []
        for var in template.variables:
            block = blocks[var.name]
            terms = tuple(
                replace(term, shape=TrapezoidShape(*(float(p) for p in block[i])), hedge=hedges[var.name])
                for i, term in enumerate(var.terms)
            )
            variables.append(FuzzyVariable(
                name=var.name, domain_left=var.domain_left, domain_right=var.domain_right,
                kind=var.kind, terms=terms, accumulation=var.accumulation,
                defuzzifier=var.defuzzifier, default_value=var.default_value))
        weights = np.clip(np.asarray(weights, dtype=float), 0.0, 1.0)
        rules = tuple(
            Rule(name=rule.name, antecedent=rule.antecedent, consequent=rule.consequent,
                 weight=float(w), connector=rule.connector, and_method=rule.and_method,
                 or_method=rule.or_method)
            for rule, w in zip(template.rules, weights)
        )
        return FuzzySystem(name=template.name, variables=tuple(variables), rules=rules,
                           network_address=template.network_address)


@dataclass
class Chromosome:
    knowledge: np.ndarray  # (84,) trapezoid params, one gene block per variable
    weights: np.ndarray    # (256,) rule weights
    hedges: np.ndarray     # (5,) hedge codes, one per variable
    template: FuzzySystem

    @property
    def knowledge_genes(self) -> List[np.ndarray]:
        layout = KnowledgeLayout(self.template)
        return [self.knowledge[s] for s in layout.slices]

    @property
    def gene_count(self) -> int:
        return len(PART1_TERM_COUNTS) + len(self.weights) + len(self.hedges)

    def copy(self) -> "Chromosome":
        return Chromosome(self.knowledge.copy(), self.weights.copy(), self.hedges.copy(), self.template)


def encode_chromosome(system: FuzzySystem) -> Chromosome:
    """Raises ShapeMismatch when a variable's terms carry different hedges."""
    layout = KnowledgeLayout(system)
    for var in layout.variables:
        hedges = {term.hedge for term in var.terms}
        if len(hedges) > 1:
            raise ShapeMismatch(
                f"{var.name}: terms use hedges {sorted(h.value for h in hedges)}, "
                f"one hedge gene per variable needs a single hedge")
    hedge_codes = np.array([HEDGE_CODES[var.terms[0].hedge] for var in layout.variables], dtype=int)
    return Chromosome(
        knowledge=layout.flatten(system),
        weights=np.array([rule.weight for rule in system.rules], dtype=float),
        hedges=hedge_codes,
        template=system,
    )


def decode_chromosome(chromosome: Chromosome) -> FuzzySystem:
    layout = KnowledgeLayout(chromosome.template)
    return layout.assemble(chromosome.template, chromosome.knowledge, chromosome.weights, chromosome.hedges)


def encode_particle(system: FuzzySystem) -> np.ndarray:
    return KnowledgeLayout(system).flatten(system)


def decode_particle(position: np.ndarray, template: FuzzySystem) -> FuzzySystem:
    """Shapes from the position; rule weights 1.0 and no hedges."""
    layout = KnowledgeLayout(template)
    return layout.assemble(template, position, np.ones(len(template.rules)),
                           np.zeros(len(layout.variables), dtype=int))


def particle_bounds(system: FuzzySystem) -> Tuple[np.ndarray, np.ndarray]:
    layout = KnowledgeLayout(system)
    return layout.lows.copy(), layout.highs.copy()
