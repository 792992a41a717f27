"""
Stage two of the pipeline: rank the learning-content level from SA and SLP,
map the rank to a content level and walk the content graph.
"""

import logging
import math
from dataclasses import replace
from enum import IntEnum
from typing import Iterable, List, Optional

import numpy as np
import pandas as pd

from analysis.learning import aligned_matrix
from config import config
from core.exceptions import EmptyDataset, ShapeMismatch, UnknownGrade
from core.fuzzy_system import make_variable
from core.inference import inference_engine
from core.rule_generator import RLCR_TERMS, build_rlcr_rulebase
from data.content_graph import ContentGraph, ContentLevel, ContentNode
from data.models import Dataset, FuzzySystem, VariableKind

logger = logging.getLogger(__name__)

PART2_SYSTEM_NAME = "LCRSystemRB"
RLCR_DOMAIN = (-4.0, 4.0)
RLCR_CENTRES = tuple(-3.5 + i for i in range(len(RLCR_TERMS)))
RLCR_SHAPES = tuple(
    tuple(min(max(p, RLCR_DOMAIN[0]), RLCR_DOMAIN[1]) for p in (c - 0.75, c - 0.25, c + 0.25, c + 0.75))
    for c in RLCR_CENTRES
)


class RankLevel(IntEnum):
    LGHIL = 0
    LGAL = 1
    CGEL = 2
    CGIL = 3
    CGHIL = 4
    CGAL = 5
    NGEL = 6
    NGIL = 7

    @property
    def grade_offset(self) -> int:
        return _LEVEL_TARGETS[self][0]

    @property
    def content_level(self) -> ContentLevel:
        return _LEVEL_TARGETS[self][1]


_LEVEL_TARGETS = {
    RankLevel.LGHIL: (-1, ContentLevel.HIGH_INTERMEDIATE),
    RankLevel.LGAL: (-1, ContentLevel.ADVANCED),
    RankLevel.CGEL: (0, ContentLevel.ELEMENTARY),
    RankLevel.CGIL: (0, ContentLevel.INTERMEDIATE),
    RankLevel.CGHIL: (0, ContentLevel.HIGH_INTERMEDIATE),
    RankLevel.CGAL: (0, ContentLevel.ADVANCED),
    RankLevel.NGEL: (1, ContentLevel.ELEMENTARY),
    RankLevel.NGIL: (1, ContentLevel.INTERMEDIATE),
}


def build_part2_system(learned: FuzzySystem) -> FuzzySystem:
    """SA input and SLP (re-typed as input) copied from a Part-1 system, plus an 8-term RLCR output."""
    sa = learned.variable("SA")
    slp = learned.variable("SLP")
    if sa is None or sa.kind != VariableKind.INPUT:
        raise ShapeMismatch(f"{learned.name} has no SA input variable")
    if slp is None or slp.kind != VariableKind.OUTPUT:
        raise ShapeMismatch(f"{learned.name} has no SLP output variable")
    rlcr = make_variable("RLCR", *RLCR_DOMAIN, VariableKind.OUTPUT, RLCR_TERMS, RLCR_SHAPES)
    variables = (sa, replace(slp, kind=VariableKind.INPUT), rlcr)
    return FuzzySystem(name=PART2_SYSTEM_NAME, variables=variables, rules=tuple(build_rlcr_rulebase()),
                       network_address=learned.network_address)


def rank_to_level(rlcr: float) -> RankLevel:
    """Unit-width bins from -4; out-of-range values clamp to the end bins."""
    clamped = min(max(float(rlcr), RLCR_DOMAIN[0]), RLCR_DOMAIN[1])
    return RankLevel(min(int(math.floor(clamped - RLCR_DOMAIN[0])), len(RankLevel) - 1))


def recommend_contents(graph: ContentGraph, level: RankLevel, current_grade: int,
                       mastered: Iterable[str] = ()) -> List[ContentNode]:
    """
    Contents matching the rank's grade and level, each preceded by its unmet
    prerequisites, in topological order. Mastered ids count as met and are
    left out.
    """
    grade = current_grade + level.grade_offset
    if grade not in graph.grades:
        raise UnknownGrade(f"No contents for grade {grade} ({level.name} from grade {current_grade})")
    mastered = set(mastered)
    selected = [node.id for node in graph.nodes.values()
                if node.grade == grade and node.level == level.content_level and node.id not in mastered]
    if not selected:
        logger.info(f"No {level.content_level.value} contents at grade {grade}")
        return []
    closure = [n for n in graph.prerequisite_closure(selected, mastered) if n not in mastered]
    return [graph[n] for n in graph.topological_order(closure)]


def _predictions(system: FuzzySystem, dataset: Dataset) -> np.ndarray:
    if len(dataset) == 0:
        raise EmptyDataset("Cannot score an empty dataset")
    return inference_engine.predict(system, aligned_matrix(system, dataset))


def accuracy(system: FuzzySystem, dataset: Dataset, threshold: Optional[float] = None) -> float:
    """Fraction of records with |inferred - desired| <= threshold."""
    threshold = config.ACCURACY_THRESHOLD if threshold is None else threshold
    errors = np.abs(_predictions(system, dataset) - dataset.desired_vector())
    return float(np.mean(errors <= threshold))


def level_agreement(system: FuzzySystem, dataset: Dataset) -> float:
    """Fraction of records whose inferred and desired values fall in the same rank bin."""
    predicted = _predictions(system, dataset)
    return float(np.mean([rank_to_level(p) == rank_to_level(d)
                          for p, d in zip(predicted, dataset.desired_vector())]))


def part2_records(system: FuzzySystem, dataset: Dataset, threshold: Optional[float] = None,
                  metric: str = "threshold") -> pd.DataFrame:
    """Per-record inferred/desired table behind the accuracy figures."""
    threshold = config.ACCURACY_THRESHOLD if threshold is None else threshold
    predicted = _predictions(system, dataset)
    frame = dataset.to_frame()
    desired = dataset.desired_vector()
    levels_desired = [rank_to_level(d).name for d in desired]
    levels_inferred = [rank_to_level(p).name for p in predicted]
    if metric == "level":
        correct = [a == b for a, b in zip(levels_desired, levels_inferred)]
    else:
        correct = list(np.abs(predicted - desired) <= threshold)
    return pd.DataFrame({
        "sa": frame["sa"],
        "slp": frame["slp"],
        "rlcr_do": desired,
        "rlcr_inferred": predicted,
        "level_desired": levels_desired,
        "level_inferred": levels_inferred,
        "correct": [bool(c) for c in correct],
    })
