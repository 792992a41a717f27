"""
Rule base construction for both experiment stages.

The student-learning-performance base enumerates all 4^4 antecedent
combinations (SA outermost, STS innermost) and assigns each a consequent
from an integer score; the learning-content base is the fixed 20-row table.
"""

import itertools
import logging
from typing import List, Sequence, Tuple

from data.models import Rule

logger = logging.getLogger(__name__)

SA_TERMS = ("BelowBasic", "Basic", "Proficient", "Advanced")
LCD_TERMS = ("VeryEasy", "Easy", "Average", "Hard")
SCL_TERMS = ("Distracted", "Nonfocused", "Focused", "Absorbed")
STS_TERMS = ("Passive", "Normal", "Initiative", "Positive")
SLP_TERMS = ("FallBehind", "Insufficient", "Basic", "Good", "Excellent")
RLCR_TERMS = ("LGHIL", "LGAL", "CGEL", "CGIL", "CGHIL", "CGAL", "NGEL", "NGIL")

PART1_INPUTS = (("SA", SA_TERMS), ("LCD", LCD_TERMS), ("SCL", SCL_TERMS), ("STS", STS_TERMS))

# Upper score bound of each SLP category; anything above the last is Excellent.
SLP_SCORE_THRESHOLDS = (3, 6, 9, 11)

# (SA, SLP) -> RLCR, in published row order
RLCR_TABLE: Tuple[Tuple[str, str, str], ...] = (
    ("BelowBasic", "FallBehind", "LGHIL"),
    ("BelowBasic", "Insufficient", "LGAL"),
    ("BelowBasic", "Basic", "LGAL"),
    ("BelowBasic", "Good", "CGEL"),
    ("BelowBasic", "Excellent", "CGIL"),
    ("Basic", "FallBehind", "LGAL"),
    ("Basic", "Insufficient", "CGEL"),
    ("Basic", "Basic", "CGIL"),
    ("Basic", "Good", "CGHIL"),
    ("Basic", "Excellent", "CGAL"),
    ("Proficient", "FallBehind", "CGIL"),
    ("Proficient", "Insufficient", "CGHIL"),
    ("Proficient", "Basic", "CGAL"),
    ("Proficient", "Good", "CGAL"),
    ("Proficient", "Excellent", "NGEL"),
    ("Advanced", "FallBehind", "CGAL"),
    ("Advanced", "Insufficient", "CGAL"),
    ("Advanced", "Basic", "NGEL"),
    ("Advanced", "Good", "NGIL"),
    ("Advanced", "Excellent", "NGIL"),
)


def slp_score(indices: Sequence[int]) -> int:
    """Integer score of a (SA, LCD, SCL, STS) term-index tuple."""
    i_sa, i_lcd, i_scl, i_sts = indices
    for value in indices:
        if not 0 <= value <= 3:
            raise ValueError(f"Term index out of range: {tuple(indices)}")
    return 4 * i_sa - i_lcd + i_scl + i_sts


def slp_category(indices: Sequence[int]) -> int:
    """Index into SLP_TERMS for a (SA, LCD, SCL, STS) term-index tuple."""
    score = slp_score(indices)
    for category, upper in enumerate(SLP_SCORE_THRESHOLDS):
        if score <= upper:
            return category
    return len(SLP_SCORE_THRESHOLDS)


def decode_rule_number(k: int) -> Tuple[int, int, int, int]:
    """1-based rule number to its base-4 term indices (SA most significant)."""
    if not 1 <= k <= 256:
        raise ValueError(f"Rule number {k} outside 1..256")
    k -= 1
    return (k // 64, (k // 16) % 4, (k // 4) % 4, k % 4)


def build_slp_rulebase(weight: float = 1.0) -> List[Rule]:
    """All 256 student-learning-performance rules."""
    rules = []
    combos = itertools.product(range(4), repeat=4)
    for number, indices in enumerate(combos, start=1):
        antecedent = tuple(
            (var_name, terms[idx]) for (var_name, terms), idx in zip(PART1_INPUTS, indices)
        )
        consequent = ("SLP", SLP_TERMS[slp_category(indices)])
        rules.append(Rule(name=f"rule-{number}", antecedent=antecedent,
                          consequent=consequent, weight=weight))
    logger.debug(f"Built {len(rules)} SLP rules")
    return rules


def build_rlcr_rulebase(weight: float = 1.0) -> List[Rule]:
    """The 20 learning-content recommendation rules."""
    return [
        Rule(name=f"rule-{number}",
             antecedent=(("SA", sa), ("SLP", slp)),
             consequent=("RLCR", rlcr),
             weight=weight)
        for number, (sa, slp, rlcr) in enumerate(RLCR_TABLE, start=1)
    ]
