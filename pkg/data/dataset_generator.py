"""
Seeded synthetic datasets and the desired-output oracles for both stages.

Stage 1 targets come from a continuous version of the rule-base score
(see core.rule_generator) plus Gaussian noise; stage 2 targets follow the
linear rank formula that reproduces the published desired outputs.
"""

import logging
from typing import List, Tuple

import numpy as np
from sklearn.model_selection import KFold

from config import config
from core.exceptions import TooFewRecords
from data.models import Dataset, Record

logger = logging.getLogger(__name__)

PART1_SCHEMA = ("SA", "LCD", "SCL", "STS")
PART1_DOMAINS = ((-4.0, 4.0), (-4.0, 4.0), (0.0, 10.0), (0.0, 10.0))
PART2_SCHEMA = ("SA", "SLP")
PART2_DOMAINS = ((-4.0, 4.0), (0.0, 1.0))

# Published (SA, SLP) pairs with their desired rank
PUBLISHED_RLCR_ROWS: Tuple[Tuple[float, float, float], ...] = (
    (-1.43, 0.111, -1.99067),
    (-1.03, 0.167, -1.57467),
    (-2.23, 0.098, -2.55867),
    (-1.88, 0.11, -2.29333),
    (-3.74, 0.113, -3.52533),
    (-2.87, 0.116, -2.93733),
    (-1.68, 0.153, -2.04533),
    (-0.97, 0.117, -1.668),
    (-1.5, 0.105, -2.05333),
    (-2.65, 0.112, -2.80133),
    (2.87, 0.903, 2.988),
    (3.71, 0.902, 3.545333),
    (1.43, 0.803, 1.761333),
    (1.61, 0.85, 2.006667),
    (1.57, 0.907, 2.132),
)


def _scaled(value: float, left: float, right: float) -> float:
    """Map a domain value linearly onto [0, 3]."""
    return 3.0 * (value - left) / (right - left)


def slp_oracle(sa: float, lcd: float, scl: float, sts: float) -> float:
    """Desired learning performance in [0, 1] for one set of inputs."""
    t_sa, t_lcd, t_scl, t_sts = (
        _scaled(v, lo, hi) for v, (lo, hi) in zip((sa, lcd, scl, sts), PART1_DOMAINS)
    )
    score = 4.0 * t_sa - t_lcd + t_scl + t_sts
    return float(np.clip((score + 3.0) / 21.0, 0.0, 1.0))


def rlcr_oracle(sa: float, slp: float) -> float:
    """Desired content rank in [-4, 4]."""
    return float(np.clip((2.0 * sa + 8.0 * slp - 4.0) / 3.0, -4.0, 4.0))


def published_rlcr_rows() -> List[Tuple[float, float, float]]:
    return list(PUBLISHED_RLCR_ROWS)


def _uniform_inputs(rng: np.random.Generator, n: int, domains) -> np.ndarray:
    lows = np.array([lo for lo, _ in domains])
    highs = np.array([hi for _, hi in domains])
    return rng.uniform(lows, highs, size=(n, len(domains)))


def gen_slp_dataset(n: int = 400, seed: int = 42, noise_sigma: float = None) -> Dataset:
    """Uniform stage-1 inputs with noisy oracle targets clamped to [0, 1]."""
    if n < 1:
        raise ValueError("n must be at least 1")
    noise_sigma = config.NOISE_SIGMA if noise_sigma is None else noise_sigma
    rng = np.random.default_rng(seed)
    matrix = _uniform_inputs(rng, n, PART1_DOMAINS)
    noise = rng.normal(0.0, noise_sigma, size=n) if noise_sigma > 0 else np.zeros(n)
    records = []
    for row, eps in zip(matrix, noise):
        desired = float(np.clip(slp_oracle(*row) + eps, 0.0, 1.0))
        records.append(Record(inputs=dict(zip(PART1_SCHEMA, map(float, row))), desired=desired))
    logger.info(f"Generated {n} SLP records (seed={seed}, sigma={noise_sigma})")
    return Dataset(records=records, schema=list(PART1_SCHEMA), output="SLP", seed=seed)


def gen_rlcr_dataset(n: int = 400, seed: int = 42, include_published_rows: bool = False) -> Dataset:
    """Uniform stage-2 inputs; targets from rlcr_oracle."""
    if n < 0:
        raise ValueError("n must not be negative")
    rng = np.random.default_rng(seed)
    pairs: List[Tuple[float, float]] = []
    if include_published_rows:
        pairs.extend((sa, slp) for sa, slp, _ in PUBLISHED_RLCR_ROWS[:n])
    pairs.extend(map(tuple, _uniform_inputs(rng, n - len(pairs), PART2_DOMAINS)))
    records = [
        Record(inputs={"SA": float(sa), "SLP": float(slp)}, desired=rlcr_oracle(sa, slp))
        for sa, slp in pairs
    ]
    logger.info(f"Generated {n} RLCR records (seed={seed}, published rows={include_published_rows})")
    return Dataset(records=records, schema=list(PART2_SCHEMA), output="RLCR", seed=seed)


def kfold_split(dataset: Dataset, k: int = 5, seed: int = 42) -> List[Tuple[Dataset, Dataset]]:
    """Seeded shuffled K-fold partition into (train, test) pairs."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if len(dataset) < k:
        raise TooFewRecords(f"{len(dataset)} records cannot fill {k} folds")
    splitter = KFold(n_splits=k, shuffle=True, random_state=seed)
    folds = []
    for train_index, test_index in splitter.split(np.arange(len(dataset))):
        folds.append((dataset.subset(train_index), dataset.subset(test_index)))
    return folds
