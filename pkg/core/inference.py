"""
Mamdani inference over FML fuzzy systems.

Fuzzification (with complement and hedge), MIN rule activation scaled by
rule weight, MIN implication (clipping), MAX accumulation and a discretized
centre-of-gravity defuzzifier. Batch evaluation compiles the system into
numpy arrays once and evaluates every record together; single-record
inference is the batch of one.
"""

import copy
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from config import config
from core.exceptions import MissingInput, NonFiniteInput, ZeroArea
from data.models import FuzzySystem, FuzzyTerm, Hedge, Rule, TrapezoidShape

logger = logging.getLogger(__name__)

HEDGE_CODES = {Hedge.NONE: 0, Hedge.VERY: 1, Hedge.MORE_OR_LESS: 2}
EVALUATION_CHUNK = 256  # records aggregated per (chunk, N) buffer


def finite_input(name: str, value) -> float:
    """value as a float; NaN and infinities are rejected."""
    number = float(value)
    if not math.isfinite(number):
        raise NonFiniteInput(f"Input {name} must be finite, got {number}")
    return number


@dataclass
class InferenceResult:
    """Crisp output of one inference plus the output terms' degrees there."""
    crisp_value: float
    winning_term: str
    term_degrees: Dict[str, float]
    clamped: List[str] = field(default_factory=list)
    fired: bool = True


def membership(shape: TrapezoidShape, x: float) -> float:
    """Trapezoid membership degree of a single crisp value."""
    a, b, c, d = shape.as_tuple()
    if x < a or x > d:
        return 0.0
    if b <= x <= c:
        return 1.0
    if x < b:
        return (x - a) / (b - a)
    return (d - x) / (d - c)


def membership_array(params: np.ndarray, x: np.ndarray) -> np.ndarray:
    """
    Vectorised trapezoid membership.

    params has shape (T, 4) (or (4,)), x has shape (n,); the result has
    shape (n, T) (or (n,)).
    """
    params = np.asarray(params, dtype=float)
    single = params.ndim == 1
    params = params.reshape(-1, 4)
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    a, b, c, d = (params[:, i][None, :] for i in range(4))
    with np.errstate(divide="ignore", invalid="ignore"):
        rise = np.where(b > a, (x - a) / (b - a), 1.0)
        fall = np.where(d > c, (d - x) / (d - c), 1.0)
    mu = np.clip(np.minimum(rise, fall), 0.0, 1.0)
    mu = np.where((x < a) | (x > d), 0.0, mu)
    mu = np.where((x >= b) & (x <= c), 1.0, mu)
    return mu[:, 0] if single else mu


def apply_hedge(degree, hedge: Hedge):
    """Very squares a degree, MoreOrLess takes its square root."""
    if hedge == Hedge.VERY:
        return np.square(degree) if isinstance(degree, np.ndarray) else degree * degree
    if hedge == Hedge.MORE_OR_LESS:
        return np.sqrt(degree) if isinstance(degree, np.ndarray) else degree ** 0.5
    return degree


def _apply_hedge_codes(mu: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Hedge each column of mu by its term's hedge code."""
    if not codes.any():
        return mu
    return np.where(codes == 1, np.square(mu), np.where(codes == 2, np.sqrt(mu), mu))


def term_degree(term: FuzzyTerm, x: float) -> float:
    """Membership of x in a term after complement and hedge."""
    mu = membership(term.shape, x)
    if term.complement:
        mu = 1.0 - mu
    return float(apply_hedge(mu, term.hedge))


def defuzzify_cog(aggregated: Union[Callable[[np.ndarray], np.ndarray], np.ndarray],
                  left: float, right: float, n_samples: Optional[int] = None) -> float:
    """
    Centre of gravity over n uniformly spaced samples, both ends included.

    aggregated is either a vectorised membership function or its values on
    that grid already.
    """
    n_samples = n_samples or config.COG_SAMPLES
    xs = np.linspace(left, right, n_samples)
    mu = aggregated(xs) if callable(aggregated) else np.asarray(aggregated, dtype=float)
    area = float(mu.sum())
    if area <= 0.0:
        raise ZeroArea(f"Aggregated membership is zero on [{left}, {right}]")
    return float(np.dot(xs, mu) / area)


@dataclass
class _VariableTable:
    name: str
    left: float
    right: float
    params: np.ndarray     # (T, 4)
    complement: np.ndarray  # (T,)
    hedges: np.ndarray     # (T,)
    term_names: List[str]

    def degrees(self, values: np.ndarray) -> np.ndarray:
        mu = membership_array(self.params, values)
        mu = np.where(self.complement[None, :], 1.0 - mu, mu)
        return _apply_hedge_codes(mu, self.hedges[None, :])


class CompiledSystem:
    """Array form of a fuzzy system, ready for batch evaluation."""

    def __init__(self, system: FuzzySystem, n_samples: int):
        self.system = system
        self.inputs = [self._table(var) for var in system.input_variables]
        self.output = self._table(system.output_variable)
        self.default_value = system.output_variable.default_value
        self.grid = np.linspace(self.output.left, self.output.right, n_samples)
        self._compile_output()

        # rows of the stacked degree table: every input term in order, then a row of ones
        offsets = np.cumsum([0] + [len(table.term_names) for table in self.inputs])
        position = {var.name: i for i, var in enumerate(self.inputs)}
        n_rules = len(system.rules)
        width = max([len(rule.antecedent) for rule in system.rules] + [1])
        # (K, R) degree row read by clause k of rule r; unused slots read the ones row
        self.clauses = np.full((width, n_rules), offsets[-1], dtype=int)
        self.consequent = np.zeros(n_rules, dtype=int)
        self.weights = np.ones(n_rules, dtype=float)
        for r, rule in enumerate(system.rules):
            for k, (var_name, term_name) in enumerate(rule.antecedent):
                v = position[var_name]
                self.clauses[k, r] = offsets[v] + self.inputs[v].term_names.index(term_name)
            self.consequent[r] = self.output.term_names.index(rule.consequent[1])
            self.weights[r] = rule.weight

        # rules grouped by consequent term for one maximum.reduceat per evaluation
        self.rule_order = np.argsort(self.consequent, kind="stable")
        grouped = self.consequent[self.rule_order]
        self.fired_terms = np.unique(grouped)
        self.group_starts = np.searchsorted(grouped, self.fired_terms)

    def _compile_output(self):
        """Hedged output memberships on the COG grid and each term's nonzero span."""
        raw = membership_array(self.output.params, self.grid)
        raw = np.where(self.output.complement[None, :], 1.0 - raw, raw)
        # hedges are monotone, so hedge(min(c, mu)) == min(hedge(c), hedge(mu))
        self.output_grid = _apply_hedge_codes(raw, self.output.hedges[None, :]).T
        self.supports = []
        for row in self.output_grid:
            nonzero = np.flatnonzero(row)
            self.supports.append(slice(nonzero[0], nonzero[-1] + 1) if nonzero.size else None)

    @staticmethod
    def _table(var) -> _VariableTable:
        return _VariableTable(
            name=var.name,
            left=var.domain_left,
            right=var.domain_right,
            params=np.array([t.shape.as_tuple() for t in var.terms], dtype=float),
            complement=np.array([t.complement for t in var.terms], dtype=bool),
            hedges=np.array([HEDGE_CODES[t.hedge] for t in var.terms], dtype=int),
            term_names=[t.name for t in var.terms],
        )

    def with_parameters(self, shapes: Sequence[np.ndarray], weights: Optional[np.ndarray] = None,
                        hedge_codes: Optional[Sequence[int]] = None) -> "CompiledSystem":
        """
        Copy with replaced term shapes (inputs in order, then the output),
        rule weights and per-variable hedge codes. Shapes must already be
        repaired.
        """
        clone = copy.copy(self)
        tables = self.inputs + [self.output]
        hedge_codes = hedge_codes if hedge_codes is not None else [None] * len(tables)
        replaced = []
        for table, params, code in zip(tables, shapes, hedge_codes):
            params = np.asarray(params, dtype=float).reshape(table.params.shape)
            hedges = table.hedges if code is None else np.full(len(table.term_names), int(code))
            replaced.append(replace(table, params=params, hedges=hedges))
        clone.inputs, clone.output = replaced[:-1], replaced[-1]
        clone._compile_output()
        if weights is not None:
            clone.weights = np.asarray(weights, dtype=float)
        return clone

    def rule_activations(self, matrix: np.ndarray) -> np.ndarray:
        """(R, n) weighted MIN activation of every rule for every record."""
        n = matrix.shape[0]
        rows = [table.degrees(matrix[:, v]).T for v, table in enumerate(self.inputs)]
        degrees = np.concatenate(rows + [np.ones((1, n))], axis=0)
        strengths = degrees[self.clauses[0]]
        for k in range(1, self.clauses.shape[0]):
            np.minimum(strengths, degrees[self.clauses[k]], out=strengths)
        return strengths * self.weights[:, None]

    def clip_levels(self, matrix: np.ndarray) -> np.ndarray:
        """(T, n) hedged MAX activation per output term."""
        n_terms = len(self.output.term_names)
        clip = np.zeros((n_terms, matrix.shape[0]))
        if self.fired_terms.size:
            strengths = self.rule_activations(matrix)[self.rule_order]
            clip[self.fired_terms] = np.maximum.reduceat(strengths, self.group_starts, axis=0)
        return _apply_hedge_codes(clip, self.output.hedges[:, None])

    def evaluate(self, matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Crisp outputs and a fired flag for every record."""
        n = matrix.shape[0]
        clip = self.clip_levels(matrix)
        crisp = np.full(n, self.default_value, dtype=float)
        fired = np.zeros(n, dtype=bool)
        for start in range(0, n, EVALUATION_CHUNK):
            rows = slice(start, start + EVALUATION_CHUNK)
            aggregated = self._aggregate(clip[:, rows])
            area = aggregated.sum(axis=1)
            hit = area > 0.0
            crisp[rows][hit] = (aggregated[hit] @ self.grid) / area[hit]
            fired[rows] = hit
        return crisp, fired

    def _aggregate(self, clip: np.ndarray) -> np.ndarray:
        """(n, N) MAX of the clipped output terms, accumulated in place over each term's span."""
        aggregated = np.zeros((clip.shape[1], self.grid.size))
        buffer = np.empty_like(aggregated)
        for t, span in enumerate(self.supports):
            level = clip[t]
            if span is None or not level.any():
                continue
            clipped = buffer[:, span]
            np.minimum(self.output_grid[t, span][None, :], level[:, None], out=clipped)
            np.maximum(aggregated[:, span], clipped, out=aggregated[:, span])
        return aggregated

    def output_degrees(self, value: float) -> np.ndarray:
        return self.output.degrees(np.array([value]))[0]


class FuzzyInferenceEngine:
    """Mamdani inference with a configurable COG sample count."""

    def __init__(self, n_samples: Optional[int] = None):
        self.n_samples = n_samples or config.COG_SAMPLES

    def compile(self, system: FuzzySystem) -> CompiledSystem:
        return CompiledSystem(system, self.n_samples)

    def _matrix(self, system: FuzzySystem, matrix: np.ndarray,
                columns: Optional[Sequence[str]]) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim == 1:
            matrix = matrix.reshape(1, -1)
        names = [v.name for v in system.input_variables]
        if columns is not None:
            missing = [n for n in names if n not in columns]
            if missing:
                raise MissingInput(f"Missing input columns: {missing}")
            matrix = matrix[:, [list(columns).index(n) for n in names]]
        elif matrix.shape[1] != len(names):
            raise MissingInput(f"Expected {len(names)} input columns, got {matrix.shape[1]}")
        bad_rows = np.flatnonzero(~np.isfinite(matrix).all(axis=1))
        if bad_rows.size:
            raise NonFiniteInput(f"{bad_rows.size} input rows hold NaN or infinite values "
                                 f"(first at row {bad_rows[0]})")
        lows = np.array([v.domain_left for v in system.input_variables])
        highs = np.array([v.domain_right for v in system.input_variables])
        clipped = np.clip(matrix, lows, highs)
        outside = int(np.count_nonzero(clipped != matrix))
        if outside:
            logger.warning(f"Clamped {outside} out-of-domain input values for {system.name}")
        return clipped

    def predict(self, system: FuzzySystem, matrix: np.ndarray,
                columns: Optional[Sequence[str]] = None) -> np.ndarray:
        """Crisp outputs for every row of an input matrix."""
        crisp, _ = self.compile(system).evaluate(self._matrix(system, matrix, columns))
        return crisp

    def rule_strength(self, system: FuzzySystem, rule: Rule, inputs: Mapping[str, float]) -> float:
        """Weighted MIN activation of one rule."""
        degree = 1.0
        for var_name, term_name in rule.antecedent:
            if var_name not in inputs:
                raise MissingInput(f"No value for input {var_name}")
            var = system.variable(var_name)
            value = var.clamp(finite_input(var_name, inputs[var_name]))
            degree = min(degree, term_degree(var.term(term_name), value))
        return rule.weight * degree

    def infer(self, system: FuzzySystem, inputs: Mapping[str, float]) -> InferenceResult:
        """Infer the crisp output for one set of named inputs."""
        variables = system.input_variables
        missing = [v.name for v in variables if v.name not in inputs]
        if missing:
            raise MissingInput(f"Missing inputs: {missing}")
        clamped = []
        row = []
        for var in variables:
            value = finite_input(var.name, inputs[var.name])
            if var.clamp(value) != value:
                clamped.append(var.name)
                logger.warning(f"{var.name}={value} outside [{var.domain_left}, {var.domain_right}], clamped")
            row.append(var.clamp(value))
        compiled = self.compile(system)
        crisp, fired = compiled.evaluate(np.array([row]))
        value = float(crisp[0])
        degrees = compiled.output_degrees(value)
        names = compiled.output.term_names
        if not fired[0]:
            logger.info(f"No rule fired in {system.name}; using default {value}")
        return InferenceResult(
            crisp_value=value,
            winning_term=names[int(np.argmax(degrees))],
            term_degrees={name: float(deg) for name, deg in zip(names, degrees)},
            clamped=clamped,
            fired=bool(fired[0]),
        )


# Global inference engine instance
inference_engine = FuzzyInferenceEngine()


def infer(system: FuzzySystem, inputs: Mapping[str, float]) -> InferenceResult:
    return inference_engine.infer(system, inputs)


def rule_strength(system: FuzzySystem, rule: Rule, inputs: Mapping[str, float]) -> float:
    return inference_engine.rule_strength(system, rule, inputs)


def infer_batch(system: FuzzySystem, matrix: np.ndarray,
                columns: Optional[Sequence[str]] = None) -> np.ndarray:
    return inference_engine.predict(system, matrix, columns)
