"""Knowledge-base validation and the baseline student-performance system."""

import logging
from typing import List, Sequence, Tuple

from core.rule_generator import (
    LCD_TERMS, SA_TERMS, SCL_TERMS, SLP_TERMS, STS_TERMS, build_slp_rulebase,
)
from data.models import FuzzySystem, FuzzyTerm, FuzzyVariable, TrapezoidShape, VariableKind

logger = logging.getLogger(__name__)

ABILITY_SHAPES = ((-4, -4, -1.11, -0.6), (-1.11, -0.6, 0.05, 0.4),
                  (0.05, 0.4, 0.95, 1.5), (0.95, 1.5, 4, 4))
BEHAVIOUR_SHAPES = ((0, 0, 2, 3), (2, 3, 4, 5), (4, 5, 6, 7), (6, 7, 10, 10))
PERFORMANCE_SHAPES = ((0.0, 0.0, 0.2, 0.3), (0.2, 0.3, 0.4, 0.5), (0.4, 0.5, 0.6, 0.7),
                      (0.6, 0.7, 0.8, 0.9), (0.8, 0.9, 1, 1))

PART1_SYSTEM_NAME = "SLFSystemRB"


def make_variable(name: str, left: float, right: float, kind: VariableKind,
                  term_names: Sequence[str], shapes: Sequence[Tuple[float, ...]],
                  default_value: float = 0.0) -> FuzzyVariable:
    """Build a variable from parallel term-name and shape lists."""
    terms = tuple(
        FuzzyTerm(name=term, shape=TrapezoidShape(*(float(p) for p in shape)))
        for term, shape in zip(term_names, shapes)
    )
    return FuzzyVariable(name=name, domain_left=float(left), domain_right=float(right),
                         kind=kind, terms=terms, default_value=float(default_value))


def baseline_part1_system() -> FuzzySystem:
    """The before-learning student learning performance system."""
    variables = (
        make_variable("SA", -4, 4, VariableKind.INPUT, SA_TERMS, ABILITY_SHAPES),
        make_variable("LCD", -4, 4, VariableKind.INPUT, LCD_TERMS, ABILITY_SHAPES),
        make_variable("SCL", 0, 10, VariableKind.INPUT, SCL_TERMS, BEHAVIOUR_SHAPES),
        make_variable("STS", 0, 10, VariableKind.INPUT, STS_TERMS, BEHAVIOUR_SHAPES),
        make_variable("SLP", 0, 1, VariableKind.OUTPUT, SLP_TERMS, PERFORMANCE_SHAPES),
    )
    return FuzzySystem(name=PART1_SYSTEM_NAME, variables=variables,
                       rules=tuple(build_slp_rulebase()))


def _variable_violations(var: FuzzyVariable) -> List[str]:
    violations = []
    if not var.domain_left < var.domain_right:
        violations.append(f"{var.name}: domainLeft {var.domain_left} not below domainRight {var.domain_right}")
    if len(var.terms) < 2:
        violations.append(f"{var.name}: needs at least 2 terms, has {len(var.terms)}")
    names = var.term_names
    duplicates = sorted({n for n in names if names.count(n) > 1})
    for name in duplicates:
        violations.append(f"{var.name}: duplicate term name {name}")
    if not var.domain_left <= var.default_value <= var.domain_right:
        violations.append(f"{var.name}: defaultValue {var.default_value} outside domain")
    if var.accumulation != "MAX":
        violations.append(f"{var.name}: unsupported accumulation {var.accumulation}")
    if var.defuzzifier != "COG":
        violations.append(f"{var.name}: unsupported defuzzifier {var.defuzzifier}")
    for term in var.terms:
        shape = term.shape
        if not shape.is_ordered():
            violations.append(f"{var.name}/{term.name}: trapezoid {shape.as_tuple()} not ordered")
        if shape.a < var.domain_left or shape.d > var.domain_right:
            violations.append(f"{var.name}/{term.name}: trapezoid {shape.as_tuple()} leaves the domain")
        if term.meta is not None:
            for key, value in term.meta.items():
                if not value.strip():
                    violations.append(f"{var.name}/{term.name}: empty {key} attribute")
    return violations


def _rule_violations(system: FuzzySystem, rule, output_name) -> List[str]:
    violations = []
    if not 0.0 <= rule.weight <= 1.0:
        violations.append(f"rule {rule.name}: weight {rule.weight} outside [0, 1]")
    if rule.connector != "AND":
        violations.append(f"rule {rule.name}: connector {rule.connector} not supported")
    if rule.and_method != "MIN":
        violations.append(f"rule {rule.name}: andMethod {rule.and_method} not supported")
    if rule.or_method != "MAX":
        violations.append(f"rule {rule.name}: orMethod {rule.or_method} not supported")
    if not rule.antecedent:
        violations.append(f"rule {rule.name}: empty antecedent")
    for var_name, term_name in rule.antecedent:
        var = system.variable(var_name)
        if var is None or var.kind != VariableKind.INPUT:
            violations.append(f"rule {rule.name}: unknown input variable {var_name}")
        elif var.term(term_name) is None:
            violations.append(f"rule {rule.name}: unknown term {var_name}/{term_name}")
    var_name, term_name = rule.consequent
    var = system.variable(var_name)
    if var is None:
        violations.append(f"rule {rule.name}: unknown output variable {var_name}")
    elif output_name is not None and var_name != output_name:
        violations.append(f"rule {rule.name}: consequent targets {var_name}, not the output variable")
    elif var.term(term_name) is None:
        violations.append(f"rule {rule.name}: unknown term {var_name}/{term_name}")
    return violations


def validate(system: FuzzySystem) -> List[str]:
    """Describe every invariant violation in the system; [] when well-formed."""
    violations = []
    names = [v.name for v in system.variables]
    for name in sorted({n for n in names if names.count(n) > 1}):
        violations.append(f"duplicate variable name {name}")
    for var in system.variables:
        violations.extend(_variable_violations(var))

    outputs = [v for v in system.variables if v.kind == VariableKind.OUTPUT]
    if len(outputs) != 1:
        violations.append(f"system {system.name}: expected exactly one output variable, found {len(outputs)}")
    output_name = outputs[0].name if len(outputs) == 1 else None

    rule_names = [r.name for r in system.rules]
    for name in sorted({n for n in rule_names if rule_names.count(n) > 1}):
        violations.append(f"duplicate rule name {name}")
    for rule in system.rules:
        violations.extend(_rule_violations(system, rule, output_name))

    if violations:
        logger.debug(f"System {system.name} has {len(violations)} violations")
    return violations
