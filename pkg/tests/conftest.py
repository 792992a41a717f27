import sys
from dataclasses import replace
from pathlib import Path

import pytest

# Add the project root to the Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

from core.fuzzy_system import baseline_part1_system, make_variable  # noqa: E402
from data.content_graph import sample_content_graph  # noqa: E402
from data.dataset_generator import gen_rlcr_dataset, gen_slp_dataset  # noqa: E402
from data.models import FuzzySystem, Rule, TrapezoidShape, VariableKind  # noqa: E402


@pytest.fixture(scope="session")
def baseline():
    return baseline_part1_system()


@pytest.fixture(scope="session")
def small_slp_dataset():
    return gen_slp_dataset(40, seed=7)


@pytest.fixture(scope="session")
def small_rlcr_dataset():
    return gen_rlcr_dataset(40, seed=7)


@pytest.fixture(scope="session")
def graph():
    return sample_content_graph()


@pytest.fixture
def toy_system():
    """One input, one output, a single rule X is Lo => Y is Mid."""
    x = make_variable("X", 0, 1, VariableKind.INPUT, ("Lo", "Hi"),
                      ((0.0, 0.0, 0.6, 0.7), (0.6, 0.7, 1.0, 1.0)))
    y = make_variable("Y", 0, 1, VariableKind.OUTPUT, ("Low", "Mid"),
                      ((0.0, 0.0, 0.2, 0.3), (0.4, 0.5, 0.6, 0.7)), default_value=0.25)
    rule = Rule(name="r1", antecedent=(("X", "Lo"),), consequent=("Y", "Mid"))
    return FuzzySystem(name="Toy", variables=(x, y), rules=(rule,))


def with_term_shape(system: FuzzySystem, var_name: str, term_name: str, shape) -> FuzzySystem:
    """Copy of system with one term's trapezoid replaced."""
    variables = []
    for var in system.variables:
        if var.name == var_name:
            terms = tuple(replace(t, shape=TrapezoidShape(*shape)) if t.name == term_name else t
                          for t in var.terms)
            var = replace(var, terms=terms)
        variables.append(var)
    return replace(system, variables=tuple(variables))
