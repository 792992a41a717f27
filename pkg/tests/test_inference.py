from dataclasses import replace

import numpy as np
import pytest

from core.exceptions import MissingInput, NonFiniteInput, ZeroArea
from core.fuzzy_system import validate
from core.inference import (
    EVALUATION_CHUNK, FuzzyInferenceEngine, apply_hedge, defuzzify_cog, infer, infer_batch,
    inference_engine, membership, membership_array, rule_strength,
)
from data.models import Hedge, Rule, TrapezoidShape

BELOW_BASIC = TrapezoidShape(-4, -4, -1.11, -0.6)


def test_membership_examples():
    assert membership(BELOW_BASIC, -2.0) == 1.0
    assert membership(BELOW_BASIC, -0.855) == pytest.approx(0.5)
    assert membership(TrapezoidShape(0, 0, 2, 3), 5.0) == 0.0
    assert membership(TrapezoidShape(0, 0, 2, 3), 0.0) == 1.0


def test_degenerate_shape_membership():
    point = TrapezoidShape(0.3, 0.3, 0.3, 0.3)
    assert membership(point, 0.3) == 1.0
    assert membership(point, 0.2999) == 0.0
    assert membership_array(np.array(point.as_tuple()), np.array([0.3, 0.31])).tolist() == [1.0, 0.0]


def test_membership_array_matches_scalar():
    shapes = np.array([[-4, -4, -1.11, -0.6], [-1.11, -0.6, 0.05, 0.4], [0.95, 1.5, 4, 4]])
    xs = np.linspace(-4, 4, 161)
    table = membership_array(shapes, xs)
    assert table.shape == (161, 3)
    for j, row in enumerate(shapes):
        expected = [membership(TrapezoidShape(*row), x) for x in xs]
        np.testing.assert_allclose(table[:, j], expected, atol=1e-12)
    assert table.min() >= 0.0 and table.max() <= 1.0


def test_apply_hedge():
    assert apply_hedge(0.5, Hedge.VERY) == 0.25
    assert apply_hedge(0.25, Hedge.MORE_OR_LESS) == pytest.approx(0.5)
    for hedge in Hedge:
        assert apply_hedge(1.0, hedge) == 1.0


def test_rule_strength(baseline):
    inputs = {"SA": -3, "LCD": -3, "SCL": 1, "STS": 1}
    first, last = baseline.rules[0], baseline.rules[-1]
    assert rule_strength(baseline, first, inputs) == 1.0
    assert rule_strength(baseline, replace(first, weight=0.5), inputs) == 0.5
    assert rule_strength(baseline, last, inputs) == 0.0


def test_single_rule_centroid(baseline):
    result = infer(baseline, {"SA": -3, "LCD": -3, "SCL": 1, "STS": 1})
    assert result.crisp_value == pytest.approx(0.12667, abs=1e-3)
    assert result.winning_term == "FallBehind"
    assert result.fired
    assert result.clamped == []


def test_top_rule_gives_excellent(baseline):
    result = infer(baseline, {"SA": 3, "LCD": 3, "SCL": 8.5, "STS": 9.5})
    assert 0.8 <= result.crisp_value <= 1.0
    assert result.winning_term == "Excellent"


def test_symmetric_consequent(toy_system):
    assert infer(toy_system, {"X": 0.5}).crisp_value == pytest.approx(0.55, abs=1e-3)


def test_common_weight_scaling_keeps_symmetric_centroid(toy_system):
    scaled = replace(toy_system, rules=tuple(replace(r, weight=0.4) for r in toy_system.rules))
    assert infer(scaled, {"X": 0.5}).crisp_value == pytest.approx(infer(toy_system, {"X": 0.5}).crisp_value)


def test_no_rule_fires_returns_default(toy_system):
    result = infer(toy_system, {"X": 0.9})
    assert not result.fired
    assert result.crisp_value == 0.25
    assert result.winning_term == "Low"
    assert result.term_degrees["Low"] == pytest.approx(0.5)


def test_output_hedge_applies_after_clipping(toy_system):
    y = toy_system.variable("Y")
    very = replace(y, terms=tuple(replace(t, hedge=Hedge.VERY) for t in y.terms))
    system = replace(toy_system, variables=(toy_system.variable("X"), very))
    result = infer(system, {"X": 0.5})
    # symmetric consequent stays symmetric under the hedge
    assert result.crisp_value == pytest.approx(0.55, abs=1e-3)
    half = replace(system, rules=(replace(system.rules[0], weight=0.5),))
    grid = np.linspace(0, 1, 1001)
    clipped = np.minimum(membership_array(np.array([0.4, 0.5, 0.6, 0.7]), grid), 0.5) ** 2
    assert infer(half, {"X": 0.5}).crisp_value == pytest.approx(defuzzify_cog(clipped, 0, 1), abs=1e-12)


def test_defuzzify_cog():
    shape = np.array([0.4, 0.5, 0.6, 0.7])
    assert defuzzify_cog(lambda xs: membership_array(shape, xs), 0, 1) == pytest.approx(0.55, abs=1e-3)
    fall_behind = np.array([0.0, 0.0, 0.2, 0.3])
    assert defuzzify_cog(lambda xs: membership_array(fall_behind, xs), 0, 1) == pytest.approx(0.12667, abs=1e-3)
    with pytest.raises(ZeroArea):
        defuzzify_cog(lambda xs: np.zeros_like(xs), 0, 1)


def test_missing_input_raises(baseline):
    with pytest.raises(MissingInput):
        infer(baseline, {"SA": 0, "LCD": 0, "SCL": 5})


def test_out_of_domain_input_is_clamped(baseline):
    clamped = infer(baseline, {"SA": 10, "LCD": 0, "SCL": 5, "STS": 5})
    edge = infer(baseline, {"SA": 4, "LCD": 0, "SCL": 5, "STS": 5})
    assert clamped.clamped == ["SA"]
    assert clamped.crisp_value == edge.crisp_value


def test_output_stays_in_domain(baseline):
    rng = np.random.default_rng(3)
    matrix = rng.uniform([-4, -4, 0, 0], [4, 4, 10, 10], size=(200, 4))
    values = infer_batch(baseline, matrix)
    assert values.min() >= 0.0 and values.max() <= 1.0


def test_batch_matches_single_record(baseline):
    rng = np.random.default_rng(5)
    matrix = rng.uniform([-4, -4, 0, 0], [4, 4, 10, 10], size=(20, 4))
    batch = infer_batch(baseline, matrix)
    for row, value in zip(matrix, batch):
        single = infer(baseline, dict(zip(["SA", "LCD", "SCL", "STS"], row)))
        assert single.crisp_value == pytest.approx(value, abs=1e-12)


def test_batch_reorders_named_columns(baseline):
    row = np.array([[5.0, 5.0, 0.0, 0.0]])
    value = infer_batch(baseline, row, columns=["SCL", "STS", "SA", "LCD"])[0]
    assert value == pytest.approx(infer(baseline, {"SA": 0, "LCD": 0, "SCL": 5, "STS": 5}).crisp_value)
    with pytest.raises(MissingInput):
        infer_batch(baseline, row, columns=["SCL", "STS", "SA", "XYZ"])


def test_monotone_in_student_ability(baseline):
    values = [infer(baseline, {"SA": sa, "LCD": 0, "SCL": 5, "STS": 5}).crisp_value
              for sa in np.linspace(-4, 4, 33)]
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))


def test_cog_refinement_changes_little(baseline):
    fine = FuzzyInferenceEngine(n_samples=4001)
    coarse = FuzzyInferenceEngine(n_samples=1001)
    rng = np.random.default_rng(11)
    matrix = rng.uniform([-4, -4, 0, 0], [4, 4, 10, 10], size=(100, 4))
    diff = np.abs(fine.predict(baseline, matrix) - coarse.predict(baseline, matrix))
    assert diff.max() < 1e-3


def _with_rules(system, *rules):
    return replace(system, rules=tuple(rules))


def test_repeated_antecedent_variable_uses_every_clause(baseline):
    rule = Rule(name="both", antecedent=(("SA", "Basic"), ("SA", "Advanced")), consequent=("SLP", "Excellent"))
    system = _with_rules(baseline, rule)
    assert validate(system) == []
    inputs = {"SA": 3, "LCD": 0, "SCL": 5, "STS": 5}
    assert rule_strength(system, rule, inputs) == 0.0
    result = infer(system, inputs)
    assert not result.fired
    assert result.crisp_value == 0.0


def test_repeated_antecedent_variable_takes_min(baseline):
    rule = Rule(name="overlap", antecedent=(("SA", "Basic"), ("SA", "Proficient")),
                consequent=("SLP", "Good"))
    system = _with_rules(baseline, rule)
    inputs = {"SA": 0.2, "LCD": 0, "SCL": 5, "STS": 5}
    expected = rule_strength(system, rule, inputs)
    assert expected == pytest.approx(0.15 / 0.35)
    activations = inference_engine.compile(system).rule_activations(np.array([[0.2, 0.0, 5.0, 5.0]]))
    assert activations[0, 0] == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("value", [float("nan"), float("inf"), float("-inf")])
def test_non_finite_inputs_rejected(baseline, value):
    inputs = {"SA": value, "LCD": 0, "SCL": 5, "STS": 5}
    with pytest.raises(NonFiniteInput):
        infer(baseline, inputs)
    with pytest.raises(NonFiniteInput):
        rule_strength(baseline, baseline.rules[-1], inputs)
    with pytest.raises(NonFiniteInput):
        infer_batch(baseline, np.array([[0.0, 0.0, 5.0, 5.0], [value, 0.0, 5.0, 5.0]]))


def _hedged_output(system):
    slp = system.variable("SLP")
    hedges = [Hedge.VERY, Hedge.NONE, Hedge.MORE_OR_LESS, Hedge.NONE, Hedge.VERY]
    terms = tuple(replace(t, hedge=h, complement=(t.name == "Insufficient")) for t, h in zip(slp.terms, hedges))
    variables = tuple(replace(v, terms=terms) if v.name == "SLP" else v for v in system.variables)
    return replace(system, variables=variables)


def _reference_output(system, inputs):
    """Clip, hedge and take the MAX over the whole grid, one record at a time."""
    output = system.output_variable
    clip = {t.name: 0.0 for t in output.terms}
    for rule in system.rules:
        term = rule.consequent[1]
        clip[term] = max(clip[term], rule_strength(system, rule, inputs))

    def aggregated(xs):
        curves = []
        for t in output.terms:
            mu = membership_array(np.array(t.shape.as_tuple()), xs)
            if t.complement:
                mu = 1.0 - mu
            curves.append(apply_hedge(np.minimum(clip[t.name], mu), t.hedge))
        return np.max(curves, axis=0)

    return defuzzify_cog(aggregated, output.domain_left, output.domain_right)


def test_batch_matches_whole_grid_reference(baseline):
    system = _hedged_output(baseline)
    rng = np.random.default_rng(21)
    matrix = rng.uniform([-4, -4, 0, 0], [4, 4, 10, 10], size=(6, 4))
    batch = infer_batch(system, matrix)
    for row, value in zip(matrix, batch):
        expected = _reference_output(system, dict(zip(["SA", "LCD", "SCL", "STS"], row)))
        assert value == pytest.approx(expected, abs=1e-12)


def test_batch_spanning_several_chunks(baseline):
    rng = np.random.default_rng(8)
    matrix = rng.uniform([-4, -4, 0, 0], [4, 4, 10, 10], size=(2 * EVALUATION_CHUNK + 17, 4))
    whole = infer_batch(baseline, matrix)
    pieces = np.concatenate([infer_batch(baseline, matrix[:100]), infer_batch(baseline, matrix[100:])])
    np.testing.assert_allclose(whole, pieces, atol=1e-12)
