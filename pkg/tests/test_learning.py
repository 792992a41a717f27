import numpy as np
import pytest

from analysis.cross_validation import cross_validate
from analysis.encoding import KnowledgeLayout
from analysis.genetic_optimizer import ga_optimize
from analysis.learning import FitnessEvaluator, LearnConfig, mse
from analysis.swarm_optimizer import pso_optimize
from core.exceptions import EmptyDataset, TooFewRecords
from core.inference import infer, infer_batch
from data.dataset_generator import gen_slp_dataset
from data.models import Dataset, Hedge, Record


def _non_increasing(values):
    return all(b <= a for a, b in zip(values, values[1:]))


def _relabelled(system, dataset):
    predicted = infer_batch(system, dataset.input_matrix())
    records = [Record(inputs=r.inputs, desired=float(p)) for r, p in zip(dataset.records, predicted)]
    return Dataset(records=records, schema=list(dataset.schema), output=dataset.output)


def test_mse_zero_when_desired_equals_inference(baseline, small_slp_dataset):
    assert mse(baseline, _relabelled(baseline, small_slp_dataset)) == pytest.approx(0.0, abs=1e-15)


def test_mse_single_record(baseline):
    inputs = {"SA": -3.0, "LCD": -3.0, "SCL": 1.0, "STS": 1.0}
    value = infer(baseline, inputs).crisp_value
    dataset = Dataset(records=[Record(inputs=inputs, desired=value + 0.1)],
                      schema=["SA", "LCD", "SCL", "STS"], output="SLP")
    assert mse(baseline, dataset) == pytest.approx(0.01)


def test_mse_empty_dataset(baseline):
    empty = Dataset(records=[], schema=["SA", "LCD", "SCL", "STS"], output="SLP")
    with pytest.raises(EmptyDataset):
        mse(baseline, empty)


def test_baseline_mse_is_reproducible(baseline):
    first = mse(baseline, gen_slp_dataset(400, seed=42))
    assert first > 0
    assert mse(baseline, gen_slp_dataset(400, seed=42)) == first


def test_fitness_evaluator_matches_mse(baseline, small_slp_dataset):
    evaluator = FitnessEvaluator(baseline, small_slp_dataset)
    layout = KnowledgeLayout(baseline)
    shapes = layout.shapes(layout.flatten(baseline))
    assert evaluator(shapes) == pytest.approx(mse(baseline, small_slp_dataset), abs=1e-12)


def test_learn_config_validation():
    with pytest.raises(ValueError):
        LearnConfig(method="SA")
    with pytest.raises(ValueError):
        LearnConfig(generations=0)
    with pytest.raises(ValueError):
        LearnConfig(mutation_rate=1.5)
    assert LearnConfig(method="pso").method == "PSO"


def test_learn_config_from_config_picks_population():
    assert LearnConfig.from_config("ga").population_size == 50
    assert LearnConfig.from_config("pso").population_size == 84
    assert LearnConfig.from_config("ga", generations=7).generations == 7


def test_ga_single_individual_single_generation(baseline, small_slp_dataset):
    config = LearnConfig(method="GA", generations=1, population_size=1)
    report = ga_optimize(small_slp_dataset, config)
    assert report.history_best_mse == pytest.approx([mse(baseline, small_slp_dataset)], abs=1e-12)


def test_ga_without_variation_keeps_baseline(baseline, small_slp_dataset):
    config = LearnConfig(method="GA", generations=5, population_size=4,
                         crossover_rate=0.0, mutation_rate=0.0)
    report = ga_optimize(small_slp_dataset, config)
    expected = mse(baseline, small_slp_dataset)
    assert report.history_best_mse == pytest.approx([expected] * 5)
    assert report.best_system == baseline


def test_ga_history_is_monotone(baseline, small_slp_dataset):
    config = LearnConfig(method="GA", generations=6, population_size=6, seed=3)
    report = ga_optimize(small_slp_dataset, config)
    assert len(report.history_best_mse) == 6
    assert _non_increasing(report.history_best_mse)
    assert report.final_mse <= mse(baseline, small_slp_dataset)
    assert mse(report.best_system, small_slp_dataset) == pytest.approx(report.final_mse, abs=1e-12)


def test_ga_is_deterministic_across_worker_counts(small_slp_dataset):
    single = ga_optimize(small_slp_dataset, LearnConfig(method="GA", generations=4, population_size=6, seed=5))
    again = ga_optimize(small_slp_dataset, LearnConfig(method="GA", generations=4, population_size=6, seed=5))
    pooled = ga_optimize(small_slp_dataset, LearnConfig(method="GA", generations=4, population_size=6,
                                                        seed=5, workers=4))
    assert single.history_best_mse == again.history_best_mse == pooled.history_best_mse
    assert single.best_system == pooled.best_system


def test_pso_stationary_single_particle(baseline, small_slp_dataset):
    config = LearnConfig(method="PSO", generations=1, population_size=1, cognitive=0.0, social=0.0)
    report = pso_optimize(small_slp_dataset, config)
    assert report.history_best_mse == pytest.approx([mse(baseline, small_slp_dataset)], abs=1e-12)
    assert report.best_system == baseline


def test_pso_history_is_monotone_and_shapes_only(baseline, small_slp_dataset):
    config = LearnConfig(method="PSO", generations=5, population_size=8, seed=2)
    report = pso_optimize(small_slp_dataset, config)
    assert len(report.history_best_mse) == 5
    assert _non_increasing(report.history_best_mse)
    assert report.final_mse <= mse(baseline, small_slp_dataset)
    assert all(r.weight == 1.0 for r in report.best_system.rules)
    assert all(t.hedge == Hedge.NONE for v in report.best_system.variables for t in v.terms)


def test_pso_is_deterministic_across_worker_counts(small_slp_dataset):
    single = pso_optimize(small_slp_dataset, LearnConfig(method="PSO", generations=3, population_size=6, seed=8))
    pooled = pso_optimize(small_slp_dataset, LearnConfig(method="PSO", generations=3, population_size=6,
                                                         seed=8, workers=3))
    assert single.history_best_mse == pooled.history_best_mse
    assert single.best_system == pooled.best_system


def test_optimizer_rejects_other_method(small_slp_dataset):
    with pytest.raises(ValueError):
        ga_optimize(small_slp_dataset, LearnConfig(method="PSO"))
    with pytest.raises(ValueError):
        pso_optimize(small_slp_dataset, LearnConfig(method="GA"))


def test_cross_validate_fold_table():
    dataset = gen_slp_dataset(400, seed=42)
    config = LearnConfig(method="GA", generations=1, population_size=1, k_folds=5)
    report = cross_validate(dataset, config)
    assert len(report.fold_results) == 5
    assert all(f.test_records == 80 and f.train_records == 320 for f in report.fold_results)
    # no learning happened: after equals before
    assert report.after_mse == pytest.approx(report.before_mse)
    assert report.before_mse == pytest.approx(np.mean([f.before_test_mse for f in report.fold_results]))


def test_cross_validate_is_deterministic():
    dataset = gen_slp_dataset(50, seed=4)
    config = LearnConfig(method="PSO", generations=2, population_size=4, k_folds=5, seed=4)
    first, second = cross_validate(dataset, config), cross_validate(dataset, config)
    assert [f.test_mse for f in first.fold_results] == [f.test_mse for f in second.fold_results]
    assert first.history_best_mse == second.history_best_mse
    assert first.best_fold == second.best_fold
    for fold in first.fold_results:
        assert _non_increasing(fold.history_best_mse)
        assert fold.train_mse <= fold.before_train_mse


def test_cross_validate_too_few_records():
    dataset = gen_slp_dataset(3, seed=1)
    with pytest.raises(TooFewRecords):
        cross_validate(dataset, LearnConfig(method="GA", generations=1, population_size=1))
