import numpy as np
import pytest

from core.exceptions import NonNumericCell, SchemaMismatch, TooFewRecords
from data.dataset_generator import (
    gen_rlcr_dataset, gen_slp_dataset, kfold_split, published_rlcr_rows, rlcr_oracle, slp_oracle,
)
from data.dataset_io import read_csv_dataset, write_csv_dataset


def test_slp_oracle_range():
    assert slp_oracle(4, -4, 10, 10) == 1.0
    assert slp_oracle(-4, 4, 0, 0) == 0.0
    assert slp_oracle(0, 0, 5, 5) == pytest.approx(0.5)


def test_rlcr_oracle_matches_published_rows():
    rows = published_rlcr_rows()
    assert len(rows) == 15
    for sa, slp, desired in rows:
        assert rlcr_oracle(sa, slp) == pytest.approx(desired, abs=1e-3)
    assert rlcr_oracle(-1.43, 0.111) == pytest.approx(-1.99067, abs=1e-3)
    assert rlcr_oracle(3.71, 0.902) == pytest.approx(3.545333, abs=1e-3)


def test_rlcr_oracle_is_clamped():
    assert rlcr_oracle(4, 1) == 4.0
    assert rlcr_oracle(-4, 0) == -4.0


def test_slp_dataset_shape_and_ranges():
    dataset = gen_slp_dataset(400, seed=42)
    assert len(dataset) == 400
    assert dataset.schema == ["SA", "LCD", "SCL", "STS"]
    matrix = dataset.input_matrix()
    assert matrix[:, :2].min() >= -4 and matrix[:, :2].max() <= 4
    assert matrix[:, 2:].min() >= 0 and matrix[:, 2:].max() <= 10
    desired = dataset.desired_vector()
    assert desired.min() >= 0 and desired.max() <= 1


def test_slp_dataset_is_seeded():
    first, second = gen_slp_dataset(50, seed=42), gen_slp_dataset(50, seed=42)
    np.testing.assert_array_equal(first.input_matrix(), second.input_matrix())
    np.testing.assert_array_equal(first.desired_vector(), second.desired_vector())
    other = gen_slp_dataset(50, seed=43)
    assert not np.array_equal(first.input_matrix(), other.input_matrix())


def test_noise_free_targets_equal_oracle():
    dataset = gen_slp_dataset(10, seed=1, noise_sigma=0.0)
    for record in dataset.records:
        assert record.desired == slp_oracle(**{k.lower(): v for k, v in record.inputs.items()})


def test_slp_dataset_rejects_empty():
    with pytest.raises(ValueError):
        gen_slp_dataset(0)


def test_rlcr_dataset_with_published_prefix():
    dataset = gen_rlcr_dataset(20, seed=42, include_published_rows=True)
    assert len(dataset) == 20
    for record, (sa, slp, desired) in zip(dataset.records, published_rlcr_rows()):
        assert record.inputs == {"SA": sa, "SLP": slp}
        assert record.desired == pytest.approx(desired, abs=1e-3)
    assert len(gen_rlcr_dataset(0)) == 0


def test_kfold_split_partitions_records():
    dataset = gen_slp_dataset(400, seed=42)
    folds = kfold_split(dataset, k=5, seed=42)
    assert len(folds) == 5
    seen = []
    for train, test in folds:
        assert len(test) == 80 and len(train) == 320
        test_ids = {id(r) for r in test.records}
        assert test_ids.isdisjoint(id(r) for r in train.records)
        seen.extend(test_ids)
    assert sorted(seen) == sorted(id(r) for r in dataset.records)


def test_kfold_split_is_seeded():
    dataset = gen_slp_dataset(30, seed=1)
    first = [[id(r) for r in test.records] for _, test in kfold_split(dataset, 5, seed=3)]
    second = [[id(r) for r in test.records] for _, test in kfold_split(dataset, 5, seed=3)]
    assert first == second


def test_kfold_split_too_few_records():
    with pytest.raises(TooFewRecords):
        kfold_split(gen_slp_dataset(3, seed=1), k=5)
    with pytest.raises(ValueError):
        kfold_split(gen_slp_dataset(3, seed=1), k=1)


def test_csv_round_trip(tmp_path):
    dataset = gen_slp_dataset(25, seed=9)
    path = tmp_path / "slp.csv"
    write_csv_dataset(dataset, path)
    text = path.read_bytes()
    assert text.startswith(b"sa,lcd,scl,sts,slp_do\n")
    assert b"\r\n" not in text
    loaded = read_csv_dataset(path, expected_inputs=["SA", "LCD", "SCL", "STS"])
    assert loaded.schema == ["SA", "LCD", "SCL", "STS"]
    assert loaded.output == "SLP"
    np.testing.assert_allclose(loaded.input_matrix(), dataset.input_matrix(), atol=1e-6)
    np.testing.assert_allclose(loaded.desired_vector(), dataset.desired_vector(), atol=1e-6)


def test_csv_rejects_bad_files(tmp_path):
    bad_cell = tmp_path / "bad.csv"
    bad_cell.write_text("sa,slp,rlcr_do\n1,0.5,0.1\n1,abc,0.5\n")
    with pytest.raises(NonNumericCell, match="line 3"):
        read_csv_dataset(bad_cell)

    no_desired = tmp_path / "nodo.csv"
    no_desired.write_text("sa,slp\n1,0.5\n")
    with pytest.raises(SchemaMismatch):
        read_csv_dataset(no_desired)

    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(SchemaMismatch):
        read_csv_dataset(empty)

    part2 = tmp_path / "part2.csv"
    write_csv_dataset(gen_rlcr_dataset(5, seed=1), part2)
    with pytest.raises(SchemaMismatch):
        read_csv_dataset(part2, expected_inputs=["SA", "LCD", "SCL", "STS"])


@pytest.mark.parametrize("seed", [0, 42])
def test_large_slp_dataset_is_centred(seed):
    desired = gen_slp_dataset(10000, seed=seed).desired_vector()
    assert abs(desired.mean() - 0.5) <= 0.05


@pytest.mark.parametrize("cell", ["nan", "inf", "-inf"])
def test_csv_rejects_non_finite_cells(tmp_path, cell):
    path = tmp_path / "nonfinite.csv"
    path.write_text(f"sa,slp,rlcr_do\n1,0.5,0.1\n1,0.5,0.2\n{cell},0.5,0.3\n")
    with pytest.raises(NonNumericCell, match="line 4"):
        read_csv_dataset(path)
