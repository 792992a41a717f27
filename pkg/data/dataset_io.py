"""CSV persistence for datasets: header row of input columns plus one `<output>_do` column."""

import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from core.exceptions import NonNumericCell, SchemaMismatch
from data.models import Dataset, Record

logger = logging.getLogger(__name__)

DESIRED_SUFFIX = "_do"


def read_csv_dataset(path, expected_inputs: Optional[Sequence[str]] = None) -> Dataset:
    """Load a dataset CSV; column names map to upper-case variable names."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise SchemaMismatch(f"{path}: empty file, expected a header row")

    columns = [c.strip() for c in frame.columns]
    frame.columns = columns
    desired = [c for c in columns if c.lower().endswith(DESIRED_SUFFIX)]
    if len(desired) != 1:
        raise SchemaMismatch(f"{path}: expected exactly one '*{DESIRED_SUFFIX}' column, found {desired}")
    inputs = [c for c in columns if c != desired[0]]
    if not inputs:
        raise SchemaMismatch(f"{path}: no input columns")
    schema = [c.upper() for c in inputs]
    if expected_inputs is not None and schema != list(expected_inputs):
        raise SchemaMismatch(f"{path}: columns {schema} do not match expected {list(expected_inputs)}")

    numeric = pd.DataFrame(index=frame.index)
    for column in columns:
        try:
            numeric[column] = pd.to_numeric(frame[column].str.strip(), errors="raise")
        except (ValueError, TypeError):
            bad = frame[column][pd.to_numeric(frame[column], errors="coerce").isna()]
            row = int(bad.index[0]) + 2 if len(bad) else "?"
            raise NonNumericCell(f"{path}: non-numeric value in column {column}, line {row}")
        finite = np.isfinite(numeric[column].to_numpy(dtype=float))
        if not finite.all():
            row = int(numeric.index[~finite][0]) + 2
            raise NonNumericCell(f"{path}: non-finite value in column {column}, line {row}")

    records = [
        Record(inputs={name: float(row[col]) for name, col in zip(schema, inputs)},
               desired=float(row[desired[0]]))
        for _, row in numeric.iterrows()
    ]
    output = desired[0][: -len(DESIRED_SUFFIX)].upper()
    logger.info(f"Read {len(records)} records from {path}")
    return Dataset(records=records, schema=schema, output=output)


def write_csv_dataset(dataset: Dataset, path):
    """Write a dataset as CSV with 6-decimal floats and LF line endings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dataset.to_frame().to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
    logger.info(f"Wrote {len(dataset)} records to {path}")
