#!/usr/bin/env python3
"""
CSV Repository - Subject-level CSV ingestion and export

Format: UTF-8, comma-separated, mandatory header. Required columns t, y1 and y2
(or a set of per-type count columns sharing a prefix, summed into y2); an optional
id column; every other column is a covariate.

write_csv also writes `<stem>.schema.json` next to the file; when no schema is
passed, load_csv takes the covariate kinds from it before falling back to inference.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Union

import numpy as np
import pandas as pd

from ...core.entities.errors import MalformedInput, MissingColumn, ParseError
from ...core.entities.subject_data import CovariateKind, Dataset
from ...core.interfaces.dataset_repository import IDatasetRepository

logger = logging.getLogger(__name__)

# Keys a column map may rename; "y2_type_prefix" switches y2 to a sum of prefixed columns
COLUMN_MAP_KEYS = ("id", "t", "y1", "y2", "y2_type_prefix")
SCHEMA_SUFFIX = ".schema.json"


def schema_path(path: Union[str, Path]) -> Path:
    """Sidecar holding the covariate kinds of a written CSV"""
    path = Path(path)
    return path.with_name(path.stem + SCHEMA_SUFFIX)


def read_schema(path: Path) -> Optional[Dict[str, CovariateKind]]:
    sidecar = schema_path(path)
    if not sidecar.is_file():
        return None
    try:
        return {name: CovariateKind(kind) for name, kind in json.loads(sidecar.read_text(encoding="utf-8")).items()}
    except (ValueError, AttributeError) as e:
        raise MalformedInput(f"cannot read {sidecar.name}: {e}")


def infer_schema(frame: pd.DataFrame, columns: List[str]) -> Dict[str, CovariateKind]:
    """Numeric when every non-empty value parses as a float, categorical otherwise"""
    schema = {}
    for name in columns:
        values = frame[name]
        present = values[values != ""]
        parsed = pd.to_numeric(present, errors="coerce")
        numeric = len(present) > 0 and not parsed.isna().any()
        schema[name] = CovariateKind.NUMERIC if numeric else CovariateKind.CATEGORICAL
    return schema


def _numeric_column(frame: pd.DataFrame, column: str) -> np.ndarray:
    raw = frame[column]
    parsed = pd.to_numeric(raw, errors="coerce")
    bad = np.flatnonzero(parsed.isna().to_numpy())
    if bad.size:
        row = int(bad[0])
        raise ParseError(row + 1, column, raw.iloc[row])
    return parsed.to_numpy(dtype=float)


def load_csv(
    path: Union[str, Path],
    schema: Optional[Mapping[str, CovariateKind]] = None,
    column_map: Optional[Mapping[str, str]] = None,
) -> Dataset:
    """
    Read a subject CSV into a validated Dataset, preserving row order.

    Rows are numbered from 1 (the first data row) in errors.

    Raises:
        MissingColumn: a mapped or declared column is absent
        ParseError: a value cannot be read as a number
        InvariantViolation: a value breaks a record invariant or is missing
    """
    path = Path(path)
    if not path.is_file():
        raise MalformedInput(f"input file not found: {path}")
    column_map = dict(column_map or {})
    unknown = set(column_map) - set(COLUMN_MAP_KEYS)
    if unknown:
        raise MalformedInput(f"unknown column-map keys: {sorted(unknown)}")

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise MalformedInput(f"cannot read {path}: {e}")
    frame.columns = [c.strip() for c in frame.columns]

    t_col = column_map.get("t", "t")
    y1_col = column_map.get("y1", "y1")
    id_col = column_map.get("id", "id")
    for column in (t_col, y1_col):
        if column not in frame.columns:
            raise MissingColumn(column)

    prefix = column_map.get("y2_type_prefix")
    if prefix:
        y2_cols = [c for c in frame.columns if c.startswith(prefix)]
        if not y2_cols:
            raise MissingColumn(f"{prefix}*")
        y2 = sum(_numeric_column(frame, c) for c in y2_cols)
    else:
        y2_col = column_map.get("y2", "y2")
        if y2_col not in frame.columns:
            raise MissingColumn(y2_col)
        y2_cols = [y2_col]
        y2 = _numeric_column(frame, y2_col)

    reserved = {t_col, y1_col, id_col, *y2_cols}
    # Per-type primary indicators written alongside simulated cohorts are not covariates
    reserved |= {c for c in frame.columns if c.startswith("y1_") and c != y1_col}
    reserved |= {"y1", "y2"} & set(frame.columns)
    if schema is None:
        schema = read_schema(path)
    if schema is None:
        schema = infer_schema(frame, [c for c in frame.columns if c not in reserved])
    for name in schema:
        if name not in frame.columns:
            raise MissingColumn(name)

    covariates = {}
    for name, kind in schema.items():
        if kind is CovariateKind.NUMERIC:
            covariates[name] = _numeric_or_missing(frame, name)
        else:
            covariates[name] = frame[name].tolist()

    dataset = Dataset.from_columns(
        t=_numeric_column(frame, t_col),
        y1=_numeric_column(frame, y1_col),
        y2=y2,
        covariates=covariates,
        covariate_schema=dict(schema),
        ids=frame[id_col].tolist() if id_col in frame.columns else None,
    )
    logger.info("loaded %d subjects from %s (%d covariates)", dataset.n, path, len(schema))
    return dataset


def _numeric_or_missing(frame: pd.DataFrame, column: str) -> np.ndarray:
    """Empty cells become NaN (rejected later as missing); other unparseable cells are errors"""
    raw = frame[column]
    empty = (raw == "").to_numpy()
    parsed = pd.to_numeric(raw.where(~empty, None), errors="coerce")
    bad = np.flatnonzero(parsed.isna().to_numpy() & ~empty)
    if bad.size:
        row = int(bad[0])
        raise ParseError(row + 1, column, raw.iloc[row])
    return parsed.to_numpy(dtype=float)


def write_csv(
    dataset: Dataset,
    path: Union[str, Path],
    extra_columns: Optional[Mapping[str, np.ndarray]] = None,
) -> Path:
    """Write id, t, y1, y2, covariates, then any extra columns, plus the schema sidecar"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = dataset.to_frame()
    for name, values in (extra_columns or {}).items():
        frame[name] = np.asarray(values)
    frame.to_csv(path, index=False, encoding="utf-8")
    kinds = {name: kind.value for name, kind in dataset.covariate_schema.items()}
    schema_path(path).write_text(json.dumps(kinds, indent=2), encoding="utf-8")
    return path


class CsvDatasetRepository(IDatasetRepository):
    """Dataset repository over flat CSV files"""

    def load(self, path, schema=None, column_map=None) -> Dataset:
        return load_csv(path, schema, column_map)

    def save(self, dataset: Dataset, path, extra_columns=None) -> Path:
        return write_csv(dataset, path, extra_columns)
