#!/usr/bin/env python3
"""
Subject Data Entities - Subject records and the validated, immutable Dataset

A Dataset is stored column-wise (numpy arrays, read-only) so estimators can work
on whole arms at once; `records` gives the per-subject view.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .errors import InvariantViolation, ValidationError

CovariateValue = Union[str, float]


class CovariateKind(Enum):
    """Kinds of covariate a schema can declare"""
    CATEGORICAL = "categorical"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class SubjectRecord:
    """
    One subject: treatment, primary outcome, negative-control count and covariates
    """
    id: str
    t: int
    y1: int
    y2: int
    covariates: Mapping[str, CovariateValue] = field(default_factory=dict)

    def __post_init__(self):
        if self.t not in (0, 1):
            raise InvariantViolation(None, f"subject {self.id}: t must be 0 or 1, got {self.t!r}")
        if self.y1 not in (0, 1):
            raise InvariantViolation(None, f"subject {self.id}: y1 must be 0 or 1, got {self.y1!r}")
        if int(self.y2) != self.y2 or self.y2 < 0:
            raise InvariantViolation(None, f"subject {self.id}: y2 must be a nonnegative integer, got {self.y2!r}")


def _readonly(values: np.ndarray) -> np.ndarray:
    values = np.array(values, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Domain entity holding n validated subjects in column form
    """
    ids: Tuple[str, ...]
    t: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    covariates: Mapping[str, np.ndarray]
    covariate_schema: Mapping[str, CovariateKind]

    @classmethod
    def from_columns(
        cls,
        t: Sequence[int],
        y1: Sequence[int],
        y2: Sequence[int],
        covariates: Optional[Mapping[str, Sequence[CovariateValue]]] = None,
        covariate_schema: Optional[Mapping[str, CovariateKind]] = None,
        ids: Optional[Sequence[str]] = None,
    ) -> "Dataset":
        """Build and validate a Dataset from parallel columns"""
        t_arr = np.asarray(t)
        y1_arr = np.asarray(y1)
        y2_arr = np.asarray(y2)
        n = len(t_arr)
        if n < 1:
            raise InvariantViolation(None, "dataset must contain at least one subject")
        if len(y1_arr) != n or len(y2_arr) != n:
            raise InvariantViolation(None, "t, y1 and y2 columns differ in length")

        _check_binary(t_arr, "t")
        _check_binary(y1_arr, "y1")
        y2_float = y2_arr.astype(float)
        bad = np.flatnonzero((y2_float < 0) | (y2_float != np.floor(y2_float)) | ~np.isfinite(y2_float))
        if bad.size:
            raise InvariantViolation(int(bad[0]) + 1, f"y2 must be a nonnegative integer, got {y2_arr[bad[0]]!r}")

        covariates = dict(covariates or {})
        schema = dict(covariate_schema or {})
        if set(covariates) != set(schema):
            raise InvariantViolation(None, f"covariates {sorted(covariates)} do not match schema {sorted(schema)}")

        columns: Dict[str, np.ndarray] = {}
        for name, kind in schema.items():
            raw = covariates[name]
            if len(raw) != n:
                raise InvariantViolation(None, f"covariate '{name}' has {len(raw)} values for {n} subjects")
            columns[name] = _readonly(_coerce_covariate(name, kind, raw))

        if ids is None:
            ids = [str(i + 1) for i in range(n)]
        elif len(ids) != n:
            raise InvariantViolation(None, "ids column differs in length")

        return cls(
            ids=tuple(str(i) for i in ids),
            t=_readonly(t_arr.astype(np.int8)),
            y1=_readonly(y1_arr.astype(np.int8)),
            y2=_readonly(y2_float.astype(np.int64)),
            covariates=columns,
            covariate_schema=schema,
        )

    @classmethod
    def from_records(
        cls,
        records: Iterable[SubjectRecord],
        covariate_schema: Mapping[str, CovariateKind],
    ) -> "Dataset":
        """Build a Dataset from SubjectRecords conforming to a schema"""
        records = list(records)
        schema = dict(covariate_schema)
        for row, record in enumerate(records, start=1):
            if set(record.covariates) != set(schema):
                raise InvariantViolation(row, f"covariates {sorted(record.covariates)} do not match schema {sorted(schema)}")
        return cls.from_columns(
            t=[r.t for r in records],
            y1=[r.y1 for r in records],
            y2=[r.y2 for r in records],
            covariates={name: [r.covariates[name] for r in records] for name in schema},
            covariate_schema=schema,
            ids=[r.id for r in records],
        )

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def records(self) -> Tuple[SubjectRecord, ...]:
        """Per-subject view, in stored order"""
        names = list(self.covariate_schema)
        return tuple(
            SubjectRecord(
                id=self.ids[i],
                t=int(self.t[i]),
                y1=int(self.y1[i]),
                y2=int(self.y2[i]),
                covariates={name: _scalar(self.covariates[name][i]) for name in names},
            )
            for i in range(self.n)
        )

    def column(self, name: str) -> np.ndarray:
        """Covariate column by name, or one of t / y1 / y2"""
        if name in ("t", "y1", "y2"):
            return getattr(self, name)
        if name not in self.covariates:
            raise ValidationError(f"unknown covariate '{name}'")
        return self.covariates[name]

    def take(self, indices: Sequence[int]) -> "Dataset":
        """New Dataset made of the given rows (repeats allowed)"""
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size == 0:
            raise InvariantViolation(None, "cannot build an empty dataset")
        return Dataset(
            ids=tuple(self.ids[i] for i in idx),
            t=_readonly(self.t[idx]),
            y1=_readonly(self.y1[idx]),
            y2=_readonly(self.y2[idx]),
            covariates={name: _readonly(col[idx]) for name, col in self.covariates.items()},
            covariate_schema=dict(self.covariate_schema),
        )

    def subset(self, mask: np.ndarray) -> "Dataset":
        return self.take(np.flatnonzero(mask))

    def duplicated(self) -> "Dataset":
        """Every record twice, in order"""
        return self.take(np.concatenate([np.arange(self.n), np.arange(self.n)]))

    def with_y2(self, y2: Sequence[int]) -> "Dataset":
        return Dataset.from_columns(self.t, self.y1, y2, self.covariates, self.covariate_schema, self.ids)

    def arm_sizes(self) -> Tuple[int, int]:
        """(treated, control) subject counts"""
        n1 = int(self.t.sum())
        return n1, self.n - n1

    def require_both_arms(self):
        n1, n0 = self.arm_sizes()
        if n1 < 1 or n0 < 1:
            raise InvariantViolation(None, f"both arms must be nonempty (treated={n1}, control={n0})")

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"id": list(self.ids), "t": self.t, "y1": self.y1, "y2": self.y2})
        for name, col in self.covariates.items():
            frame[name] = col
        return frame

    def equals(self, other: "Dataset") -> bool:
        """Field-for-field equality"""
        if self.ids != other.ids or dict(self.covariate_schema) != dict(other.covariate_schema):
            return False
        if not (np.array_equal(self.t, other.t) and np.array_equal(self.y1, other.y1)
                and np.array_equal(self.y2, other.y2)):
            return False
        return all(np.array_equal(self.covariates[k], other.covariates[k]) for k in self.covariate_schema)


def _check_binary(values: np.ndarray, name: str):
    as_float = values.astype(float)
    bad = np.flatnonzero((as_float != 0) & (as_float != 1))
    if bad.size:
        raise InvariantViolation(int(bad[0]) + 1, f"{name} must be 0 or 1, got {values[bad[0]]!r}")


def _coerce_covariate(name: str, kind: CovariateKind, raw: Sequence[CovariateValue]) -> np.ndarray:
    if kind is CovariateKind.NUMERIC:
        try:
            values = np.asarray(raw, dtype=float)
        except (TypeError, ValueError):
            raise InvariantViolation(None, f"covariate '{name}' is declared numeric but has non-numeric values")
        missing = np.flatnonzero(~np.isfinite(values))
        if missing.size:
            raise InvariantViolation(int(missing[0]) + 1, f"missing value for covariate '{name}'")
        return values
    labels: List[str] = []
    for row, value in enumerate(raw, start=1):
        if value is None or (isinstance(value, float) and np.isnan(value)) or str(value) == "":
            raise InvariantViolation(row, f"missing value for covariate '{name}'")
        labels.append(str(value))
    return np.asarray(labels, dtype=object)


def _scalar(value) -> CovariateValue:
    return float(value) if isinstance(value, (np.floating, float, int, np.integer)) else str(value)
