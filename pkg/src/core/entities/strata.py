#!/usr/bin/env python3
"""
Stratification Entities - Stratum definitions and per-stratum sufficient statistics
"""

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .errors import InvariantViolation, UnbinnedNumericKey, ValidationError
from .subject_data import CovariateKind, Dataset


@dataclass(frozen=True)
class StratumSpec:
    """
    Covariates defining strata; numeric keys are binned on half-open intervals [cut, next_cut)
    """
    keys: Tuple[str, ...] = ()
    numeric_cuts: Mapping[str, Tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "keys", tuple(self.keys))
        object.__setattr__(self, "numeric_cuts", {k: tuple(float(c) for c in v) for k, v in self.numeric_cuts.items()})
        for name, cuts in self.numeric_cuts.items():
            if any(b <= a for a, b in zip(cuts, cuts[1:])):
                raise InvariantViolation(None, f"cut points for '{name}' must be strictly ascending: {cuts}")

    def validate(self, schema: Mapping[str, CovariateKind]):
        """Check the spec against a dataset schema"""
        for key in self.keys:
            if key not in schema:
                raise ValidationError(f"stratum key '{key}' is not a covariate")
            if schema[key] is CovariateKind.NUMERIC and not self.numeric_cuts.get(key):
                raise UnbinnedNumericKey(key)
            if schema[key] is CovariateKind.CATEGORICAL and key in self.numeric_cuts:
                raise ValidationError(f"cut points given for categorical key '{key}'")

    def bin_labels(self, key: str) -> List[str]:
        cuts = self.numeric_cuts[key]
        edges = ["-inf"] + [_fmt(c) for c in cuts] + ["inf"]
        labels = []
        for i, (lo, hi) in enumerate(zip(edges, edges[1:])):
            left = "(" if i == 0 else "["
            labels.append(f"{left}{lo},{hi})")
        return labels


@dataclass(frozen=True)
class StratumCounts:
    """
    Sufficient statistics of one stratum for the Mantel-Haenszel-type estimators
    """
    stratum_label: str
    x1k: int
    z1k: int
    x2k: int
    z2k: int
    n1k: int
    n0k: int
    nk: int

    def __post_init__(self):
        if self.nk != self.n1k + self.n0k:
            raise InvariantViolation(None, f"stratum {self.stratum_label}: nk != n1k + n0k")
        if not (0 <= self.x1k <= self.n1k and 0 <= self.z1k <= self.n0k):
            raise InvariantViolation(None, f"stratum {self.stratum_label}: primary event counts out of range")
        if self.x2k < 0 or self.z2k < 0:
            raise InvariantViolation(None, f"stratum {self.stratum_label}: negative-control sums must be nonnegative")

    def has_both_arms(self) -> bool:
        return self.n1k > 0 and self.n0k > 0


def stratum_codes(dataset: Dataset, spec: StratumSpec) -> Tuple[np.ndarray, List[str]]:
    """Integer stratum code per subject, and the label of each code (first-seen order)"""
    spec.validate(dataset.covariate_schema)
    if not spec.keys:
        return np.zeros(dataset.n, dtype=np.int64), ["all"]

    key_codes = []
    key_labels = []
    for key in spec.keys:
        values = dataset.covariates[key]
        if dataset.covariate_schema[key] is CovariateKind.NUMERIC:
            bins = np.searchsorted(np.asarray(spec.numeric_cuts[key]), values, side="right")
            names = spec.bin_labels(key)
            codes, uniques = pd.factorize(bins, sort=False)
            key_labels.append([f"{key}={names[b]}" for b in uniques])
        else:
            codes, uniques = pd.factorize(values, sort=False)
            key_labels.append([f"{key}={u}" for u in uniques])
        key_codes.append(codes.astype(np.int64))

    combined = np.zeros(dataset.n, dtype=np.int64)
    for codes, labels in zip(key_codes, key_labels):
        combined = combined * len(labels) + codes
    codes, uniques = pd.factorize(combined, sort=False)

    labels = []
    for packed in uniques:
        parts = []
        for key_idx in range(len(spec.keys) - 1, -1, -1):
            size = len(key_labels[key_idx])
            parts.append(key_labels[key_idx][packed % size])
            packed //= size
        labels.append("|".join(reversed(parts)))
    return codes.astype(np.int64), labels


def stratify(dataset: Dataset, spec: StratumSpec) -> List[StratumCounts]:
    """One StratumCounts per observed stratum combination"""
    codes, labels = stratum_codes(dataset, spec)
    k = len(labels)
    t = dataset.t.astype(np.int64)
    c = 1 - t
    y1 = dataset.y1.astype(np.int64)
    y2 = dataset.y2

    x1 = np.bincount(codes, weights=t * y1, minlength=k)
    z1 = np.bincount(codes, weights=c * y1, minlength=k)
    x2 = np.bincount(codes, weights=t * y2, minlength=k)
    z2 = np.bincount(codes, weights=c * y2, minlength=k)
    n1 = np.bincount(codes, weights=t, minlength=k)
    n0 = np.bincount(codes, weights=c, minlength=k)

    return [
        StratumCounts(
            stratum_label=labels[i],
            x1k=int(x1[i]), z1k=int(z1[i]), x2k=int(x2[i]), z2k=int(z2[i]),
            n1k=int(n1[i]), n0k=int(n0[i]), nk=int(n1[i] + n0[i]),
        )
        for i in range(k)
    ]


def _fmt(value: float) -> str:
    return f"{value:g}"
