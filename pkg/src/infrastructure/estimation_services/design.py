#!/usr/bin/env python3
"""
Design Matrices - Regressor columns built from RegressionTerms
"""

from typing import Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from ...core.entities.errors import ValidationError
from ...core.entities.regression_spec import Y2_TERM, RegressionTerm, TermTransform
from ...core.entities.subject_data import Dataset


class DesignMatrixBuilder:
    """
    Intercept, optional treatment column, then one block per term.

    Categorical terms expand to indicators of every level except the reference, which
    is the first level observed in the dataset passed to `fit`. Numeric columns are
    standardized with the fit-time mean and SD; with an intercept present this leaves
    the column space, and so the treatment coefficient, unchanged.
    """

    def __init__(self, terms: Sequence[RegressionTerm], include_treatment: bool = True):
        self.terms = tuple(terms)
        self.include_treatment = include_treatment
        self.levels: Dict[str, List[str]] = {}
        self.scaling: Dict[RegressionTerm, Tuple[float, float]] = {}
        self._fitted = False

    def fit(self, data: Dataset) -> "DesignMatrixBuilder":
        for term in self.terms:
            if term.transform is TermTransform.CATEGORICAL:
                uniques = pd.unique(np.asarray(data.column(term.name), dtype=object))
                self.levels[term.name] = [str(u) for u in uniques]
            else:
                raw = self._raw_values(term, data)
                sd = float(raw.std())
                self.scaling[term] = (float(raw.mean()), sd if sd > 0 else 1.0)
        self._fitted = True
        return self

    @property
    def column_names(self) -> List[str]:
        names = ["intercept"] + (["t"] if self.include_treatment else [])
        for term in self.terms:
            if term.transform is TermTransform.CATEGORICAL:
                names.extend(f"{term.name}[{level}]" for level in self.levels[term.name][1:])
            else:
                names.append(term.render())
        return names

    def transform(self, data: Dataset) -> np.ndarray:
        if not self._fitted:
            raise ValidationError("design builder used before fit")
        columns = [np.ones(data.n)]
        if self.include_treatment:
            columns.append(data.t.astype(float))
        for term in self.terms:
            columns.extend(self._term_columns(term, data))
        return np.column_stack(columns)

    def _term_columns(self, term: RegressionTerm, data: Dataset) -> List[np.ndarray]:
        if term.transform is TermTransform.CATEGORICAL:
            values = np.asarray(data.column(term.name), dtype=object).astype(str)
            return [(values == level).astype(float) for level in self.levels[term.name][1:]]
        center, scale = self.scaling[term]
        return [(self._raw_values(term, data) - center) / scale]

    @staticmethod
    def _raw_values(term: RegressionTerm, data: Dataset) -> np.ndarray:
        source = data.y2 if term.name == Y2_TERM else data.column(term.name)
        values = np.asarray(source, dtype=float)
        if term.transform is TermTransform.SQUARE:
            return values ** 2
        return values


def rank_deficient(design: np.ndarray) -> bool:
    return np.linalg.matrix_rank(design) < design.shape[1]


def drop_constant_columns(design: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Keep the intercept and every non-constant column; returns the kept indices too"""
    keep = [0] + [j for j in range(1, design.shape[1]) if np.ptp(design[:, j]) > 0]
    return design[:, keep], keep
