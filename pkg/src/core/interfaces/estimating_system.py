#!/usr/bin/env python3
"""
Estimating System Interface - Contract for per-subject estimating functions
"""

from abc import ABC, abstractmethod
from typing import List, Sequence, Tuple

import numpy as np

from ..entities.subject_data import CovariateKind, Dataset, SubjectRecord


class IEstimatingSystem(ABC):
    """
    Vector-valued estimating function U(record; theta) with analytic derivative.

    Implementations evaluate all subjects at once: `scores` returns the n x p matrix
    whose rows are the per-subject contributions, `jacobians` the n x p x p array of
    their derivatives with respect to theta.
    """

    @property
    @abstractmethod
    def dim_theta(self) -> int:
        """Parameter count p"""
        pass

    @property
    @abstractmethod
    def parameter_names(self) -> List[str]:
        pass

    @abstractmethod
    def scores(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        """Per-subject estimating function contributions, shape (n, p)"""
        pass

    @abstractmethod
    def jacobians(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        """Per-subject derivative of the score, shape (n, p, p)"""
        pass

    @abstractmethod
    def initial_theta(self, data: Dataset) -> np.ndarray:
        pass

    def jacobian_sum(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        """Sum over subjects of the score derivative, shape (p, p)"""
        return self.jacobians(data, theta).sum(axis=0)

    def is_admissible(self, data: Dataset, theta: np.ndarray) -> bool:
        return bool(np.all(np.isfinite(theta)))

    def blocks(self) -> Sequence[Tuple[slice, "IEstimatingSystem"]]:
        """Independent parameter blocks; a plain system is a single block"""
        return [(slice(0, self.dim_theta), self)]

    def score(self, record: SubjectRecord, theta: np.ndarray) -> np.ndarray:
        """Estimating function contribution of a single subject"""
        return self.scores(_single(record), np.asarray(theta, dtype=float))[0]

    def jacobian(self, record: SubjectRecord, theta: np.ndarray) -> np.ndarray:
        return self.jacobians(_single(record), np.asarray(theta, dtype=float))[0]


def _single(record: SubjectRecord) -> Dataset:
    schema = {
        name: CovariateKind.CATEGORICAL if isinstance(value, str) else CovariateKind.NUMERIC
        for name, value in record.covariates.items()
    }
    return Dataset.from_records([record], schema)
