#!/usr/bin/env python3
"""
Dataset Repository Interface - Contract for reading and writing subject data
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np

from ..entities.subject_data import CovariateKind, Dataset


class IDatasetRepository(ABC):
    """Interface for subject-level dataset storage"""

    @abstractmethod
    def load(
        self,
        path: Union[str, Path],
        schema: Optional[Mapping[str, CovariateKind]] = None,
        column_map: Optional[Mapping[str, str]] = None,
    ) -> Dataset:
        """Read and validate a dataset"""
        pass

    @abstractmethod
    def save(
        self,
        dataset: Dataset,
        path: Union[str, Path],
        extra_columns: Optional[Mapping[str, np.ndarray]] = None,
    ) -> Path:
        """Write a dataset; returns the path written"""
        pass
