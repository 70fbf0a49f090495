#!/usr/bin/env python3
"""
Estimation Service Interface - Contract for running an estimator on a dataset
"""

from abc import ABC, abstractmethod
from typing import Any, Dict

from ..entities.analysis_options import AnalysisOptions
from ..entities.estimate_result import EstimateResult, EstimationMethod
from ..entities.subject_data import Dataset


class IEstimationService(ABC):
    """Interface for the estimation methods"""

    @abstractmethod
    def estimate(self, method: EstimationMethod, data: Dataset, options: AnalysisOptions) -> EstimateResult:
        """Run one method; raises ValidationError or EstimationError"""
        pass

    @abstractmethod
    def correlation(self, data: Dataset) -> Dict[str, Any]:
        """Correlation of y1 and y2, overall and within the control arm"""
        pass
