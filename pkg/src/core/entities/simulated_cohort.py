#!/usr/bin/env python3
"""
SimulatedCohort Entity - A generated dataset with its hidden per-subject trace
"""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .subject_data import Dataset


@dataclass
class SimulatedCohort:
    """Observed dataset plus the unmeasured multiplier and per-type primary indicators"""
    dataset: Dataset
    a: np.ndarray
    y1_by_type: Dict[int, np.ndarray] = field(default_factory=dict)

    def trace_columns(self) -> Dict[str, np.ndarray]:
        """Per-type primary indicators, for writing alongside the dataset"""
        return {f"y1_{type_id}": values for type_id, values in self.y1_by_type.items()}
