#!/usr/bin/env python3
"""
Inverse-Variance Pooling - Fixed-effect combination of stratum-level estimates
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ...core.entities.errors import DimensionMismatch, ValidationError


@dataclass(frozen=True)
class PooledEstimate:
    estimate: float
    variance: float
    weights: np.ndarray

    def pool_like(self, values: Sequence[float]) -> float:
        """Combine other per-stratum quantities with the same weights"""
        values = np.asarray(values, dtype=float)
        if values.shape != self.weights.shape:
            raise DimensionMismatch(f"{values.shape[0]} values for {self.weights.shape[0]} weights")
        return float(np.sum(self.weights * values) / np.sum(self.weights))


def inverse_variance_pool(estimates: Sequence[float], variances: Sequence[float]) -> PooledEstimate:
    """
    Weighted mean with weights 1/variance; the pooled variance is 1/sum(weights)
    """
    estimates = np.asarray(estimates, dtype=float)
    variances = np.asarray(variances, dtype=float)
    if estimates.shape != variances.shape or estimates.ndim != 1:
        raise DimensionMismatch(f"{estimates.shape} estimates against {variances.shape} variances")
    if estimates.size == 0:
        raise ValidationError("nothing to pool")
    if np.any(~np.isfinite(variances)) or np.any(variances <= 0):
        raise ValidationError("pooled variances must be positive and finite")

    weights = 1.0 / variances
    total = float(weights.sum())
    return PooledEstimate(
        estimate=float(np.sum(weights * estimates) / total),
        variance=1.0 / total,
        weights=weights,
    )
