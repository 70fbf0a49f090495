#!/usr/bin/env python3
"""
Nonparametric Bootstrap - Subject-level resampling for estimators without a sandwich
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.stats import norm
from tqdm import tqdm

from ...core.entities.errors import EstimationError
from ..config.settings import BootstrapConfig, settings
from ..simulation_services.rng import stream

logger = logging.getLogger(__name__)

# A statistic maps resampled row indices to one estimate
Statistic = Callable[[np.ndarray], float]


@dataclass
class BootstrapResult:
    std_err: float
    replicates: np.ndarray
    failures: int


def bootstrap_std_err(
    statistic: Statistic,
    n: int,
    ci_level: float,
    config: Optional[BootstrapConfig] = None,
    progress: bool = False,
) -> BootstrapResult:
    """
    Standard error from the percentile interval of B resampled estimates:
    (q_hi - q_lo) / (2 z), so the normal interval matches the percentile width.

    Resample b draws from its own stream keyed by (seed, b); results do not
    depend on the worker count. Resamples whose statistic raises an
    EstimationError are dropped and counted.
    """
    config = config or settings.bootstrap_config

    def one(b: int) -> float:
        idx = stream(config.seed, b).integers(0, n, size=n)
        try:
            return float(statistic(idx))
        except EstimationError:
            return float("nan")

    indices = range(config.replicates)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers, thread_name_prefix="Bootstrap") as executor:
            values = list(tqdm(executor.map(one, indices), total=config.replicates,
                               desc="bootstrap", disable=not progress))
    else:
        values = [one(b) for b in tqdm(indices, desc="bootstrap", disable=not progress)]

    values = np.asarray(values, dtype=float)
    finite = values[np.isfinite(values)]
    failures = int(values.size - finite.size)
    if failures:
        logger.warning("%d of %d bootstrap resamples were degenerate and dropped", failures, values.size)
    if finite.size < 2:
        raise EstimationError(f"only {finite.size} usable bootstrap resamples out of {values.size}")

    alpha = (1.0 - ci_level) / 2.0
    lo, hi = np.quantile(finite, [alpha, 1.0 - alpha])
    z = norm.ppf(1.0 - alpha)
    return BootstrapResult(std_err=float((hi - lo) / (2.0 * z)), replicates=finite, failures=failures)
