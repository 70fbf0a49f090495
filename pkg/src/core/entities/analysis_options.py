#!/usr/bin/env python3
"""
AnalysisOptions Entity - Method-specific inputs for one estimation run
"""

from dataclasses import dataclass, field
from typing import Optional

from .regression_spec import Augmentation, RegressionSpec
from .strata import StratumSpec


@dataclass(frozen=True)
class AnalysisOptions:
    """
    Everything an estimator may need besides the data.

    `strata` is used by MH, SS-Joint and Joint-MH; `regression` by Joint-Reg (both
    sides) and by the augmented methods (primary side, as augmentation regressors).
    """
    strata: StratumSpec = field(default_factory=StratumSpec)
    regression: RegressionSpec = field(default_factory=RegressionSpec)
    augmentation: Augmentation = Augmentation.Y2
    ci_level: Optional[float] = None
    bootstrap_replicates: Optional[int] = None
    bootstrap_seed: Optional[int] = None
    progress: bool = False
