#!/usr/bin/env python3
"""
EstimateResult Entity - Log relative-risk estimates with Wald intervals and diagnostics
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from scipy.stats import norm

from .errors import InvariantViolation


class EstimationMethod(Enum):
    """Estimation methods for the treatment effect on the primary outcome"""
    UNAUG = "unaug"
    AUG = "aug"
    AUG_W = "aug_w"
    AUG_Y2W = "aug_y2w"
    MH = "mh"
    JOINT_NC = "joint_nc"
    SS_JOINT = "ss_joint"
    JOINT_MH = "joint_mh"
    JOINT_REG = "joint_reg"

    @property
    def is_augmented(self) -> bool:
        return self in (EstimationMethod.AUG, EstimationMethod.AUG_W, EstimationMethod.AUG_Y2W)

    @property
    def needs_strata(self) -> bool:
        return self in (EstimationMethod.MH, EstimationMethod.SS_JOINT, EstimationMethod.JOINT_MH)


@dataclass
class Diagnostics:
    """Solver and data diagnostics attached to an estimate"""
    iterations: int = 0
    excluded_strata: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    extra: Dict[str, Any] = field(default_factory=dict)

    def warn(self, message: str):
        if message not in self.warnings:
            self.warnings.append(message)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iterations": self.iterations,
            "excluded_strata": list(self.excluded_strata),
            "warnings": list(self.warnings),
            **self.extra,
        }


def wald_interval(estimate: float, std_err: float, ci_level: float) -> Tuple[float, float]:
    """Symmetric normal-theory interval on the log scale"""
    if not 0.0 < ci_level < 1.0:
        raise InvariantViolation(None, f"ci level must lie in (0, 1), got {ci_level}")
    z = norm.ppf((1.0 + ci_level) / 2.0)
    return estimate - z * std_err, estimate + z * std_err


@dataclass(frozen=True)
class EstimateResult:
    """
    Domain entity for one estimate of the log relative risk of the primary outcome
    """
    method: EstimationMethod
    beta1_hat: float
    std_err: float
    ci_level: float
    ci: Tuple[float, float]
    ve: float
    components: Optional[Tuple[float, float]] = None
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    @classmethod
    def build(
        cls,
        method: EstimationMethod,
        beta1_hat: float,
        std_err: float,
        ci_level: float,
        components: Optional[Tuple[float, float]] = None,
        diagnostics: Optional[Diagnostics] = None,
    ) -> "EstimateResult":
        """Fill in the Wald interval and VE from the point estimate and its SE"""
        if components is not None:
            beta1_hat = components[0] - components[1]
        return cls(
            method=method,
            beta1_hat=float(beta1_hat),
            std_err=float(std_err),
            ci_level=ci_level,
            ci=wald_interval(beta1_hat, std_err, ci_level),
            ve=1.0 - math.exp(beta1_hat),
            components=None if components is None else (float(components[0]), float(components[1])),
            diagnostics=diagnostics or Diagnostics(),
        )

    @property
    def ve_interval(self) -> Tuple[float, float]:
        lo, hi = self.ci
        return 1.0 - math.exp(hi), 1.0 - math.exp(lo)

    def covers(self, value: float) -> bool:
        return self.ci[0] <= value <= self.ci[1]

    def get_result_metrics(self) -> Dict[str, Any]:
        """Flat dictionary of the estimate for reports"""
        ve_lo, ve_hi = self.ve_interval
        metrics = {
            "method": self.method.value,
            "beta1_hat": self.beta1_hat,
            "std_err": self.std_err,
            "ci_level": self.ci_level,
            "ci_lo": self.ci[0],
            "ci_hi": self.ci[1],
            "ve": self.ve,
            "ve_lo": ve_lo,
            "ve_hi": ve_hi,
        }
        if self.components is not None:
            metrics["beta1_star"], metrics["beta2_star"] = self.components
        return metrics
