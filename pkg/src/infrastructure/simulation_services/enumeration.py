#!/usr/bin/env python3
"""
Exact Enumeration - Marginals, calibration and estimator limits over the finite
(site, age, A, T) space of a GeneratorConfig
"""

import logging
import math
from typing import Optional, Sequence, Union

import numpy as np

from ...core.entities.errors import InvalidConfig, TargetUnreachable, ValidationError
from ...core.entities.estimate_result import EstimationMethod
from ...core.entities.generator_config import GeneratorConfig

logger = logging.getLogger(__name__)

# Marginal incidences reproduce their targets to this absolute tolerance
CALIBRATION_TOLERANCE = 1e-10


def _arm_weights(config: GeneratorConfig, t: int) -> np.ndarray:
    """P(site, age, A, T=t) over the grid"""
    p_treated = config.treatment_probability()
    return config.cell_weights() * (p_treated if t == 1 else 1.0 - p_treated)


def treatment_marginal(config: GeneratorConfig) -> float:
    """P(T=1); 0.5 by construction for both designs"""
    return float(np.sum(_arm_weights(config, 1)))


def primary_marginal(config: GeneratorConfig, j: int, intercept: Optional[float] = None) -> float:
    """P(Y1^(j) = 1) averaged over W, A and the assigned T"""
    return float(sum(np.sum(_arm_weights(config, t) * config.primary_risk(j, t, intercept)) for t in (0, 1)))


def mean_y2(config: GeneratorConfig) -> float:
    return float(sum(
        np.sum(_arm_weights(config, t) * config.secondary_risk(j, t))
        for t in (0, 1) for j in range(config.n_nt)
    ))


def calibrate_intercepts(
    config: GeneratorConfig,
    target_incidences: Sequence[float],
    target_mean_y2: Optional[float] = None,
) -> GeneratorConfig:
    """
    Intercepts mu1_j giving P(Y1^(j) = 1) = target_j, and optionally a common shift of
    every mu2_j giving E[Y2] = target_mean_y2.

    Every marginal is exp(mu) times a constant, so the root of the (increasing)
    marginal is log(target / marginal at mu = 0); the result is re-enumerated.

    Raises:
        TargetUnreachable: the calibrated risks would exceed 1 somewhere
    """
    targets = [float(p) for p in target_incidences]
    if len(targets) != len(config.targeted_types):
        raise ValidationError(f"{len(targets)} targets for {len(config.targeted_types)} targeted types")
    if not all(0.0 < p < 1.0 for p in targets):
        raise ValidationError(f"target incidences must lie in (0, 1), got {targets}")

    mu1 = tuple(math.log(p / primary_marginal(config, j, intercept=0.0)) for j, p in enumerate(targets))
    changes = {"mu1": mu1}
    if target_mean_y2 is not None:
        shift = math.log(target_mean_y2 / mean_y2(config))
        changes["mu2"] = tuple(m + shift for m in config.mu2)

    try:
        calibrated = config.with_updates(**changes)
    except InvalidConfig as e:
        raise TargetUnreachable(f"targets {targets} violate the validity bound: {e}") from None

    for j, p in enumerate(targets):
        achieved = primary_marginal(calibrated, j)
        if abs(achieved - p) > CALIBRATION_TOLERANCE:
            raise TargetUnreachable(f"type {config.targeted_types[j]}: calibrated incidence {achieved!r} != {p}")
    logger.info("calibrated %s: mu1=%s", config.name, ", ".join(f"{m:.4f}" for m in mu1))
    return calibrated


def true_beta1_composite(config: GeneratorConfig) -> float:
    """
    log E[Y1c | do(T=1)] - log E[Y1c | do(T=0)]: the composite risk is averaged over
    the population distribution of (W, A) with treatment forced for everyone.
    """
    weights = config.cell_weights()
    treated = float(np.sum(weights * config.composite_risk(1)))
    control = float(np.sum(weights * config.composite_risk(0)))
    if treated <= 0 or control <= 0:
        raise InvalidConfig("composite risk is zero under one intervention")
    return math.log(treated / control)


def arm_means(config: GeneratorConfig, t: int):
    """(E[Y1c | T=t], E[Y2 | T=t]) by Bayes over the assignment probabilities"""
    weights = _arm_weights(config, t)
    total = float(np.sum(weights))
    y1 = float(np.sum(weights * config.composite_risk(t))) / total
    y2 = sum(float(np.sum(weights * config.secondary_risk(j, t))) for j in range(config.n_nt)) / total
    return y1, y2


def plim_oracle(config: GeneratorConfig, estimator: Union[str, EstimationMethod]) -> float:
    """
    Large-sample limit of the unadjusted log relative risk (unaug) or of the
    negative-control-corrected version (joint_nc)
    """
    method = EstimationMethod(estimator) if isinstance(estimator, str) else estimator
    if method not in (EstimationMethod.UNAUG, EstimationMethod.JOINT_NC):
        raise ValidationError(f"no enumeration oracle for '{method.value}'")
    y1_treated, y2_treated = arm_means(config, 1)
    y1_control, y2_control = arm_means(config, 0)
    unaug = math.log(y1_treated / y1_control)
    if method is EstimationMethod.UNAUG:
        return unaug
    return unaug - math.log(y2_treated / y2_control)
