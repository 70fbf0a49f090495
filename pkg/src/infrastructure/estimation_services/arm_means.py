#!/usr/bin/env python3
"""
Arm Conditional Means - Per-arm models of E(Y1 | auxiliary data, T=t) for augmentation
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
import statsmodels.api as sm

from ...core.entities.regression_spec import Augmentation, RegressionSpec, RegressionTerm, Y2_TERM
from ...core.entities.subject_data import Dataset
from .design import DesignMatrixBuilder, drop_constant_columns

try:
    from statsmodels.tools.sm_exceptions import PerfectSeparationError, PerfectSeparationWarning
except ImportError:
    # statsmodels < 0.14 raises instead of warning
    from statsmodels.tools.sm_exceptions import PerfectSeparationError
    PerfectSeparationWarning = None

logger = logging.getLogger(__name__)

# Fitted probabilities this close to 0 or 1 indicate (quasi-)separation
_SEPARATION_EPS = 1e-8


@dataclass
class ArmConditionalMeanModel:
    """
    E(Y1 | regressors, T=arm), fitted on one arm and evaluated on any subject.

    kind is "saturated" (cell means over y2 values), "logistic" (logit-linear in the
    regressors) or "constant" (the arm mean, used when the logistic fit breaks down).
    """
    arm: int
    terms: Tuple[RegressionTerm, ...]
    kind: str
    arm_mean: float
    cell_means: Optional[dict] = None
    builder: Optional[DesignMatrixBuilder] = None
    kept_columns: Optional[List[int]] = None
    coefficients: Optional[np.ndarray] = None

    def predict(self, data: Dataset) -> np.ndarray:
        if self.kind == "constant":
            return np.full(data.n, self.arm_mean)
        if self.kind == "saturated":
            cells = pd.Series(data.y2).map(self.cell_means)
            return cells.fillna(self.arm_mean).to_numpy(dtype=float)
        x = self.builder.transform(data)[:, self.kept_columns]
        return 1.0 / (1.0 + np.exp(-(x @ self.coefficients)))


@dataclass
class ArmConditionalMeans:
    """The treated and control models, evaluated together"""
    treated: ArmConditionalMeanModel
    control: ArmConditionalMeanModel
    warnings: List[str] = field(default_factory=list)

    def predict(self, data: Dataset) -> Tuple[np.ndarray, np.ndarray]:
        """(E1, E0): each subject's conditional risk under treatment and under control"""
        return self.treated.predict(data), self.control.predict(data)


def augmentation_terms(augmentation: Augmentation, regression: Optional[RegressionSpec]) -> Tuple[RegressionTerm, ...]:
    """Regressors of the conditional-mean models; y2 enters linearly and first"""
    covariate_terms = tuple(
        term for term in (regression.primary_terms if regression else ()) if term.name != Y2_TERM
    )
    y2_term = (RegressionTerm(Y2_TERM),)
    if augmentation is Augmentation.Y2:
        return y2_term
    if augmentation is Augmentation.W:
        return covariate_terms
    return y2_term + covariate_terms


def fit_arm_means(
    data: Dataset,
    augmentation: Augmentation = Augmentation.Y2,
    regression: Optional[RegressionSpec] = None,
) -> ArmConditionalMeans:
    """
    Fit E(Y1 | aux, T=t) separately in each arm.

    With y2 as the only auxiliary variable and at most two observed y2 values the
    models are saturated cell means; otherwise a logistic regression per arm.
    Separation never raises: the affected arm falls back to its sample mean and a
    warning is recorded.
    """
    data.require_both_arms()
    terms = augmentation_terms(augmentation, regression)
    notes: List[str] = []

    if augmentation is Augmentation.Y2 and np.unique(data.y2).size <= 2:
        models = [_saturated(data, arm, terms, notes) for arm in (1, 0)]
    else:
        builder = DesignMatrixBuilder(terms, include_treatment=False).fit(data)
        models = [_logistic(data, arm, terms, builder, notes) for arm in (1, 0)]

    return ArmConditionalMeans(treated=models[0], control=models[1], warnings=notes)


def _saturated(data: Dataset, arm: int, terms, notes: List[str]) -> ArmConditionalMeanModel:
    mask = data.t == arm
    y1 = data.y1[mask].astype(float)
    y2 = data.y2[mask]
    arm_mean = float(y1.mean())
    cells = {int(v): float(y1[y2 == v].mean()) for v in np.unique(y2)}
    for level in np.unique(data.y2):
        if int(level) not in cells:
            notes.append(f"arm {arm}: no subjects with y2={int(level)}; using the arm mean for that cell")
    return ArmConditionalMeanModel(arm=arm, terms=terms, kind="saturated", arm_mean=arm_mean, cell_means=cells)


def _logistic(
    data: Dataset,
    arm: int,
    terms,
    builder: DesignMatrixBuilder,
    notes: List[str],
) -> ArmConditionalMeanModel:
    mask = data.t == arm
    y1 = data.y1[mask].astype(float)
    arm_mean = float(y1.mean())

    def fallback(reason: str) -> ArmConditionalMeanModel:
        message = f"arm {arm}: {reason}; falling back to the arm mean"
        logger.warning(message)
        notes.append(message)
        return ArmConditionalMeanModel(arm=arm, terms=terms, kind="constant", arm_mean=arm_mean)

    if arm_mean in (0.0, 1.0):
        return fallback("primary outcome is constant")

    design = builder.transform(data.subset(mask))
    reduced, kept = drop_constant_columns(design)
    if np.linalg.matrix_rank(reduced) < reduced.shape[1]:
        return fallback("augmentation design is rank deficient")

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            fit = sm.GLM(y1, reduced, family=sm.families.Binomial()).fit()
    except (PerfectSeparationError, np.linalg.LinAlgError, ValueError) as e:
        return fallback(f"logistic fit failed ({e})")

    if PerfectSeparationWarning is not None and any(issubclass(w.category, PerfectSeparationWarning) for w in caught):
        return fallback("perfect separation in the logistic fit")
    fitted = np.asarray(fit.fittedvalues)
    if not fit.converged or not np.all(np.isfinite(fit.params)) \
            or fitted.min() < _SEPARATION_EPS or fitted.max() > 1.0 - _SEPARATION_EPS:
        return fallback("logistic fit did not converge or separated")

    return ArmConditionalMeanModel(
        arm=arm,
        terms=terms,
        kind="logistic",
        arm_mean=arm_mean,
        builder=builder,
        kept_columns=kept,
        coefficients=np.asarray(fit.params, dtype=float),
    )
