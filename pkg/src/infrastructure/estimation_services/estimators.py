#!/usr/bin/env python3
"""
Estimators - Log relative-risk estimators for the primary outcome

Model-based methods (UnAug, Aug*, Joint-NC, SS-Joint, Joint-Reg) solve estimating
equations and take their SE from the sandwich; the Mantel-Haenszel-type methods
(MH, Joint-MH) use a subject-level bootstrap.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ...core.entities.errors import (
    AllStrataDegenerate,
    DegenerateArm,
    DegenerateNegativeControl,
    EstimationError,
    NonpositiveAdjustedMean,
    RankDeficientDesign,
    ValidationError,
    ZeroVariance,
)
from ...core.entities.estimate_result import Diagnostics, EstimateResult, EstimationMethod
from ...core.entities.regression_spec import Augmentation, RegressionSpec
from ...core.entities.strata import StratumSpec, stratum_codes
from ...core.entities.subject_data import Dataset
from ..config.settings import BootstrapConfig, SolverConfig, settings
from .arm_means import augmentation_terms, fit_arm_means
from .bootstrap import bootstrap_std_err
from .design import DesignMatrixBuilder, rank_deficient
from .estimating_systems import (
    AugmentedLogRRSystem,
    LogBinomialScore,
    MeanResidualScore,
    StackedSystem,
    two_arm_builder,
)
from .m_estimation import contrast_variance, sandwich_covariance, solve
from .pooling import inverse_variance_pool

logger = logging.getLogger(__name__)

# beta1* - beta2* in the stacked (primary, secondary) two-arm system
JOINT_CONTRAST = np.array([0.0, 1.0, 0.0, -1.0])

_AUGMENTED_METHOD = {
    Augmentation.Y2: EstimationMethod.AUG,
    Augmentation.W: EstimationMethod.AUG_W,
    Augmentation.Y2_AND_W: EstimationMethod.AUG_Y2W,
}


@dataclass(frozen=True)
class ArmTotals:
    """Arm sizes and outcome totals"""
    n1: int
    n0: int
    x1: int
    z1: int
    x2: int
    z2: int

    @classmethod
    def of(cls, data: Dataset) -> "ArmTotals":
        treated = data.t.astype(bool)
        return cls(
            n1=int(treated.sum()),
            n0=int((~treated).sum()),
            x1=int(data.y1[treated].sum()),
            z1=int(data.y1[~treated].sum()),
            x2=int(data.y2[treated].sum()),
            z2=int(data.y2[~treated].sum()),
        )

    def require_primary_events(self):
        if self.x1 == 0 or self.z1 == 0:
            raise DegenerateArm(f"an arm has no primary events (treated={self.x1}, control={self.z1})")
        if self.x1 == self.n1 or self.z1 == self.n0:
            raise DegenerateArm("every subject in an arm has the primary event")

    def require_negative_control_events(self):
        if self.x2 == 0 or self.z2 == 0:
            raise DegenerateNegativeControl(
                f"an arm has no negative-control events (treated={self.x2}, control={self.z2})"
            )

    def two_arm_theta(self) -> np.ndarray:
        """Closed-form solution of the two-arm primary score: (log p0, log p1/p0)"""
        p1, p0 = self.x1 / self.n1, self.z1 / self.n0
        return np.array([math.log(p0), math.log(p1 / p0)])

    def two_arm_count_theta(self) -> np.ndarray:
        m1, m0 = self.x2 / self.n1, self.z2 / self.n0
        return np.array([math.log(m0), math.log(m1 / m0)])


def _ci(ci_level: Optional[float]) -> float:
    return settings.ci_level if ci_level is None else ci_level


def estimate_unaug(
    data: Dataset,
    ci_level: Optional[float] = None,
    solver: Optional[SolverConfig] = None,
) -> EstimateResult:
    """Log ratio of arm event rates with its sandwich SE"""
    data.require_both_arms()
    totals = ArmTotals.of(data)
    totals.require_primary_events()

    system = LogBinomialScore(two_arm_builder(data))
    report = solve(system, data, init=totals.two_arm_theta(), config=solver)
    cov = sandwich_covariance(system, data, report.theta_hat)
    return EstimateResult.build(
        EstimationMethod.UNAUG,
        beta1_hat=report.theta_hat[1],
        std_err=math.sqrt(cov[1, 1]),
        ci_level=_ci(ci_level),
        diagnostics=Diagnostics(iterations=report.iterations),
    )


def estimate_aug(
    data: Dataset,
    augmentation: Augmentation = Augmentation.Y2,
    regression: Optional[RegressionSpec] = None,
    ci_level: Optional[float] = None,
    solver: Optional[SolverConfig] = None,
) -> EstimateResult:
    """
    Augmented log relative risk for randomized trials.

    Adjusted arm means
        p1 = sum{T y1 - (T - pi1) E1} / sum T
        p0 = sum{(1-T) y1 + (T - pi1) E0} / sum(1-T)
    with pi1 = mean(T) and E_t the fitted E(Y1 | aux, T=t). They solve the augmented
    estimating equation exactly, so the solver only confirms the root.
    """
    data.require_both_arms()
    totals = ArmTotals.of(data)
    totals.require_primary_events()
    if regression is not None:
        regression.validate(data.covariate_schema, allow_y2=True)
    if augmentation is Augmentation.W and not augmentation_terms(augmentation, regression):
        raise ValidationError("augmentation on W needs covariate terms (primary=<terms>)")

    means = fit_arm_means(data, augmentation, regression)
    e1, e0 = means.predict(data)
    t = data.t.astype(float)
    y = data.y1.astype(float)
    pi1 = float(t.mean())
    centred = t - pi1

    p1 = (np.sum(t * y) - np.sum(centred * e1)) / totals.n1
    p0 = (np.sum((1.0 - t) * y) + np.sum(centred * e0)) / totals.n0
    if not (0.0 < p1 < 1.0 and 0.0 < p0 < 1.0):
        raise NonpositiveAdjustedMean(f"augmented arm means outside (0, 1): treated={p1:.4g}, control={p0:.4g}")

    system = AugmentedLogRRSystem(means, pi1)
    report = solve(system, data, init=np.array([math.log(p0), math.log(p1 / p0)]), config=solver)
    cov = sandwich_covariance(system, data, report.theta_hat)

    diagnostics = Diagnostics(iterations=report.iterations)
    for note in means.warnings:
        diagnostics.warn(note)
    diagnostics.extra.update({
        "pi1": pi1,
        "adjusted_treated_mean": float(p1),
        "adjusted_control_mean": float(p0),
        "arm_mean_models": f"{means.treated.kind}/{means.control.kind}",
    })
    return EstimateResult.build(
        _AUGMENTED_METHOD[augmentation],
        beta1_hat=report.theta_hat[1],
        std_err=math.sqrt(cov[1, 1]),
        ci_level=_ci(ci_level),
        diagnostics=diagnostics,
    )


def estimate_joint_nc(
    data: Dataset,
    ci_level: Optional[float] = None,
    solver: Optional[SolverConfig] = None,
) -> EstimateResult:
    """
    Primary log relative risk minus the negative-control log rate ratio, no covariates.
    SE from the four-parameter stacked sandwich.
    """
    data.require_both_arms()
    totals = ArmTotals.of(data)
    totals.require_primary_events()
    totals.require_negative_control_events()

    builder = two_arm_builder(data)
    system = StackedSystem([LogBinomialScore(builder), MeanResidualScore(builder)])
    init = np.concatenate([totals.two_arm_theta(), totals.two_arm_count_theta()])
    report = solve(system, data, init=init, config=solver)
    cov = sandwich_covariance(system, data, report.theta_hat)

    theta = report.theta_hat
    return EstimateResult.build(
        EstimationMethod.JOINT_NC,
        beta1_hat=theta[1] - theta[3],
        std_err=math.sqrt(contrast_variance(cov, JOINT_CONTRAST)),
        ci_level=_ci(ci_level),
        components=(theta[1], theta[3]),
        diagnostics=Diagnostics(iterations=report.iterations, extra={"cov_components": float(cov[1, 3])}),
    )


class StratifiedTallies:
    """
    Per-subject stratum codes with the columns the Mantel-Haenszel sums need, so that
    bootstrap resamples can be re-tallied without rebuilding datasets.
    """

    def __init__(self, data: Dataset, spec: StratumSpec):
        self.codes, self.labels = stratum_codes(data, spec)
        self.t = data.t.astype(float)
        self.y1 = data.y1.astype(float)
        self.y2 = data.y2.astype(float)

    @property
    def k(self) -> int:
        return len(self.labels)

    def sums(self, idx: Optional[np.ndarray] = None) -> Tuple[float, float, float, float]:
        """(sum n0 x1/n, sum n1 z1/n, sum n0 x2/n, sum n1 z2/n) over strata"""
        codes, t, y1, y2 = self.codes, self.t, self.y1, self.y2
        if idx is not None:
            codes, t, y1, y2 = codes[idx], t[idx], y1[idx], y2[idx]
        c = 1.0 - t
        n1 = np.bincount(codes, weights=t, minlength=self.k)
        n0 = np.bincount(codes, weights=c, minlength=self.k)
        nk = n1 + n0
        inv = np.divide(1.0, nk, out=np.zeros_like(nk), where=nk > 0)

        def tally(weights: np.ndarray) -> np.ndarray:
            return np.bincount(codes, weights=weights, minlength=self.k)

        return (
            float(np.sum(n0 * tally(t * y1) * inv)),
            float(np.sum(n1 * tally(c * y1) * inv)),
            float(np.sum(n0 * tally(t * y2) * inv)),
            float(np.sum(n1 * tally(c * y2) * inv)),
        )

    def single_arm_strata(self):
        """Labels of strata lacking treated or control subjects (zero MH weight)"""
        n1 = np.bincount(self.codes, weights=self.t, minlength=self.k)
        n0 = np.bincount(self.codes, weights=1.0 - self.t, minlength=self.k)
        return [label for label, a, b in zip(self.labels, n1, n0) if a == 0 or b == 0]


def _mh_diagnostics(tallies: StratifiedTallies) -> Diagnostics:
    diagnostics = Diagnostics(extra={"strata": tallies.k})
    excluded = tallies.single_arm_strata()
    if excluded:
        diagnostics.excluded_strata.extend(excluded)
        diagnostics.warn(f"{len(excluded)} stratum(s) with a single arm contribute zero weight")
        logger.warning("%d of %d strata have a single arm", len(excluded), tallies.k)
    return diagnostics


def _log_ratio(numerator: float, denominator: float) -> float:
    if numerator <= 0 or denominator <= 0:
        raise AllStrataDegenerate("a Mantel-Haenszel sum is zero over all strata")
    return math.log(numerator / denominator)


def estimate_mh(
    data: Dataset,
    spec: StratumSpec,
    ci_level: Optional[float] = None,
    bootstrap: Optional[BootstrapConfig] = None,
    progress: bool = False,
) -> EstimateResult:
    """Mantel-Haenszel-type stratified log relative risk, bootstrap SE"""
    data.require_both_arms()
    ci_level = _ci(ci_level)
    tallies = StratifiedTallies(data, spec)
    num, den, _, _ = tallies.sums()
    beta1 = _log_ratio(num, den)
    diagnostics = _mh_diagnostics(tallies)

    def statistic(idx: np.ndarray) -> float:
        a, b, _, _ = tallies.sums(idx)
        return _log_ratio(a, b)

    boot = bootstrap_std_err(statistic, data.n, ci_level, bootstrap, progress)
    diagnostics.extra.update({"bootstrap_replicates": int(boot.replicates.size), "bootstrap_failures": boot.failures})
    return EstimateResult.build(EstimationMethod.MH, beta1, boot.std_err, ci_level, diagnostics=diagnostics)


def estimate_joint_mh(
    data: Dataset,
    spec: StratumSpec,
    ci_level: Optional[float] = None,
    bootstrap: Optional[BootstrapConfig] = None,
    progress: bool = False,
) -> EstimateResult:
    """Log of the primary MH ratio over the negative-control MH ratio, bootstrap SE"""
    data.require_both_arms()
    ci_level = _ci(ci_level)
    tallies = StratifiedTallies(data, spec)
    num1, den1, num2, den2 = tallies.sums()
    beta1_star = _log_ratio(num1, den1)
    beta2_star = _log_ratio(num2, den2)
    diagnostics = _mh_diagnostics(tallies)

    def statistic(idx: np.ndarray) -> float:
        a1, b1, a2, b2 = tallies.sums(idx)
        return _log_ratio(a1, b1) - _log_ratio(a2, b2)

    boot = bootstrap_std_err(statistic, data.n, ci_level, bootstrap, progress)
    diagnostics.extra.update({"bootstrap_replicates": int(boot.replicates.size), "bootstrap_failures": boot.failures})
    return EstimateResult.build(
        EstimationMethod.JOINT_MH,
        beta1_hat=beta1_star - beta2_star,
        std_err=boot.std_err,
        ci_level=ci_level,
        components=(beta1_star, beta2_star),
        diagnostics=diagnostics,
    )


def estimate_ss_joint(
    data: Dataset,
    spec: StratumSpec,
    ci_level: Optional[float] = None,
    solver: Optional[SolverConfig] = None,
) -> EstimateResult:
    """
    Joint-NC within each stratum, pooled with inverse-variance weights.
    Strata where Joint-NC cannot be computed are excluded and listed.
    """
    data.require_both_arms()
    codes, labels = stratum_codes(data, spec)
    estimates, variances, primaries, secondaries = [], [], [], []
    diagnostics = Diagnostics(extra={"strata": len(labels)})

    for k, label in enumerate(labels):
        stratum = data.subset(codes == k)
        try:
            result = estimate_joint_nc(stratum, ci_level, solver)
        except (EstimationError, ValidationError) as e:
            diagnostics.excluded_strata.append(label)
            logger.debug("stratum %s excluded: %s", label, e)
            continue
        variance = result.std_err ** 2
        if not variance > 0:
            diagnostics.excluded_strata.append(label)
            continue
        estimates.append(result.beta1_hat)
        variances.append(variance)
        primaries.append(result.components[0])
        secondaries.append(result.components[1])
        diagnostics.iterations += result.diagnostics.iterations

    if not estimates:
        raise AllStrataDegenerate(f"none of {len(labels)} strata supports a Joint-NC estimate")
    if diagnostics.excluded_strata:
        diagnostics.warn(f"{len(diagnostics.excluded_strata)} stratum(s) excluded for zero events")
        logger.warning("SS-Joint excluded %d of %d strata", len(diagnostics.excluded_strata), len(labels))

    pooled = inverse_variance_pool(estimates, variances)
    return EstimateResult.build(
        EstimationMethod.SS_JOINT,
        beta1_hat=pooled.estimate,
        std_err=math.sqrt(pooled.variance),
        ci_level=_ci(ci_level),
        components=(pooled.pool_like(primaries), pooled.pool_like(secondaries)),
        diagnostics=diagnostics,
    )


def estimate_joint_reg(
    data: Dataset,
    regression: RegressionSpec,
    ci_level: Optional[float] = None,
    solver: Optional[SolverConfig] = None,
) -> EstimateResult:
    """
    Covariate-adjusted joint estimator: log-binomial primary model with the primary
    terms, log-linear mean model for y2 with the secondary terms, both with treatment.
    """
    data.require_both_arms()
    regression.validate(data.covariate_schema)
    totals = ArmTotals.of(data)
    totals.require_primary_events()
    totals.require_negative_control_events()

    builders = []
    for side, terms in (("primary", regression.primary_terms), ("secondary", regression.secondary_terms)):
        builder = DesignMatrixBuilder(terms).fit(data)
        if rank_deficient(builder.transform(data)):
            raise RankDeficientDesign(f"{side} design {builder.column_names} is not full rank")
        builders.append(builder)

    system = StackedSystem([LogBinomialScore(builders[0]), MeanResidualScore(builders[1])])
    report = solve(system, data, config=solver)
    cov = sandwich_covariance(system, data, report.theta_hat)

    primary, secondary = system.offset_of(0, "t"), system.offset_of(1, "t")
    contrast = np.zeros(system.dim_theta)
    contrast[primary], contrast[secondary] = 1.0, -1.0
    theta = report.theta_hat
    return EstimateResult.build(
        EstimationMethod.JOINT_REG,
        beta1_hat=theta[primary] - theta[secondary],
        std_err=math.sqrt(contrast_variance(cov, contrast)),
        ci_level=_ci(ci_level),
        components=(theta[primary], theta[secondary]),
        diagnostics=Diagnostics(iterations=report.iterations, extra={"regression": regression.render()}),
    )


@dataclass(frozen=True)
class CorrelationReport:
    overall: float
    control: float


def report_correlation(data: Dataset) -> CorrelationReport:
    """Pearson correlation of y1 and y2, overall and within the control arm (nan if degenerate there)"""
    y1 = data.y1.astype(float)
    y2 = data.y2.astype(float)
    if y1.std() == 0 or y2.std() == 0:
        raise ZeroVariance("y1 or y2 has zero variance")
    overall = float(np.corrcoef(y1, y2)[0, 1])

    control = data.t == 0
    c1, c2 = y1[control], y2[control]
    if c1.size < 2 or c1.std() == 0 or c2.std() == 0:
        within = float("nan")
    else:
        within = float(np.corrcoef(c1, c2)[0, 1])
    return CorrelationReport(overall=overall, control=within)
