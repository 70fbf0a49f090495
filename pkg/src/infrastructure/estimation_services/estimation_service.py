#!/usr/bin/env python3
"""
Estimation Service - Dispatches an EstimationMethod to its estimator
"""

import dataclasses
import logging
from typing import Any, Callable, Dict, Optional

from ...core.entities.analysis_options import AnalysisOptions
from ...core.entities.estimate_result import EstimateResult, EstimationMethod
from ...core.entities.regression_spec import Augmentation
from ...core.entities.subject_data import Dataset
from ...core.interfaces.estimation_service import IEstimationService
from ..config.settings import BootstrapConfig, SolverConfig, settings
from .estimators import (
    estimate_aug,
    estimate_joint_mh,
    estimate_joint_nc,
    estimate_joint_reg,
    estimate_mh,
    estimate_ss_joint,
    estimate_unaug,
    report_correlation,
)

logger = logging.getLogger(__name__)

# Method -> handler attribute
_HANDLERS: Dict[EstimationMethod, str] = {
    EstimationMethod.UNAUG: "_unaug",
    EstimationMethod.AUG: "_aug",
    EstimationMethod.AUG_W: "_aug_w",
    EstimationMethod.AUG_Y2W: "_aug_y2w",
    EstimationMethod.MH: "_mh",
    EstimationMethod.JOINT_NC: "_joint_nc",
    EstimationMethod.SS_JOINT: "_ss_joint",
    EstimationMethod.JOINT_MH: "_joint_mh",
    EstimationMethod.JOINT_REG: "_joint_reg",
}


class EstimationService(IEstimationService):
    """Estimation service backed by the estimators module"""

    def __init__(self, solver: Optional[SolverConfig] = None, bootstrap: Optional[BootstrapConfig] = None):
        self.solver = solver or settings.solver_config
        self.bootstrap = bootstrap or settings.bootstrap_config

    def estimate(self, method: EstimationMethod, data: Dataset, options: AnalysisOptions) -> EstimateResult:
        logger.debug("estimating %s on %d subjects", method.value, data.n)
        handler: Callable[[Dataset, AnalysisOptions], EstimateResult] = getattr(self, _HANDLERS[method])
        result = handler(data, options)
        if method.needs_strata and not options.strata.keys:
            result.diagnostics.warn("no stratum keys given; the whole dataset is one stratum")
        if method is EstimationMethod.JOINT_REG and not (
            options.regression.primary_terms or options.regression.secondary_terms
        ):
            result.diagnostics.warn("intercept-only regression; equivalent to joint_nc")
        return result

    def correlation(self, data: Dataset) -> Dict[str, Any]:
        report = report_correlation(data)
        return {"overall": report.overall, "control": report.control}

    def _bootstrap_for(self, options: AnalysisOptions) -> BootstrapConfig:
        overrides = {}
        if options.bootstrap_replicates is not None:
            overrides["replicates"] = options.bootstrap_replicates
        if options.bootstrap_seed is not None:
            overrides["seed"] = options.bootstrap_seed
        return dataclasses.replace(self.bootstrap, **overrides)

    def _unaug(self, data: Dataset, options: AnalysisOptions) -> EstimateResult:
        return estimate_unaug(data, options.ci_level, self.solver)

    def _aug(self, data: Dataset, options: AnalysisOptions) -> EstimateResult:
        return estimate_aug(data, options.augmentation, options.regression, options.ci_level, self.solver)

    def _aug_w(self, data: Dataset, options: AnalysisOptions) -> EstimateResult:
        return estimate_aug(data, Augmentation.W, options.regression, options.ci_level, self.solver)

    def _aug_y2w(self, data: Dataset, options: AnalysisOptions) -> EstimateResult:
        return estimate_aug(data, Augmentation.Y2_AND_W, options.regression, options.ci_level, self.solver)

    def _mh(self, data: Dataset, options: AnalysisOptions) -> EstimateResult:
        return estimate_mh(data, options.strata, options.ci_level, self._bootstrap_for(options), options.progress)

    def _joint_nc(self, data: Dataset, options: AnalysisOptions) -> EstimateResult:
        return estimate_joint_nc(data, options.ci_level, self.solver)

    def _ss_joint(self, data: Dataset, options: AnalysisOptions) -> EstimateResult:
        return estimate_ss_joint(data, options.strata, options.ci_level, self.solver)

    def _joint_mh(self, data: Dataset, options: AnalysisOptions) -> EstimateResult:
        return estimate_joint_mh(data, options.strata, options.ci_level, self._bootstrap_for(options), options.progress)

    def _joint_reg(self, data: Dataset, options: AnalysisOptions) -> EstimateResult:
        return estimate_joint_reg(data, options.regression, options.ci_level, self.solver)
