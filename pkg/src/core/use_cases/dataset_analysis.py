#!/usr/bin/env python3
"""
Dataset Analysis Use Case - One estimator on one subject-level file
"""

import logging
import math
from pathlib import Path
from typing import Mapping, Optional, Union

from ..entities.analysis_options import AnalysisOptions
from ..entities.analysis_report import AnalysisReport
from ..entities.errors import ZeroVariance
from ..entities.estimate_result import EstimationMethod
from ..entities.subject_data import CovariateKind
from ..interfaces.dataset_repository import IDatasetRepository
from ..interfaces.estimation_service import IEstimationService

logger = logging.getLogger(__name__)


class DatasetAnalysisUseCase:
    """Use case for analyzing a subject CSV"""

    def __init__(self, dataset_repository: IDatasetRepository, estimation_service: IEstimationService):
        self.dataset_repository = dataset_repository
        self.estimation_service = estimation_service

    def analyze(
        self,
        input_path: Union[str, Path],
        method: EstimationMethod,
        options: Optional[AnalysisOptions] = None,
        schema: Optional[Mapping[str, CovariateKind]] = None,
        column_map: Optional[Mapping[str, str]] = None,
        out_path: Optional[Union[str, Path]] = None,
    ) -> AnalysisReport:
        """
        Load, estimate and report. With `out_path` the JSON report is written there
        and the table next to it with a .txt suffix.
        """
        options = options or AnalysisOptions()
        data = self.dataset_repository.load(input_path, schema, column_map)
        result = self.estimation_service.estimate(method, data, options)
        for warning in result.diagnostics.warnings:
            logger.warning("%s: %s", method.value, warning)
        if result.diagnostics.excluded_strata:
            logger.warning("%s: %d strata excluded", method.value, len(result.diagnostics.excluded_strata))

        try:
            correlation = self.estimation_service.correlation(data)
        except ZeroVariance as e:
            logger.warning("correlation not reported: %s", e)
            correlation = {}

        n1, n0 = data.arm_sizes()
        report = AnalysisReport.from_result(
            result,
            input=str(input_path),
            n=data.n,
            n_treated=n1,
            n_control=n0,
            strata="|".join(options.strata.keys) if method.needs_strata else "",
            regression=options.regression.render()
            if method is EstimationMethod.JOINT_REG or method.is_augmented else "",
            augmentation=options.augmentation.value if method is EstimationMethod.AUG else "",
            correlation={k: (v if math.isfinite(v) else None) for k, v in correlation.items()},
        )
        if out_path is not None:
            self._write(report, Path(out_path))
        return report

    def _write(self, report: AnalysisReport, out_path: Path):
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
        out_path.with_suffix(".txt").write_text(report.to_table() + "\n", encoding="utf-8")
        logger.info("wrote %s", out_path)
