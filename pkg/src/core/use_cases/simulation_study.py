#!/usr/bin/env python3
"""
Simulation Study Use Case - Replicated generate-then-estimate runs and their summary
"""

import dataclasses
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..entities.analysis_options import AnalysisOptions
from ..entities.errors import AllRepsFailed, EstimationError, InvalidConfig, NCOError
from ..entities.estimate_result import EstimationMethod
from ..entities.generator_config import GeneratorConfig, ScenarioPreset, StudyDesign
from ..entities.regression_spec import RegressionSpec
from ..entities.strata import StratumSpec
from ..entities.study_records import (
    REP_COLUMNS,
    STATUS_FAILED,
    STATUS_OK,
    MethodSummary,
    RepRecord,
    StudySummary,
    finite_or_none,
)
from ..interfaces.dataset_repository import IDatasetRepository
from ..interfaces.estimation_service import IEstimationService
from ..interfaces.scenario_repository import IScenarioRepository
from ..interfaces.simulation_service import ISimulationService

logger = logging.getLogger(__name__)

RANDOMIZED_METHODS = (
    EstimationMethod.UNAUG, EstimationMethod.AUG, EstimationMethod.AUG_W, EstimationMethod.AUG_Y2W,
)
OBSERVATIONAL_METHODS = (
    EstimationMethod.MH, EstimationMethod.JOINT_NC, EstimationMethod.SS_JOINT,
    EstimationMethod.JOINT_MH, EstimationMethod.JOINT_REG,
)

# Covariate terms of the simulated cohorts (site is categorical, age numeric)
JOINT_REG_TERMS = "age+age^2+C(site)"
AUG_COVARIATE_TERMS = "age+C(site)"


@dataclass(frozen=True)
class StudyPlan:
    """Methods to run on every replication and the options each one gets"""
    methods: Tuple[EstimationMethod, ...]
    options: Dict[EstimationMethod, AnalysisOptions]

    @classmethod
    def default(
        cls,
        config: GeneratorConfig,
        methods: Optional[Sequence[EstimationMethod]] = None,
        bootstrap_replicates: Optional[int] = None,
    ) -> "StudyPlan":
        """
        Site x age strata with every age level its own bin, quadratic age and site
        indicators for Joint-Reg, age and site indicators for the covariate-augmented
        estimators.
        """
        if not methods:
            methods = RANDOMIZED_METHODS if config.design is StudyDesign.RANDOMIZED else OBSERVATIONAL_METHODS
        strata = StratumSpec(keys=("site", "age"), numeric_cuts={"age": tuple(config.age_levels[1:])})
        base = AnalysisOptions(strata=strata, bootstrap_replicates=bootstrap_replicates)
        options = {}
        for method in methods:
            if method is EstimationMethod.JOINT_REG:
                options[method] = dataclasses.replace(base, regression=RegressionSpec.symmetric(JOINT_REG_TERMS))
            elif method in (EstimationMethod.AUG_W, EstimationMethod.AUG_Y2W):
                options[method] = dataclasses.replace(base, regression=RegressionSpec.parse(f"primary={AUG_COVARIATE_TERMS}"))
            else:
                options[method] = base
        return cls(methods=tuple(methods), options=options)


@dataclass
class _RepContext:
    """Everything one replication needs; pickled to worker processes"""
    simulator: ISimulationService
    estimator: IEstimationService
    config: GeneratorConfig
    plan: StudyPlan
    seed: int
    true_beta1: float


def _run_rep(context: _RepContext, rep_index: int) -> List[RepRecord]:
    """Generate one cohort and run every planned method on it; failures become records"""
    cohort = context.simulator.generate(context.config, context.seed, rep_index)
    data = cohort.dataset
    seed = context.simulator.rep_seed(context.seed, rep_index)
    try:
        corr = float(context.estimator.correlation(data)["overall"])
    except EstimationError:
        corr = math.nan

    records = []
    for method in context.plan.methods:
        common = dict(
            scenario=context.config.name, n=data.n, rep_index=rep_index, seed=seed,
            method=method.value, corr_y1_y2=corr, true_beta1=context.true_beta1,
        )
        options = dataclasses.replace(context.plan.options[method], bootstrap_seed=seed)
        try:
            result = context.estimator.estimate(method, data, options)
        except NCOError as e:
            records.append(RepRecord(status=STATUS_FAILED, error=f"{type(e).__name__}: {e}", **common))
            continue
        if not (math.isfinite(result.beta1_hat) and math.isfinite(result.std_err)):
            records.append(RepRecord(status=STATUS_FAILED, error="non-finite estimate or standard error", **common))
            continue
        records.append(RepRecord(
            status=STATUS_OK,
            beta1_hat=result.beta1_hat,
            std_err=result.std_err,
            ci_lo=result.ci[0],
            ci_hi=result.ci[1],
            covered=int(result.covers(context.true_beta1)),
            **common,
        ))
    return records


def summarize(
    records: Sequence[RepRecord],
    methods: Sequence[EstimationMethod],
    config: GeneratorConfig,
    reps: int,
    seed: int,
    true_beta1: float,
    target_incidences: Sequence[float] = (),
    notes: Sequence[str] = (),
) -> StudySummary:
    """Per-method bias, variance, variance ratio against UnAug, coverage, mean SE and MSE"""
    by_method: Dict[str, List[RepRecord]] = {m.value: [] for m in methods}
    for record in records:
        by_method.setdefault(record.method, []).append(record)

    variances = {}
    summaries = []
    for name, rows in by_method.items():
        ok = [r for r in rows if r.ok]
        estimates = np.array([r.beta1_hat for r in ok], dtype=float)
        variance = float(np.var(estimates, ddof=1)) if len(ok) >= 2 else math.nan
        variances[name] = variance
        summaries.append(MethodSummary(
            method=name,
            reps=len(rows),
            successes=len(ok),
            failures=len(rows) - len(ok),
            mean_estimate=finite_or_none(float(np.mean(estimates))) if ok else None,
            bias=finite_or_none(float(np.mean(estimates)) - true_beta1) if ok else None,
            empirical_variance=finite_or_none(variance),
            empirical_sd=finite_or_none(math.sqrt(variance)) if variance >= 0 else None,
            coverage=float(np.mean([r.covered for r in ok])) if ok else None,
            mean_std_err=finite_or_none(float(np.mean([r.std_err for r in ok]))) if ok else None,
            mse=finite_or_none(float(np.mean((estimates - true_beta1) ** 2))) if ok else None,
        ))

    reference = variances.get(EstimationMethod.UNAUG.value)
    for summary in summaries:
        if summary.method == EstimationMethod.UNAUG.value:
            summary.variance_ratio = 1.0
        elif reference is not None and variances[summary.method] > 0:
            summary.variance_ratio = finite_or_none(reference / variances[summary.method])

    per_rep_corr = {r.rep_index: r.corr_y1_y2 for r in records}
    corr_values = np.array([c for c in per_rep_corr.values() if math.isfinite(c)])
    return StudySummary(
        scenario=config.name,
        design=config.design.value,
        n=config.n,
        reps=reps,
        seed=seed,
        true_beta1=true_beta1,
        target_incidences=list(target_incidences),
        a_values=list(config.a_values),
        mean_corr_y1_y2=finite_or_none(float(corr_values.mean())) if corr_values.size else None,
        methods=summaries,
        notes=list(notes),
    )


@dataclass
class StudyOutcome:
    summary: StudySummary
    records: List[RepRecord]
    reps_path: Optional[Path] = None
    summary_path: Optional[Path] = None
    cohort_paths: List[Path] = field(default_factory=list)


class SimulationStudyUseCase:
    """Use case for Monte Carlo studies over a scenario preset"""

    def __init__(
        self,
        scenario_repository: IScenarioRepository,
        simulation_service: ISimulationService,
        estimation_service: IEstimationService,
        dataset_repository: IDatasetRepository,
    ):
        self.scenario_repository = scenario_repository
        self.simulation_service = simulation_service
        self.estimation_service = estimation_service
        self.dataset_repository = dataset_repository

    def resolve(self, scenario: str, n: Optional[int] = None) -> Tuple[ScenarioPreset, GeneratorConfig]:
        preset = self.scenario_repository.load(scenario)
        return preset, self.scenario_repository.build_config(preset, n)

    def run_study(
        self,
        scenario: str,
        methods: Optional[Sequence[EstimationMethod]] = None,
        reps: int = 1000,
        seed: int = 1,
        workers: int = 1,
        n: Optional[int] = None,
        out_dir: Optional[Path] = None,
        bootstrap_replicates: Optional[int] = None,
        dump_first: int = 0,
        progress: bool = False,
    ) -> StudyOutcome:
        """
        Run `reps` replications of the scenario and summarize them against the true
        composite log relative risk.

        Results depend only on (scenario, n, methods, reps, seed): replication i
        always draws from stream (seed, i), whichever worker runs it. With `out_dir`
        the rep-level rows go to reps.csv and the summary to summary.json; both are
        written before AllRepsFailed is raised for a method with no usable replication.
        """
        if reps < 2:
            raise InvalidConfig(f"reps must be at least 2, got {reps}")
        if workers < 1:
            raise InvalidConfig(f"workers must be at least 1, got {workers}")
        preset, config = self.resolve(scenario, n)
        plan = StudyPlan.default(config, methods, bootstrap_replicates)
        true_beta1 = self.simulation_service.true_beta1(config)

        notes = []
        if config.design is StudyDesign.OBSERVATIONAL:
            augmented = [m.value for m in plan.methods if m.is_augmented]
            if augmented:
                notes.append(f"augmented estimators assume randomized treatment: {', '.join(augmented)}")
                logger.warning(notes[-1])

        logger.info("study %s: n=%d reps=%d seed=%d methods=%s workers=%d true beta1=%.5f",
                    config.name, config.n, reps, seed, ",".join(m.value for m in plan.methods),
                    workers, true_beta1)
        started = time.perf_counter()
        context = _RepContext(self.simulation_service, self.estimation_service, config, plan, seed, true_beta1)
        records = self._run_reps(context, reps, workers, progress)
        logger.info("study %s finished in %.1fs", config.name, time.perf_counter() - started)

        summary = summarize(records, plan.methods, config, reps, seed, true_beta1,
                            preset.target_incidences, notes)
        for method_summary in summary.methods:
            if method_summary.failures:
                logger.warning("%s: %d of %d replications failed", method_summary.method,
                               method_summary.failures, method_summary.reps)
            logger.info("%s: bias=%s var=%s coverage=%s", method_summary.method,
                        _fmt(method_summary.bias), _fmt(method_summary.empirical_variance),
                        _fmt(method_summary.coverage))

        outcome = StudyOutcome(summary=summary, records=records)
        if out_dir is not None:
            self._write(outcome, Path(out_dir))
            outcome.cohort_paths = self._dump_cohorts(config, seed, min(dump_first, reps), Path(out_dir))

        for method_summary in summary.methods:
            if method_summary.successes == 0:
                raise AllRepsFailed(method_summary.method)
        return outcome

    def _run_reps(self, context: _RepContext, reps: int, workers: int, progress: bool) -> List[RepRecord]:
        run = partial(_run_rep, context)
        bar = dict(total=reps, desc=context.config.name, unit="rep", disable=not progress)
        if workers == 1:
            per_rep = [run(i) for i in tqdm(range(reps), **bar)]
        else:
            chunksize = max(1, reps // (workers * 8))
            with ProcessPoolExecutor(max_workers=workers) as executor:
                per_rep = list(tqdm(executor.map(run, range(reps), chunksize=chunksize), **bar))
        return [record for rows in per_rep for record in rows]

    def _write(self, outcome: StudyOutcome, out_dir: Path):
        out_dir.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame([r.model_dump() for r in outcome.records], columns=list(REP_COLUMNS))
        frame["covered"] = frame["covered"].astype("Int64")
        outcome.reps_path = out_dir / "reps.csv"
        frame.to_csv(outcome.reps_path, index=False)
        outcome.summary_path = out_dir / "summary.json"
        outcome.summary_path.write_text(outcome.summary.model_dump_json(indent=2), encoding="utf-8")
        logger.info("wrote %s and %s", outcome.reps_path, outcome.summary_path)

    def _dump_cohorts(self, config: GeneratorConfig, seed: int, count: int, out_dir: Path) -> List[Path]:
        """Re-draw the first `count` cohorts (deterministic) and save them as subject CSVs"""
        paths = []
        for rep_index in range(count):
            cohort = self.simulation_service.generate(config, seed, rep_index)
            path = out_dir / "cohorts" / f"rep_{rep_index:04d}.csv"
            paths.append(self.dataset_repository.save(cohort.dataset, path, cohort.trace_columns()))
        if paths:
            logger.info("wrote %d cohort files to %s", len(paths), out_dir / "cohorts")
        return paths


def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.4f}"
