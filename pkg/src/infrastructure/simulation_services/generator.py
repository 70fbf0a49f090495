#!/usr/bin/env python3
"""
Cohort Generator - Simulated trial or observational cohorts from a GeneratorConfig
"""

import numpy as np

from ...core.entities.generator_config import GeneratorConfig, StudyDesign
from ...core.entities.simulated_cohort import SimulatedCohort
from ...core.entities.subject_data import CovariateKind, Dataset
from .rng import stream

COVARIATE_SCHEMA = {"site": CovariateKind.CATEGORICAL, "age": CovariateKind.NUMERIC}


def generate(config: GeneratorConfig, seed: int, *stream_key: int) -> SimulatedCohort:
    """
    Draw one cohort of size config.n.

    The draw order is fixed (W, A, T, targeted types, non-targeted types), so
    (config, seed, stream_key) determines the cohort exactly.
    """
    rng = stream(seed, *stream_key)
    n = config.n
    n_ages = len(config.age_levels)

    site_idx = rng.integers(0, len(config.site_levels), size=n)
    age_idx = rng.integers(0, n_ages, size=n)
    ages = np.asarray(config.age_levels, dtype=float)[age_idx]

    cumulative = np.cumsum(config.a_prob_table()[site_idx, age_idx], axis=1)
    u = rng.random(n)
    a_idx = (u >= cumulative[:, 0]).astype(np.int64) + (u >= cumulative[:, 1]).astype(np.int64)
    a = np.asarray(config.a_values, dtype=float)[a_idx]

    if config.design is StudyDesign.RANDOMIZED:
        p_treated = np.full(n, 0.5)
    else:
        p_treated = config.treatment_probability()[site_idx, age_idx, a_idx]
    t = (rng.random(n) < p_treated).astype(np.int64)

    y1_by_type = {}
    for j, type_id in enumerate(config.targeted_types):
        risk = config.primary_risk(j, 0)[site_idx, age_idx, a_idx] * np.exp(config.beta1[j] * t)
        y1_by_type[type_id] = (rng.random(n) < risk).astype(np.int64)
    y1 = np.zeros(n, dtype=np.int64)
    for values in y1_by_type.values():
        y1 |= values

    y2 = np.zeros(n, dtype=np.int64)
    for j in range(config.n_nt):
        risk = config.secondary_risk(j, 0)[site_idx, age_idx, a_idx] * np.exp(config.beta2[j] * t)
        y2 += (rng.random(n) < risk).astype(np.int64)

    sites = np.asarray([str(s) for s in config.site_levels], dtype=object)[site_idx]
    dataset = Dataset.from_columns(
        t=t, y1=y1, y2=y2,
        covariates={"site": sites, "age": ages},
        covariate_schema=COVARIATE_SCHEMA,
    )
    return SimulatedCohort(dataset=dataset, a=a, y1_by_type=y1_by_type)
