#!/usr/bin/env python3
"""
Study Record Entities - Rep-level rows and per-method summaries of a simulation study
"""

import math
from typing import List, Optional

from pydantic import BaseModel, ConfigDict

# Column order of reps.csv
REP_COLUMNS = (
    "scenario", "n", "rep_index", "seed", "method", "status", "beta1_hat", "std_err",
    "ci_lo", "ci_hi", "covered", "corr_y1_y2", "true_beta1", "error",
)

STATUS_OK = "ok"
STATUS_FAILED = "failed"


class RepRecord(BaseModel):
    """One (replication, method) outcome; estimate fields are NaN when the method failed"""
    model_config = ConfigDict(frozen=True)

    scenario: str
    n: int
    rep_index: int
    seed: int
    method: str
    status: str
    beta1_hat: float = math.nan
    std_err: float = math.nan
    ci_lo: float = math.nan
    ci_hi: float = math.nan
    covered: Optional[int] = None
    corr_y1_y2: float = math.nan
    true_beta1: float = math.nan
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


class MethodSummary(BaseModel):
    """Aggregates for one method over the successful replications"""
    method: str
    reps: int
    successes: int
    failures: int
    mean_estimate: Optional[float] = None
    bias: Optional[float] = None
    empirical_variance: Optional[float] = None
    empirical_sd: Optional[float] = None
    variance_ratio: Optional[float] = None
    coverage: Optional[float] = None
    mean_std_err: Optional[float] = None
    mse: Optional[float] = None


class StudySummary(BaseModel):
    """summary.json"""
    scenario: str
    design: str
    n: int
    reps: int
    seed: int
    true_beta1: float
    target_incidences: List[float]
    a_values: List[float]
    mean_corr_y1_y2: Optional[float] = None
    methods: List[MethodSummary]
    notes: List[str] = []

    def method(self, name: str) -> MethodSummary:
        for summary in self.methods:
            if summary.method == name:
                return summary
        raise KeyError(name)


def finite_or_none(value: float) -> Optional[float]:
    """JSON-safe float: NaN and infinities become null"""
    return float(value) if value is not None and math.isfinite(value) else None
