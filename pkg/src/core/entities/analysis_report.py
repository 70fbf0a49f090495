#!/usr/bin/env python3
"""
AnalysisReport Entity - One estimate on one input file, as table and JSON
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel

from .estimate_result import EstimateResult


class AnalysisReport(BaseModel):
    """Machine-readable form of an `analyze` run"""
    input: str
    n: int
    n_treated: int
    n_control: int
    method: str
    strata: str = ""
    regression: str = ""
    augmentation: str = ""
    beta1_hat: float
    std_err: float
    ci_level: float
    ci_lo: float
    ci_hi: float
    ve: float
    ve_lo: float
    ve_hi: float
    beta1_star: Optional[float] = None
    beta2_star: Optional[float] = None
    correlation: Dict[str, Optional[float]] = {}
    diagnostics: Dict[str, Any] = {}

    @classmethod
    def from_result(cls, result: EstimateResult, **context: Any) -> "AnalysisReport":
        metrics = result.get_result_metrics()
        metrics.pop("method")
        return cls(method=result.method.value, diagnostics=result.diagnostics.to_dict(), **metrics, **context)

    def rows(self) -> List[List[str]]:
        """Label/value pairs for the human-readable table"""
        rows = [
            ["method", self.method],
            ["subjects", f"{self.n} ({self.n_treated} treated, {self.n_control} control)"],
        ]
        if self.strata:
            rows.append(["strata", self.strata])
        if self.regression:
            rows.append(["regression", self.regression])
        if self.augmentation:
            rows.append(["augmentation", self.augmentation])
        level = f"{100 * self.ci_level:g}%"
        rows += [
            ["beta1_hat", f"{self.beta1_hat:.5f}"],
            ["std_err", f"{self.std_err:.5f}"],
            [f"{level} CI", f"({self.ci_lo:.5f}, {self.ci_hi:.5f})"],
            ["VE", f"{self.ve:.4f}"],
            [f"{level} VE interval", f"({self.ve_lo:.4f}, {self.ve_hi:.4f})"],
        ]
        if self.beta1_star is not None:
            rows += [["beta1_star", f"{self.beta1_star:.5f}"], ["beta2_star", f"{self.beta2_star:.5f}"]]
        for arm, value in self.correlation.items():
            rows.append([f"corr(y1, y2) {arm}", "n/a" if value is None else f"{value:.4f}"])
        if self.diagnostics.get("iterations"):
            rows.append(["solver iterations", str(self.diagnostics["iterations"])])
        excluded = self.diagnostics.get("excluded_strata") or []
        if excluded:
            rows.append(["excluded strata", ", ".join(excluded)])
        for warning in self.diagnostics.get("warnings") or []:
            rows.append(["warning", warning])
        return rows

    def to_table(self) -> str:
        rows = self.rows()
        width = max(len(label) for label, _ in rows)
        return "\n".join(f"{label.ljust(width)}  {value}" for label, value in rows)
