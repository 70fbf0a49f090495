#!/usr/bin/env python3
"""
Domain Errors - Validation and estimation failures raised across the library
"""

from typing import Any, Optional


class NCOError(Exception):
    """Base class for every error raised by this package"""
    exit_code: int = 1


class ValidationError(NCOError, ValueError):
    """Input, schema or configuration does not satisfy a precondition"""
    exit_code = 2


class EstimationError(NCOError, ArithmeticError):
    """An estimator could not produce a result for valid input"""
    exit_code = 3


# Validation errors

class MissingColumn(ValidationError):
    def __init__(self, column: str):
        super().__init__(f"required column '{column}' not found in header")
        self.column = column


class ParseError(ValidationError):
    def __init__(self, row: int, column: str, value: Any = None):
        super().__init__(f"row {row}: cannot parse column '{column}' (value={value!r})")
        self.row = row
        self.column = column


class InvariantViolation(ValidationError):
    def __init__(self, row: Optional[int], reason: str):
        where = f"row {row}: " if row is not None else ""
        super().__init__(f"{where}{reason}")
        self.row = row
        self.reason = reason


class UnbinnedNumericKey(ValidationError):
    def __init__(self, key: str):
        super().__init__(f"numeric stratum key '{key}' needs cut points")
        self.key = key


class InvalidConfig(ValidationError):
    pass


class InvalidScenario(ValidationError):
    pass


class MalformedInput(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class TargetUnreachable(ValidationError):
    pass


# Estimation errors

class NonConvergence(EstimationError):
    def __init__(self, report: Any, message: str = "solver did not converge"):
        super().__init__(f"{message} (iterations={getattr(report, 'iterations', '?')}, "
                         f"score norm={getattr(report, 'final_score_norm', float('nan')):.3g})")
        self.report = report


class SingularJacobian(EstimationError):
    pass


class InadmissibleInit(EstimationError):
    pass


class SingularBread(EstimationError):
    pass


class DegenerateArm(EstimationError):
    pass


class DegenerateNegativeControl(EstimationError):
    pass


class NonpositiveAdjustedMean(EstimationError):
    pass


class AllStrataDegenerate(EstimationError):
    pass


class RankDeficientDesign(EstimationError):
    pass


class ZeroVariance(EstimationError):
    pass


class AllRepsFailed(EstimationError):
    def __init__(self, method: str):
        super().__init__(f"every replication failed for method '{method}'")
        self.method = method
