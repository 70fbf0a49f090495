import math

import pytest

from src.core.entities.errors import InvariantViolation
from src.core.entities.estimate_result import EstimateResult, EstimationMethod, wald_interval


def test_wald_interval_at_95():
    lo, hi = wald_interval(0.0, 1.0, 0.95)
    assert hi == pytest.approx(1.959964, abs=1e-6)
    assert lo == pytest.approx(-hi)


def test_invalid_level():
    with pytest.raises(InvariantViolation):
        wald_interval(0.0, 1.0, 1.0)


def test_build_fills_ve_and_interval():
    result = EstimateResult.build(EstimationMethod.UNAUG, math.log(0.5), 0.1, 0.9)
    assert result.ve == pytest.approx(0.5)
    lo, hi = result.ci
    assert hi - lo == pytest.approx(2 * 1.644854 * 0.1, abs=1e-6)
    ve_lo, ve_hi = result.ve_interval
    assert ve_lo == pytest.approx(1 - math.exp(hi))
    assert ve_lo < result.ve < ve_hi
    assert result.covers(math.log(0.5))
    assert not result.covers(0.0)


def test_components_define_the_estimate():
    result = EstimateResult.build(EstimationMethod.JOINT_NC, 99.0, 0.2, 0.95, components=(0.3, -0.2))
    assert result.beta1_hat == pytest.approx(0.5)
    metrics = result.get_result_metrics()
    assert metrics["beta1_star"] == 0.3
    assert metrics["beta2_star"] == -0.2
    assert metrics["method"] == "joint_nc"


def test_method_flags():
    assert EstimationMethod.AUG_W.is_augmented
    assert EstimationMethod.MH.needs_strata and not EstimationMethod.JOINT_NC.needs_strata
