import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import assume, given, settings

from builders import make_config
from src.core.entities.errors import InvalidConfig, TargetUnreachable, ValidationError
from src.core.entities.estimate_result import EstimationMethod
from src.core.entities.generator_config import StudyDesign
from src.infrastructure.simulation_services.enumeration import (
    calibrate_intercepts,
    mean_y2,
    plim_oracle,
    primary_marginal,
    treatment_marginal,
    true_beta1_composite,
)

TWO_TYPES = dict(
    targeted_types=(16, 18),
    beta1=(math.log(0.5), math.log(0.5)),
    alpha1=(0.0, 0.0),
    lambda_site=((0.0, 0.0, 0.0),) * 2,
)
EFFECTS = dict(
    a_values=(0.0, 1.0, 2.0),
    alpha1=(0.15,),
    lambda_site=((-0.2, 0.0, 0.2),),
    alpha2=(0.02, 0.02),
    mu_site=((0.2, 0.0, -0.2),) * 2,
    mu1=(-10.0,),
    mu2=(-10.0, -10.5),
    beta1=(math.log(0.5),),
)


@settings(max_examples=40, deadline=None)
@given(
    gamma=st.floats(-6.0, -3.0),
    delta=st.floats(0.0, 0.3),
    eta=st.floats(-0.5, 0.5),
    theta=st.floats(0.0, 1.0),
)
def test_treatment_marginal_is_one_half(gamma, delta, eta, theta):
    try:
        config = make_config(
            design=StudyDesign.OBSERVATIONAL, a_values=(0.0, 1.0, 2.0),
            treatment_params=(gamma, delta, eta, theta),
        )
    except InvalidConfig:
        assume(False)
    assert treatment_marginal(config) == pytest.approx(0.5, abs=1e-12)


def test_calibration_without_effects_is_the_log_target():
    config = calibrate_intercepts(make_config(mu1=(-10.0,)), [0.05])
    assert config.mu1[0] == pytest.approx(math.log(0.05), abs=1e-12)


def test_calibration_with_covariate_effects():
    config = make_config(**{**EFFECTS, **TWO_TYPES, "alpha1": (0.15, 0.15),
                            "lambda_site": ((-0.2, 0.0, 0.2),) * 2, "mu1": (-10.0, -10.0)})
    calibrated = calibrate_intercepts(config, [0.14, 0.07], target_mean_y2=0.175)
    assert primary_marginal(calibrated, 0) == pytest.approx(0.14, abs=1e-10)
    assert primary_marginal(calibrated, 1) == pytest.approx(0.07, abs=1e-10)
    assert mean_y2(calibrated) == pytest.approx(0.175, abs=1e-10)


def test_unreachable_targets():
    with pytest.raises(TargetUnreachable):
        calibrate_intercepts(make_config(a_values=(0.0, 1.0, 2.0)), [0.9])
    with pytest.raises(ValidationError):
        calibrate_intercepts(make_config(), [0.05, 0.05])


def test_true_beta1_single_type():
    config = make_config(**EFFECTS)
    assert true_beta1_composite(config) == pytest.approx(math.log(0.5), abs=1e-12)


def test_true_beta1_of_two_types():
    config = make_config(mu1=(math.log(0.1), math.log(0.05)), **TWO_TYPES)
    assert true_beta1_composite(config) == pytest.approx(math.log(0.07375 / 0.145), abs=1e-12)
    assert true_beta1_composite(config) == pytest.approx(-0.676053, abs=1e-6)


def test_null_effect():
    config = make_config(mu1=(math.log(0.1), math.log(0.05)), **{**TWO_TYPES, "beta1": (0.0, 0.0)})
    assert true_beta1_composite(config) == pytest.approx(0.0, abs=1e-12)


def test_randomized_unaug_limit_is_the_truth():
    config = calibrate_intercepts(make_config(**{**EFFECTS, **TWO_TYPES, "alpha1": (0.15, 0.15),
                                                 "lambda_site": ((-0.2, 0.0, 0.2),) * 2,
                                                 "mu1": (-10.0, -10.0)}), [0.05, 0.05])
    assert plim_oracle(config, "unaug") == pytest.approx(true_beta1_composite(config), abs=1e-12)


def test_confounding_raises_the_unaug_limit():
    config = calibrate_intercepts(
        make_config(design=StudyDesign.OBSERVATIONAL, **EFFECTS), [0.05]
    )
    assert plim_oracle(config, EstimationMethod.UNAUG) - math.log(0.5) > 0.1


def test_joint_nc_limit_is_exact_without_covariate_effects():
    config = make_config(
        design=StudyDesign.OBSERVATIONAL,
        a_values=(0.0, 1.0, 2.0),
        mu1=(math.log(0.03),),
        beta1=(math.log(0.5),),
        mu2=(math.log(0.2), math.log(0.1)),
    )
    assert plim_oracle(config, "unaug") > math.log(0.5) + 0.1
    assert plim_oracle(config, "joint_nc") == pytest.approx(math.log(0.5), abs=1e-12)


def test_no_oracle_for_other_methods(config_factory):
    with pytest.raises(ValidationError):
        plim_oracle(config_factory(), "mh")


def test_cell_weights_are_a_distribution(config_factory):
    weights = config_factory(a_values=(0.0, 1.0, 2.0)).cell_weights()
    assert weights.shape == (3, 13, 3)
    assert np.sum(weights) == pytest.approx(1.0, abs=1e-14)
