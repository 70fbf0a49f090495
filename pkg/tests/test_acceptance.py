"""
Monte Carlo acceptance studies. Slow; run with `pytest -m slow`.
"""

import math

import numpy as np
import pytest

from builders import make_config
from src.core.entities.analysis_options import AnalysisOptions
from src.core.entities.estimate_result import EstimationMethod
from src.core.entities.generator_config import StudyDesign
from src.core.entities.regression_spec import RegressionSpec
from src.infrastructure.config.settings import BootstrapConfig
from src.infrastructure.estimation_services.bootstrap import bootstrap_std_err
from src.infrastructure.estimation_services.estimators import estimate_joint_nc, estimate_joint_reg
from src.infrastructure.simulation_services.enumeration import calibrate_intercepts, plim_oracle
from src.infrastructure.simulation_services.generator import generate
from src.main.app import app

pytestmark = pytest.mark.slow

M = EstimationMethod
WORKERS = 4
FULL_ADJUSTMENT = "age+age^2+C(site)"


def _study(scenario, **kwargs):
    kwargs.setdefault("workers", WORKERS)
    return app.get_study_use_case().run_study(scenario, **kwargs).summary


def _config(scenario, n):
    return app.get_study_use_case().resolve(scenario, n)[1]


def test_large_cohort_matches_the_enumerated_limits():
    config = calibrate_intercepts(
        make_config(
            n=500_000,
            design=StudyDesign.OBSERVATIONAL,
            a_values=(0.0, 1.0, 2.0),
            beta1=(math.log(0.5),),
            mu2=(math.log(0.2), math.log(0.1)),
        ),
        [0.03],
    )
    data = generate(config, 2024, 0).dataset
    service = app.estimation_service
    for method, name in ((M.UNAUG, "unaug"), (M.JOINT_NC, "joint_nc")):
        result = service.estimate(method, data, AnalysisOptions())
        assert abs(result.beta1_hat - plim_oracle(config, name)) < 3 * result.std_err, name
    assert plim_oracle(config, "joint_nc") == pytest.approx(math.log(0.5), abs=1e-12)


def test_randomized_coverage():
    summary = _study("rand_medium_medium", reps=1000, seed=11)
    for method in ("unaug", "aug", "aug_w", "aug_y2w"):
        row = summary.method(method)
        assert row.failures == 0, method
        assert 0.93 <= row.coverage <= 0.97, method
        assert abs(row.bias) < 0.05, method
        assert abs(row.mean_std_err / row.empirical_sd - 1.0) < 0.1, method


def test_randomized_joint_standard_errors_track_the_spread():
    summary = _study("rand_medium_medium", reps=1000, seed=15, methods=[M.UNAUG, M.JOINT_NC, M.JOINT_REG])
    for method in ("joint_nc", "joint_reg"):
        row = summary.method(method)
        assert row.failures == 0, method
        assert abs(row.mean_std_err / row.empirical_sd - 1.0) < 0.1, method


def test_joint_nc_sandwich_agrees_with_the_bootstrap():
    config = _config("obs_medium_medium", 2000)
    for rep in range(3):
        data = generate(config, 16, rep).dataset
        sandwich = estimate_joint_nc(data).std_err
        boot = bootstrap_std_err(
            lambda idx: estimate_joint_nc(data.take(idx)).beta1_hat,
            data.n, 0.95, BootstrapConfig(replicates=2000, seed=rep, workers=WORKERS),
        )
        assert abs(boot.std_err / sandwich - 1.0) < 0.15, rep


def test_randomized_negative_control_component_is_centred_at_zero():
    config = _config("rand_medium_medium", 2000)
    regression = RegressionSpec.symmetric(FULL_ADJUSTMENT)
    beta2_star = np.array([
        estimate_joint_reg(generate(config, 17, rep).dataset, regression).components[1]
        for rep in range(300)
    ])
    assert abs(beta2_star.mean()) < 3 * beta2_star.std(ddof=1) / math.sqrt(beta2_star.size)


def test_augmentation_gains_grow_with_incidence():
    ladder = [
        _study(scenario, reps=1000, seed=12, methods=[M.UNAUG, M.AUG])
        for scenario in ("rand_low_low", "rand_medium_medium", "rand_high_high")
    ]
    low, medium, high = (summary.method("aug").variance_ratio for summary in ladder)
    assert medium >= 1.0
    assert high >= 1.05
    assert low <= medium <= high
    assert ladder[2].mean_corr_y1_y2 > ladder[0].mean_corr_y1_y2


def test_observational_bias_ordering():
    summary = _study("obs_medium_medium", reps=1000, seed=13, bootstrap_replicates=100)
    mh = summary.method("mh").bias
    jnc = summary.method("joint_nc").bias
    jmh = summary.method("joint_mh").bias
    jreg = summary.method("joint_reg").bias
    assert mh > 0.3
    assert 0.1 < jnc < mh
    assert abs(jmh) < 0.1
    assert abs(jreg) < 0.1
    assert abs(jmh) <= abs(jreg) + 0.02
    assert abs(jmh) < abs(jreg) < jnc < mh
    assert summary.notes == []


@pytest.mark.parametrize("scenario", ["obs_medium_medium_nu1", "obs_medium_medium_nu2"])
def test_small_effects_on_the_negative_control(scenario):
    summary = _study(scenario, reps=200, seed=14, bootstrap_replicates=20,
                     methods=[M.MH, M.JOINT_MH, M.JOINT_REG])
    assert summary.method("mh").bias > 0.3
    assert abs(summary.method("joint_mh").bias) < 0.15
    assert abs(summary.method("joint_reg").bias) < 0.15
