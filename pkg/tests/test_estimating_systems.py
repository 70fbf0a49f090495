import hypothesis.strategies as st
import numpy as np
from hypothesis import given, settings

from builders import numeric_jacobian, random_dataset
from src.core.entities.regression_spec import Augmentation, RegressionSpec, parse_terms
from src.infrastructure.estimation_services.arm_means import fit_arm_means
from src.infrastructure.estimation_services.design import DesignMatrixBuilder
from src.infrastructure.estimation_services.estimating_systems import (
    AugmentedLogRRSystem,
    LogBinomialScore,
    MeanResidualScore,
    StackedSystem,
)

seeds = st.integers(0, 2**32 - 1)
small = st.floats(-0.3, 0.3, allow_nan=False)


def _assert_matches_finite_differences(system, data, theta):
    analytic = system.jacobian_sum(data, theta)
    numeric = numeric_jacobian(system, data, theta)
    scale = np.max(np.abs(analytic))
    np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-5 * scale)
    np.testing.assert_allclose(system.jacobians(data, theta).sum(axis=0), analytic, rtol=1e-12, atol=1e-12 * scale)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, slopes=st.lists(small, min_size=4, max_size=4))
def test_log_binomial_jacobian(seed, slopes):
    data = random_dataset(seed, n=120)
    system = LogBinomialScore(DesignMatrixBuilder(parse_terms("age+age^2+C(site)")).fit(data))
    theta = np.array([np.log(0.1), *slopes, 0.1])
    assert system.is_admissible(data, theta)
    _assert_matches_finite_differences(system, data, theta)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, slopes=st.lists(small, min_size=3, max_size=3))
def test_stacked_jacobian(seed, slopes):
    data = random_dataset(seed, n=120)
    builder = DesignMatrixBuilder(parse_terms("age+C(site)")).fit(data)
    system = StackedSystem([LogBinomialScore(builder), MeanResidualScore(builder)])
    theta = np.array([np.log(0.2), *slopes, 0.0, np.log(1.5), *slopes, 0.05])
    _assert_matches_finite_differences(system, data, theta)

    jac = system.jacobian_sum(data, theta)
    p = builder.transform(data).shape[1]
    assert np.all(jac[:p, p:] == 0) and np.all(jac[p:, :p] == 0)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, log_control=st.floats(-2.5, -0.8), log_rr=st.floats(-1.0, 0.5))
def test_augmented_jacobian(seed, log_control, log_rr):
    data = random_dataset(seed, n=150)
    means = fit_arm_means(data, Augmentation.Y2_AND_W, RegressionSpec.parse("primary=age+C(site)"))
    system = AugmentedLogRRSystem(means, float(data.t.mean()))
    _assert_matches_finite_differences(system, data, np.array([log_control, log_rr]))


def test_per_record_scores_stack_to_the_matrix():
    data = random_dataset(7, n=12)
    builder = DesignMatrixBuilder(parse_terms("age+C(site)")).fit(data)
    system = LogBinomialScore(builder)
    theta = np.array([np.log(0.2), 0.1, -0.05, 0.0, 0.0])[: system.dim_theta]
    rows = np.vstack([system.score(record, theta) for record in data.records])
    np.testing.assert_allclose(rows, system.scores(data, theta), rtol=1e-12)
    np.testing.assert_allclose(system.jacobian(data.records[0], theta), system.jacobians(data, theta)[0], rtol=1e-12)


def test_admissible_region():
    data = random_dataset(1, n=30)
    system = LogBinomialScore(DesignMatrixBuilder(()).fit(data))
    assert system.is_admissible(data, np.array([np.log(0.5), 0.0]))
    assert not system.is_admissible(data, np.array([0.1, 0.0]))
    assert not system.is_admissible(data, np.array([np.nan, 0.0]))
