import numpy as np
import pytest

from builders import arms, random_dataset
from src.core.entities.regression_spec import Augmentation, RegressionSpec, RegressionTerm, Y2_TERM
from src.infrastructure.estimation_services.arm_means import augmentation_terms, fit_arm_means


def test_saturated_cell_means(aug_data):
    means = fit_arm_means(aug_data)
    assert means.treated.kind == "saturated"
    assert means.treated.cell_means == pytest.approx({1: 1 / 3, 0: 0.0})
    assert means.control.cell_means == pytest.approx({1: 1.0, 0: 1 / 3})
    e1, e0 = means.predict(aug_data)
    assert e1.tolist() == pytest.approx([1 / 3, 1 / 3, 1 / 3, 0, 1 / 3, 0, 0, 0])
    assert e0[:4].tolist() == pytest.approx([1, 1, 1, 1 / 3])


def test_arm_without_events_predicts_zero():
    data = arms(treated=[(0, 1), (0, 0), (0, 2)], control=[(1, 1), (0, 0), (1, 2)])
    e1, _ = fit_arm_means(data).predict(data)
    assert np.all(e1 == 0)


def test_constant_y2_reduces_to_arm_means(unaug_data):
    e1, e0 = fit_arm_means(unaug_data).predict(unaug_data)
    assert np.all(e1 == 0.25) and np.all(e0 == 0.5)


def test_unseen_cell_falls_back_to_the_arm_mean():
    data = arms(treated=[(1, 1), (0, 0), (0, 0)], control=[(1, 0), (0, 0), (1, 0)])
    means = fit_arm_means(data)
    assert means.control.predict(data)[0] == pytest.approx(2 / 3)
    assert any("y2=1" in note for note in means.warnings)


def test_logistic_models_for_counts():
    data = random_dataset(2, n=500)
    means = fit_arm_means(data)
    assert (means.treated.kind, means.control.kind) == ("logistic", "logistic")
    e1, e0 = means.predict(data)
    assert np.all((e1 > 0) & (e1 < 1)) and np.all((e0 > 0) & (e0 < 1))
    treated = data.t == 1
    assert e1[treated].mean() == pytest.approx(data.y1[treated].mean(), abs=1e-5)


def test_separation_falls_back_with_a_warning():
    data = random_dataset(9, n=200)
    separated = data.with_y2(np.where(data.y1 == 1, 5, 0))
    means = fit_arm_means(separated, Augmentation.Y2_AND_W, RegressionSpec.parse("primary=age"))
    assert "constant" in (means.treated.kind, means.control.kind)
    assert means.warnings


def test_augmentation_terms():
    spec = RegressionSpec.parse("primary=age+C(site)")
    assert augmentation_terms(Augmentation.Y2, spec) == (RegressionTerm(Y2_TERM),)
    assert augmentation_terms(Augmentation.W, spec) == spec.primary_terms
    assert augmentation_terms(Augmentation.Y2_AND_W, spec)[0] == RegressionTerm(Y2_TERM)
