import numpy as np
import pytest

from builders import UNIFORM_A_PROBS
from src.core.entities.errors import InvalidConfig
from src.core.entities.generator_config import ScenarioPreset, StudyDesign, broadcast


def test_defaults_are_valid(config_factory):
    config = config_factory()
    assert config.cell_weights().sum() == pytest.approx(1.0)
    assert np.all(config.treatment_probability() == 0.5)


def test_risks_above_one_are_rejected(config_factory):
    with pytest.raises(InvalidConfig, match="risk"):
        config_factory(mu1=(np.log(0.6),), a_values=(0.0, 1.0, 2.0))


def test_a_probs_rows_must_sum_to_one(config_factory):
    bad = ((0.5, 0.5, 0.5),) + UNIFORM_A_PROBS[1:]
    with pytest.raises(InvalidConfig):
        config_factory(a_probs=bad)
    with pytest.raises(InvalidConfig):
        config_factory(a_probs=UNIFORM_A_PROBS[:-1])


def test_per_type_lengths(config_factory):
    with pytest.raises(InvalidConfig):
        config_factory(beta2=(0.0,))
    with pytest.raises(InvalidConfig):
        config_factory(a_values=(-1.0, 1.0, 2.0))


def test_composite_risk_of_two_types(config_factory):
    config = config_factory(
        targeted_types=(16, 18),
        mu1=(np.log(0.1), np.log(0.05)),
        beta1=(0.0, 0.0),
        alpha1=(0.0, 0.0),
        lambda_site=((0.0, 0.0, 0.0),) * 2,
    )
    assert np.allclose(config.composite_risk(0), 1 - 0.9 * 0.95)


def test_observational_kernel_is_normalized(config_factory):
    config = config_factory(design=StudyDesign.OBSERVATIONAL, a_values=(0.0, 1.0, 2.0))
    p = config.treatment_probability()
    assert np.sum(config.cell_weights() * p) == pytest.approx(0.5, abs=1e-12)
    assert np.all(p[:, :, 2] > p[:, :, 0])


def test_with_updates_revalidates(config_factory):
    config = config_factory()
    assert config.with_updates(n=10).n == 10
    with pytest.raises(InvalidConfig):
        config.with_updates(n=0)


def test_preset_model_checks():
    preset = ScenarioPreset(name="x", design="observational", target_incidences=(0.05,), targeted_types=(16,))
    assert preset.summary()["design"] == "observational"
    with pytest.raises(ValueError):
        ScenarioPreset(name="x", design="randomized", target_incidences=(0.05,))
    assert broadcast((0.1,), 3) == (0.1, 0.1, 0.1)
    assert broadcast((0.1, 0.2), 2) == (0.1, 0.2)
