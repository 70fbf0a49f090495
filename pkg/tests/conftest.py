import pytest

from builders import arms, make_config
from src.core.entities.subject_data import Dataset


@pytest.fixture
def unaug_data() -> Dataset:
    """Treated 1/4 events, control 2/4"""
    return arms(
        treated=[(1, 0), (0, 0), (0, 0), (0, 0)],
        control=[(1, 0), (1, 0), (0, 0), (0, 0)],
    )


@pytest.fixture
def aug_data() -> Dataset:
    return arms(
        treated=[(1, 1), (0, 1), (0, 1), (0, 0)],
        control=[(1, 1), (1, 0), (0, 0), (0, 0)],
    )


@pytest.fixture
def joint_nc_data() -> Dataset:
    """Equal arms; treated 3 events and y2 total 4, control 2 events and y2 total 6"""
    return arms(
        treated=[(1, 1), (1, 1), (1, 1), (0, 1), (0, 0)],
        control=[(1, 2), (1, 2), (0, 1), (0, 1), (0, 0)],
    )


@pytest.fixture
def mh_data() -> Dataset:
    """
    Stratum a: treated 1/2, control 2/2; stratum b: treated 1/4, control 1/4.
    y2 is 1 for everyone.
    """
    treated = [(1, 1), (0, 1)] + [(1, 1), (0, 1), (0, 1), (0, 1)]
    control = [(1, 1), (1, 1)] + [(1, 1), (0, 1), (0, 1), (0, 1)]
    site = ["a", "a", "b", "b", "b", "b"] + ["a", "a", "b", "b", "b", "b"]
    return arms(treated, control, covariates={"site": site})


@pytest.fixture
def config_factory():
    return make_config
