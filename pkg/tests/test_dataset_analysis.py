import json
import math

import pytest

from builders import arms
from src.core.entities.analysis_options import AnalysisOptions
from src.core.entities.errors import MissingColumn
from src.core.entities.estimate_result import EstimationMethod
from src.core.entities.strata import StratumSpec
from src.core.use_cases.dataset_analysis import DatasetAnalysisUseCase
from src.infrastructure.config.settings import SolverConfig
from src.infrastructure.data_services.csv_repository import CsvDatasetRepository
from src.infrastructure.estimation_services.estimation_service import EstimationService

SITE = AnalysisOptions(strata=StratumSpec(keys=("site",)))


@pytest.fixture
def use_case() -> DatasetAnalysisUseCase:
    return DatasetAnalysisUseCase(CsvDatasetRepository(), EstimationService(SolverConfig()))


def _save(dataset, path):
    return CsvDatasetRepository().save(dataset, path)


def test_augmented_estimate_from_file(use_case, aug_data, tmp_path):
    report = use_case.analyze(_save(aug_data, tmp_path / "aug.csv"), EstimationMethod.AUG)
    assert report.beta1_hat == pytest.approx(math.log(0.25), abs=1e-8)
    assert report.augmentation == "y2"
    assert (report.n, report.n_treated, report.n_control) == (8, 4, 4)
    assert report.ve == pytest.approx(0.75, abs=1e-8)


def test_single_stratum_mh_equals_unaug(use_case, tmp_path):
    data = arms(
        treated=[(1, 0), (0, 0), (0, 0), (0, 0)],
        control=[(1, 0), (1, 0), (0, 0), (0, 0)],
        covariates={"group": ["x"] * 8},
    )
    path = _save(data, tmp_path / "one.csv")
    options = AnalysisOptions(strata=StratumSpec(keys=("group",)))
    mh = use_case.analyze(path, EstimationMethod.MH, options)
    unaug = use_case.analyze(path, EstimationMethod.UNAUG)
    assert mh.beta1_hat == pytest.approx(unaug.beta1_hat, abs=1e-12)
    assert mh.beta1_hat == pytest.approx(math.log(0.5), abs=1e-12)
    assert mh.strata == "group"


def test_constant_negative_control_leaves_mh_unchanged(use_case, mh_data, tmp_path):
    path = _save(mh_data, tmp_path / "mh.csv")
    mh = use_case.analyze(path, EstimationMethod.MH, SITE)
    joint = use_case.analyze(path, EstimationMethod.JOINT_MH, SITE)
    assert mh.beta1_hat == pytest.approx(math.log(1 / 1.5), abs=1e-12)
    assert joint.beta1_hat == pytest.approx(mh.beta1_hat, abs=1e-12)


def test_report_files(use_case, joint_nc_data, tmp_path):
    out = tmp_path / "out" / "report.json"
    report = use_case.analyze(_save(joint_nc_data, tmp_path / "nc.csv"), EstimationMethod.JOINT_NC, out_path=out)
    stored = json.loads(out.read_text())
    assert stored["method"] == "joint_nc"
    assert stored["beta1_hat"] == pytest.approx(math.log(2.25), abs=1e-8)
    assert stored["beta1_star"] == pytest.approx(math.log(1.5), abs=1e-8)
    table = out.with_suffix(".txt").read_text()
    assert table.startswith("method")
    assert "beta2_star" in table
    assert report.to_table() + "\n" == table


def test_renamed_columns(use_case, unaug_data, tmp_path):
    frame = unaug_data.to_frame().rename(columns={"t": "vaccinated", "y1": "hpv_16_18"})
    path = tmp_path / "renamed.csv"
    frame.to_csv(path, index=False)
    with pytest.raises(MissingColumn):
        use_case.analyze(path, EstimationMethod.UNAUG)
    report = use_case.analyze(path, EstimationMethod.UNAUG, column_map={"t": "vaccinated", "y1": "hpv_16_18"})
    assert report.beta1_hat == pytest.approx(math.log(0.5), abs=1e-8)
