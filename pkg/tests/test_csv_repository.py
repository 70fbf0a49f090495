import numpy as np
import pytest

from builders import make_config
from src.core.entities.errors import InvariantViolation, MalformedInput, MissingColumn, ParseError
from src.core.entities.strata import StratumSpec
from src.core.entities.subject_data import CovariateKind
from src.infrastructure.config.settings import BootstrapConfig
from src.infrastructure.data_services.csv_repository import CsvDatasetRepository, load_csv, schema_path, write_csv
from src.infrastructure.estimation_services.estimators import estimate_joint_mh
from src.infrastructure.simulation_services.generator import generate


def _write(tmp_path, text, name="subjects.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_three_rows(tmp_path):
    path = _write(tmp_path, "t,y1,y2\n0,0,0\n1,1,2\n1,0,1\n")
    data = load_csv(path)
    assert data.n == 3
    assert data.y2.tolist() == [0, 2, 1]
    assert data.ids == ("1", "2", "3")


def test_invalid_values(tmp_path):
    with pytest.raises(InvariantViolation):
        load_csv(_write(tmp_path, "t,y1,y2\n0,0,-1\n"))
    with pytest.raises(InvariantViolation):
        load_csv(_write(tmp_path, "t,y1,y2\n0,2,0\n"))


def test_missing_and_unparseable(tmp_path):
    with pytest.raises(MissingColumn):
        load_csv(_write(tmp_path, "t,y2\n0,0\n"))
    with pytest.raises(ParseError) as info:
        load_csv(_write(tmp_path, "t,y1,y2\n0,0,0\n1,yes,0\n"))
    assert (info.value.row, info.value.column) == (2, "y1")
    with pytest.raises(MalformedInput):
        load_csv(tmp_path / "absent.csv")


def test_missing_covariate_value_is_an_error(tmp_path):
    path = _write(tmp_path, "t,y1,y2,age\n0,0,0,15\n1,1,2,\n")
    with pytest.raises(InvariantViolation):
        load_csv(path)


def test_schema_inference_and_column_map(tmp_path):
    path = _write(
        tmp_path,
        "id,vacc,case,nt_1,nt_2,site,age\n"
        "s1,1,0,1,0,A,15.5\n"
        "s2,0,1,1,1,B,20\n",
    )
    data = load_csv(path, column_map={"t": "vacc", "y1": "case", "y2_type_prefix": "nt_"})
    assert data.ids == ("s1", "s2")
    assert data.y2.tolist() == [1, 2]
    assert data.covariate_schema == {"site": CovariateKind.CATEGORICAL, "age": CovariateKind.NUMERIC}
    assert data.covariates["age"].tolist() == [15.5, 20.0]


def test_declared_schema_is_used(tmp_path):
    path = _write(tmp_path, "t,y1,y2,site\n0,0,0,1\n1,1,2,2\n")
    data = load_csv(path, schema={"site": CovariateKind.CATEGORICAL})
    assert data.covariates["site"].tolist() == ["1", "2"]
    with pytest.raises(MissingColumn):
        load_csv(path, schema={"age": CovariateKind.NUMERIC})


def test_write_then_read_preserves_the_dataset(tmp_path, mh_data):
    repository = CsvDatasetRepository()
    path = repository.save(mh_data, tmp_path / "out" / "mh.csv", {"y1_16": np.zeros(mh_data.n, dtype=int)})
    again = repository.load(path, schema=mh_data.covariate_schema)
    assert again.equals(mh_data)


def test_trace_columns_are_not_covariates(tmp_path, unaug_data):
    path = write_csv(unaug_data, tmp_path / "cohort.csv", {"y1_16": unaug_data.y1, "y1_18": np.zeros(8)})
    assert load_csv(path).covariate_schema == {}
    assert load_csv(path, column_map={"y1": "y1_16"}).y1.tolist() == unaug_data.y1.tolist()


def test_written_schema_survives_reload(tmp_path):
    config = make_config(n=1000)
    cohort = generate(config, 21, 0)
    path = write_csv(cohort.dataset, tmp_path / "cohorts" / "rep_0000.csv", cohort.trace_columns())
    assert schema_path(path).is_file()
    again = load_csv(path)
    assert again.covariate_schema == {"site": CovariateKind.CATEGORICAL, "age": CovariateKind.NUMERIC}
    assert again.equals(cohort.dataset)

    strata = StratumSpec(keys=("site",))
    assert estimate_joint_mh(again, strata, bootstrap=BootstrapConfig(20, 1, 1)).beta1_hat == pytest.approx(
        estimate_joint_mh(cohort.dataset, strata, bootstrap=BootstrapConfig(20, 1, 1)).beta1_hat, abs=1e-12
    )


def test_without_sidecar_digit_labels_read_as_numbers(tmp_path):
    path = _write(tmp_path, "t,y1,y2,site\n0,0,0,1\n1,1,2,2\n")
    assert load_csv(path).covariate_schema == {"site": CovariateKind.NUMERIC}
    schema_path(path).write_text('{"site": "categorical"}', encoding="utf-8")
    assert load_csv(path).covariates["site"].tolist() == ["1", "2"]


def test_unreadable_sidecar(tmp_path):
    path = _write(tmp_path, "t,y1,y2,site\n0,0,0,1\n1,1,2,2\n")
    schema_path(path).write_text('{"site": "ordinal"}', encoding="utf-8")
    with pytest.raises(MalformedInput, match="schema"):
        load_csv(path)
