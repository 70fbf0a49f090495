import json
import logging
import math

import pandas as pd
import pytest

from app import build_parser, main
from builders import arms


def _csv(tmp_path, dataset, name="subjects.csv"):
    path = tmp_path / name
    dataset.to_frame().to_csv(path, index=False)
    return str(path)


def test_presets_list(capsys):
    assert main(["presets", "list"]) == 0
    out = capsys.readouterr().out
    assert "rand_medium_medium" in out and "obs_medium_medium_nu3" in out


def test_presets_list_json(capsys):
    assert main(["presets", "list", "--json"]) == 0
    listed = json.loads(capsys.readouterr().out)
    assert {p["design"] for p in listed} == {"randomized", "observational"}


def test_analyze(tmp_path, capsys, aug_data):
    out = tmp_path / "report.json"
    code = main(["analyze", "--input", _csv(tmp_path, aug_data), "--method", "aug", "--out", str(out)])
    assert code == 0
    assert "beta1_hat" in capsys.readouterr().out
    assert json.loads(out.read_text())["beta1_hat"] == pytest.approx(math.log(0.25), abs=1e-8)


def test_analyze_with_strata_and_cuts(tmp_path, capsys):
    data = arms(
        treated=[(1, 0), (0, 1), (1, 0), (0, 0)],
        control=[(1, 1), (1, 0), (1, 0), (0, 1)],
        covariates={"age": [15.0, 16.0, 20.0, 21.0, 15.0, 16.0, 20.0, 21.0]},
    )
    code = main(["analyze", "--input", _csv(tmp_path, data), "--method", "mh",
                 "--strata", "age", "--cuts", "age=18"])
    assert code == 0
    assert "strata" in capsys.readouterr().out


def test_missing_input_file(tmp_path):
    assert main(["analyze", "--input", str(tmp_path / "absent.csv"), "--method", "unaug"]) == 2


def test_non_binary_outcome(tmp_path):
    path = tmp_path / "bad.csv"
    pd.DataFrame({"id": [1, 2], "t": [1, 0], "y1": [2, 0], "y2": [0, 0]}).to_csv(path, index=False)
    assert main(["analyze", "--input", str(path), "--method", "unaug"]) == 2


def test_numeric_key_without_cuts(tmp_path):
    data = arms(treated=[(1, 0), (0, 0)], control=[(1, 0), (0, 0)], covariates={"age": [15.0, 16.0, 15.0, 16.0]})
    assert main(["analyze", "--input", _csv(tmp_path, data), "--method", "mh", "--strata", "age"]) == 2


def test_no_treated_events_is_an_estimation_failure(tmp_path):
    data = arms(treated=[(0, 0), (0, 1), (0, 0)], control=[(1, 0), (0, 1), (1, 0)])
    assert main(["analyze", "--input", _csv(tmp_path, data), "--method", "unaug"]) == 3


def test_simulate(tmp_path, capsys):
    code = main(["simulate", "--scenario", "rand_low_low", "--n", "600", "--reps", "2", "--seed", "4",
                 "--methods", "unaug,aug", "--out", str(tmp_path), "--dump-first", "1", "--quiet"])
    assert code == 0
    assert "true beta1" in capsys.readouterr().out
    assert (tmp_path / "reps.csv").is_file() and (tmp_path / "summary.json").is_file()

    plot = tmp_path / "plot.csv"
    assert main(["plotdata", "--input", str(tmp_path / "reps.csv"), "--out", str(plot)]) == 0
    assert set(pd.read_csv(plot)["method"]) <= {"unaug", "aug", "true_beta1"}


def test_dumped_cohort_can_be_stratified_by_site(tmp_path, capsys):
    assert main(["simulate", "--scenario", "obs_low_low", "--n", "1500", "--reps", "2", "--seed", "8",
                 "--methods", "joint_nc", "--out", str(tmp_path), "--dump-first", "1", "--quiet"]) == 0
    cohort = str(tmp_path / "cohorts" / "rep_0000.csv")
    code = main(["analyze", "--input", cohort, "--method", "joint_mh", "--strata", "site",
                 "--bootstrap-reps", "50", "--seed", "1"])
    assert code == 0
    assert "site" in capsys.readouterr().out


def test_w_augmentation_without_terms(tmp_path, aug_data):
    assert main(["analyze", "--input", _csv(tmp_path, aug_data), "--method", "aug", "--augment", "w"]) == 2


def test_debug_level_logs_the_configuration(caplog):
    caplog.set_level(logging.DEBUG, logger="nco")
    assert main(["--log-level", "debug", "presets", "list"]) == 0
    assert "configuration" in caplog.text
    assert "preset_dir" in caplog.text


def test_unknown_scenario(tmp_path):
    assert main(["simulate", "--scenario", "nowhere", "--reps", "2", "--out", str(tmp_path)]) == 2


def test_bad_method_is_a_usage_error():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["analyze", "--input", "x.csv", "--method", "ols"])
