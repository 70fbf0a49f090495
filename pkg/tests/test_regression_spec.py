import pytest

from src.core.entities.errors import ValidationError
from src.core.entities.regression_spec import (
    Augmentation,
    RegressionSpec,
    RegressionTerm,
    TermTransform,
    parse_terms,
)
from src.core.entities.subject_data import CovariateKind

SCHEMA = {"age": CovariateKind.NUMERIC, "site": CovariateKind.CATEGORICAL}


def test_term_parsing():
    assert parse_terms("age+age^2+C(site)") == (
        RegressionTerm("age"),
        RegressionTerm("age", TermTransform.SQUARE),
        RegressionTerm("site", TermTransform.CATEGORICAL),
    )
    assert parse_terms("1") == ()
    with pytest.raises(ValidationError):
        RegressionTerm.parse("log(age)")


def test_spec_parse_and_render():
    spec = RegressionSpec.parse("primary=age+C(site),secondary=age^2")
    assert spec.render() == "primary=age+C(site),secondary=age^2"
    assert RegressionSpec().render() == "primary=1,secondary=1"
    assert RegressionSpec.symmetric("age").primary_terms == RegressionSpec.symmetric("age").secondary_terms
    with pytest.raises(ValidationError):
        RegressionSpec.parse("tertiary=age")


def test_validation_against_schema():
    RegressionSpec.parse("primary=age+C(site)").validate(SCHEMA)
    with pytest.raises(ValidationError):
        RegressionSpec.parse("primary=site").validate(SCHEMA)
    with pytest.raises(ValidationError):
        RegressionSpec.parse("primary=weight").validate(SCHEMA)
    with pytest.raises(ValidationError):
        RegressionSpec.parse("primary=y2").validate(SCHEMA)
    RegressionSpec.parse("primary=y2+age").validate(SCHEMA, allow_y2=True)


def test_augmentation_aliases():
    assert Augmentation.parse("Y2") is Augmentation.Y2
    assert Augmentation.parse("y2_and_w") is Augmentation.Y2_AND_W
    with pytest.raises(ValidationError):
        Augmentation.parse("x")
