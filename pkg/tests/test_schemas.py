import json
import math
from pathlib import Path
from typing import Any, Dict

import pytest

from tests import test_data
from tests.data import TEST_COMPLEXES
from torsionlab.circle_model import CircleFrustum, verify_suite
from torsionlab.schemas import SchemaError, load_schema, validate_document
from torsionlab.spectral_zeta import torsion_zeta_evaluation


def test_unknown_schema() -> None:
    with pytest.raises(SchemaError):
        load_schema("no-such-schema")


@pytest.mark.parametrize("path", TEST_COMPLEXES)
def test_test_complexes_resolve_next_to_tests(path: str) -> None:
    resolved = Path(test_data.get_path(path))
    assert resolved.is_absolute()
    assert resolved.is_file()
    assert resolved.parent.parent == Path(__file__).resolve().parent


@pytest.mark.parametrize("path", TEST_COMPLEXES)
def test_test_complexes_are_valid_documents(path: str) -> None:
    with open(test_data.get_path(path), encoding="utf-8") as f:
        document: Dict[str, Any] = json.load(f)
    validate_document("chain-complex", document)


def test_bad_complex_reports_path() -> None:
    document = {"ranks": [1, 1], "boundaries": [[[0.5]]]}
    with pytest.raises(SchemaError, match="boundaries/0/0/0"):
        validate_document("chain-complex", document)


def test_verification_report_is_valid() -> None:
    report = verify_suite(CircleFrustum(1.0, 2.0, math.pi / 6))
    validate_document("verification-report", report.to_dict())


def test_zeta_evaluation_is_valid() -> None:
    evaluation = torsion_zeta_evaluation(2.0, 1.0, 2.0)
    validate_document("zeta-evaluation", evaluation.to_dict())
