import json

import pytest

from ncwaring.errors import MalformedCertificateError, PolySyntaxError, PreconditionError
from ncwaring.exactmat import Mat
from ncwaring.fields import Field
from ncwaring.freealg import Poly, commutator_of
from ncwaring.waring import target_square_zero_certificate, verify_certificate
from ncwaring.wire import dump_certificate, dump_matrix, load_certificate, load_matrix

C = commutator_of(Poly.var(1), Poly.var(2))


@pytest.fixture
def cert_text(seed):
    cert = target_square_zero_certificate(C, Mat.unit(2, 1, 2) * 2, 64, seed)
    return dump_certificate(cert)


def test_matrix_files():
    a = Mat([["1/2", 0], [3, -1]])
    assert load_matrix(dump_matrix(a)) == a
    f5 = Field.prime(5)
    b = Mat([[4, 1], [0, 2]], f5)
    assert load_matrix(dump_matrix(b)).field == f5
    assert json.loads(dump_matrix(a))["rows"] == [["1/2", "0"], ["3", "-1"]]


def test_bad_matrix_files():
    with pytest.raises(PreconditionError):
        load_matrix("not json")
    with pytest.raises(PreconditionError):
        load_matrix(json.dumps({"n": 3, "field": "Q", "rows": [["1", "0"], ["0", "1"]]}))
    with pytest.raises(PreconditionError):
        load_matrix(json.dumps({"n": 1, "field": "Q", "rows": [["x"]]}))


def test_certificate_reloads_and_verifies(cert_text, seed):
    cert = load_certificate(cert_text)
    assert verify_certificate(cert).valid
    original = target_square_zero_certificate(C, Mat.unit(2, 1, 2) * 2, 64, seed)
    assert cert == original


def test_tampered_target_is_caught(cert_text):
    raw = json.loads(cert_text)
    raw["target"]["rows"][0][1] = "3"
    assert verify_certificate(load_certificate(json.dumps(raw))).reason == "sum mismatch"


def test_tampered_value_is_caught(cert_text):
    raw = json.loads(cert_text)
    raw["terms"][0]["value"]["rows"][0][0] = "100"
    raw["terms"][1]["value"]["rows"][0][0] = "100"
    assert verify_certificate(load_certificate(json.dumps(raw))).reason != "ok"


def test_version_and_shape_checks(cert_text):
    raw = json.loads(cert_text)
    raw["version"] = 99
    with pytest.raises(PreconditionError):
        load_certificate(json.dumps(raw))
    with pytest.raises(PreconditionError):
        load_certificate(json.dumps({"polynomial": "X1"}))


def test_structural_damage_is_malformed(cert_text):
    raw = json.loads(cert_text)
    raw["terms"][0]["point"] = []
    with pytest.raises(MalformedCertificateError):
        load_certificate(json.dumps(raw))

    raw = json.loads(cert_text)
    raw["terms"][0]["point"][0] = json.loads(dump_matrix(Mat.identity(3)))
    with pytest.raises(MalformedCertificateError):
        load_certificate(json.dumps(raw))

    raw = json.loads(cert_text)
    raw["polynomial"] = "X1*"
    with pytest.raises(MalformedCertificateError) as info:
        load_certificate(json.dumps(raw))
    assert isinstance(info.value.__cause__, PolySyntaxError)
