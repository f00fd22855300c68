"""
Conversion between in-memory values and the pydantic wire models.

Loading never trusts a file: matrices are re-coerced into their field and
certificates are rebuilt from the polynomial text, so verify_certificate
starts from nothing but the file contents.
"""
from typing import List

from pydantic import ValidationError

from .decompose import CommutatorForm, SquareZeroSum
from .errors import MalformedCertificateError, NcwError, PreconditionError
from .exactmat import Conjugator, Mat
from .fields import Field
from .images import EvalPoint, ImageWitness
from .models.schemas import (
    CertificateModel,
    CommutatorFormModel,
    ConjugatorModel,
    MatrixModel,
    SquareZeroSumModel,
    TermModel,
)
from .parser import parse_poly, render_poly
from .waring import CERTIFICATE_VERSION, CertificateTerm, WaringCertificate


def matrix_to_model(a: Mat) -> MatrixModel:
    return MatrixModel(n=a.n, field=a.field.tag, rows=[[a.field.format(x) for x in r] for r in a.rows])


def matrix_from_model(m: MatrixModel) -> Mat:
    field = Field.parse(m.field)
    if len(m.rows) != m.n or any(len(r) != m.n for r in m.rows):
        raise PreconditionError(f"matrix rows do not match n = {m.n}")
    return Mat(m.rows, field)


def conjugator_to_model(c: Conjugator) -> ConjugatorModel:
    return ConjugatorModel(p=matrix_to_model(c.p), p_inv=matrix_to_model(c.p_inv))


def conjugator_from_model(m: ConjugatorModel) -> Conjugator:
    return Conjugator(matrix_from_model(m.p), matrix_from_model(m.p_inv))


def certificate_to_model(cert: WaringCertificate) -> CertificateModel:
    terms: List[TermModel] = []
    for term in cert.terms:
        w = term.witness
        terms.append(TermModel(
            coeff=cert.field.format(term.coeff),
            point=[matrix_to_model(a) for a in w.point.args],
            conjugator=conjugator_to_model(w.conjugator) if w.conjugator is not None else None,
            value=matrix_to_model(w.value),
            role=term.role,
            pair=term.pair,
        ))
    return CertificateModel(
        version=CERTIFICATE_VERSION,
        polynomial=render_poly(cert.f),
        n=cert.n,
        field=cert.field.tag,
        target=matrix_to_model(cert.target),
        terms=terms,
        meta=dict(cert.meta),
    )


def certificate_from_model(m: CertificateModel) -> WaringCertificate:
    if m.version != CERTIFICATE_VERSION:
        raise PreconditionError(f"unsupported certificate version {m.version}")
    try:
        field = Field.parse(m.field)
        f = parse_poly(m.polynomial, field)
        terms = []
        for t in m.terms:
            witness = ImageWitness(
                value=matrix_from_model(t.value),
                point=EvalPoint(tuple(matrix_from_model(a) for a in t.point)),
                conjugator=conjugator_from_model(t.conjugator) if t.conjugator is not None else None,
            )
            terms.append(CertificateTerm(field.coerce(t.coeff), witness, t.role, t.pair))
        target = matrix_from_model(m.target)
    except NcwError as e:
        raise MalformedCertificateError(str(e)) from e
    return WaringCertificate(f, m.n, field, tuple(terms), target, dict(m.meta))


def square_zero_sum_to_model(s: SquareZeroSum) -> SquareZeroSumModel:
    return SquareZeroSumModel(target=matrix_to_model(s.target), parts=[matrix_to_model(p) for p in s.parts])


def commutator_form_to_model(c: CommutatorForm) -> CommutatorFormModel:
    return CommutatorFormModel(x=matrix_to_model(c.x), y=matrix_to_model(c.y), target=matrix_to_model(c.target))


# ---- text in / text out ----

def dump_matrix(a: Mat) -> str:
    return matrix_to_model(a).model_dump_json(indent=2)


def load_matrix(text: str) -> Mat:
    try:
        model = MatrixModel.model_validate_json(text)
    except ValidationError as e:
        raise PreconditionError(f"bad matrix file: {e.error_count()} validation error(s)")
    return matrix_from_model(model)


def dump_certificate(cert: WaringCertificate) -> str:
    return certificate_to_model(cert).model_dump_json(indent=2)


def load_certificate(text: str) -> WaringCertificate:
    try:
        model = CertificateModel.model_validate_json(text)
    except ValidationError as e:
        raise PreconditionError(f"bad certificate file: {e.error_count()} validation error(s)")
    return certificate_from_model(model)
