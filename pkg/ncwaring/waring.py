"""
Certificate engine. Every pipeline returns a WaringCertificate, a list of
(coefficient, image witness) terms whose weighted sum is the target, and
verify_certificate re-derives all of it from the polynomial and the points.

Difference-form certificates come in pairs: the two witnesses of a pair are
conjugates of one image value t by 1 - u/2 and 1 + u/2 with u^2 = 0, so their
difference is [t, u].
"""
from dataclasses import dataclass
from dataclasses import field as dc_field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .decompose import traceless_four_square_zero
from .errors import FieldMismatchError, FieldTooSmallError, IdentityPolynomialError, PreconditionError
from .exactmat import Conjugator, Mat, bracket, square_zero_conjugator
from .fields import Field, Scalar
from .freealg import Poly, cyclic_normal_form, hat_of
from .images import (
    EvalPoint,
    ImageKind,
    ImageWitness,
    classify_on_mn,
    evaluate,
    find_invertible_witness,
    find_nonzero_trace_witness,
    find_split_spectrum_witness,
)

CERTIFICATE_VERSION = 1


@dataclass(frozen=True)
class CertificateTerm:
    coeff: Scalar
    witness: ImageWitness
    role: str
    pair: Optional[int] = None


@dataclass(frozen=True)
class WaringCertificate:
    f: Poly
    n: int
    field: Field
    terms: Tuple[CertificateTerm, ...]
    target: Mat
    meta: Dict[str, Any] = dc_field(default_factory=dict, compare=False)

    @property
    def pair_count(self) -> int:
        return len({t.pair for t in self.terms if t.pair is not None})


@dataclass(frozen=True)
class Verdict:
    valid: bool
    reason: str = "ok"


def _empty(f: Poly, target: Mat, route: str) -> WaringCertificate:
    return WaringCertificate(f, target.n, target.field, (), target, {"route": route, "pairs": 0, "terms": 0})


def _merge(parts: Sequence[Tuple[int, str, WaringCertificate]]) -> List[CertificateTerm]:
    """Concatenate sub-certificates, scaling by a sign and renumbering pairs."""
    out: List[CertificateTerm] = []
    offset = 0
    for sign, prefix, cert in parts:
        top = -1
        for term in cert.terms:
            pair = None
            if term.pair is not None:
                pair = offset + term.pair
                top = max(top, term.pair)
            out.append(CertificateTerm(term.coeff * sign, term.witness, f"{prefix}/{term.role}", pair))
        offset += top + 1
    return out


# ---- single difference pairs ----

def conj_difference_pair(t: ImageWitness, u: Mat) -> Tuple[ImageWitness, ImageWitness]:
    """(1 - u/2) t (1 + u/2) and (1 + u/2) t (1 - u/2); their difference is [t, u]."""
    t.value._check(u)
    if not u.is_square_zero():
        raise PreconditionError("u must square to zero")
    field = u.field
    if field.coerce(2) == 0:
        raise FieldTooSmallError("halving u needs characteristic other than 2")
    half = u * (field.one / field.coerce(2))
    eye = Mat.identity(u.n, field)
    minus, plus = eye - half, eye + half
    # (1 - u/2)^-1 = 1 + u/2 because u^2 = 0
    return t.transported(Conjugator(minus, plus)), t.transported(Conjugator(plus, minus))


def _strip(n: int, r: int, field: Field) -> Mat:
    h = n // 2
    rows = [[0] * n for _ in range(n)]
    for i in range(r):
        rows[i][h + i] = 1
    return Mat(rows, field)


def target_square_zero_certificate(f: Poly, s: Mat, budget: int, seed: int,
                                   witness: Optional[ImageWitness] = None) -> WaringCertificate:
    """
    s as c1 - c2 with c1, c2 conjugates of one image value. The image value
    t is upper triangular in eigen-order with every eigenvalue of multiplicity
    at most n/2, so for u with ones at (i, n//2 + i), i < rank(s), the
    bracket [t, u] is square-zero of rank exactly rank(s); a conjugator then
    carries it onto s.
    """
    if f.field != s.field:
        raise FieldMismatchError(f"polynomial over {f.field}, target over {s.field}")
    if not s.is_square_zero():
        raise PreconditionError("target must square to zero")
    n, field = s.n, s.field
    r = s.rank()
    if 2 * r > n:
        raise PreconditionError(f"square-zero rank {r} exceeds {n // 2}")
    if r == 0:
        return _empty(f, s, "square_zero")

    t = witness or find_split_spectrum_witness(f, n, budget, seed)
    u = _strip(n, r, field)
    produced = bracket(t.value, u)
    if produced.rank() != r:
        raise PreconditionError("witness value does not separate eigenvalues across the strip")
    move = square_zero_conjugator(produced, s).inverse()
    c1, c2 = conj_difference_pair(t, u)
    one = field.one
    terms = (
        CertificateTerm(one, c1.transported(move), "plus", 0),
        CertificateTerm(-one, c2.transported(move), "minus", 0),
    )
    return WaringCertificate(f, n, field, terms, s, {"route": "square_zero", "pairs": 1, "terms": 2, "rank": r})


# ---- pipelines ----

def traceless_waring_certificate(f: Poly, x: Mat, budget: int, seed: int,
                                 witness: Optional[ImageWitness] = None) -> WaringCertificate:
    if x.trace() != 0:
        raise PreconditionError(f"target has trace {x.trace()}, expected 0")
    split = traceless_four_square_zero(x)
    if not split.parts:
        return _empty(f, x, "traceless")
    t = witness or find_split_spectrum_witness(f, x.n, budget, seed)
    subs = [(1, f"sq0[{i}]", target_square_zero_certificate(f, s, budget, seed, witness=t))
            for i, s in enumerate(split.parts)]
    terms = _merge(subs)
    meta = {"route": "traceless", "pairs": len(split.parts), "terms": len(terms),
            "bound": bound_formula(1, "square_zero").constant}
    return WaringCertificate(f, x.n, x.field, tuple(terms), x, meta)


def linear_combination_nine(f: Poly, x: Mat, budget: int, seed: int,
                            witness: Optional[ImageWitness] = None) -> WaringCertificate:
    """x = (tr x / tr a) a + a traceless remainder, with a an image value of nonzero trace."""
    n = x.n
    if x.trace() == 0:
        cert = traceless_waring_certificate(f, x, budget, seed, witness)
        return WaringCertificate(f, n, x.field, cert.terms, x, {**cert.meta, "route": "nine", "bound": 9})
    if cyclic_normal_form(f).is_zero():
        raise PreconditionError("polynomial is a sum of commutators, every value is traceless")
    kind = classify_on_mn(f, n, budget, seed).kind
    if kind == ImageKind.IDENTITY:
        raise IdentityPolynomialError(f"polynomial is an identity of M_{n}")
    if kind == ImageKind.CENTRAL:
        raise PreconditionError(f"polynomial is central on M_{n}")

    hint = EvalPoint((x,) * max(f.nvars, 1))
    a = find_nonzero_trace_witness(f, n, budget, seed, hint=hint)
    c = x.trace() / a.value.trace()
    rest = x - a.value * c
    terms = [CertificateTerm(c, a, "trace")]
    pairs = 0
    if not rest.is_zero():
        sub = traceless_waring_certificate(f, rest, budget, seed, witness)
        terms.extend(_merge([(1, "traceless", sub)]))
        pairs = sub.pair_count
    meta = {"route": "nine", "pairs": pairs, "terms": len(terms), "bound": bound_formula(1, "nine").constant}
    return WaringCertificate(f, n, x.field, tuple(terms), x, meta)


def three_term_expansion(t1: Mat, t2: Mat, w: Mat, z: Mat) -> List[Tuple[int, Mat]]:
    """
    Signed commutators summing to [w, z], for [t1, t2] invertible:
    [[t2, wc], t1 z] - [[t2, wc t1], z] + [t1, z [t2, wc]] with c = [t1, t2]^-1.
    """
    wc = w @ bracket(t1, t2).inverse()
    return [
        (1, bracket(bracket(t2, wc), t1 @ z)),
        (-1, bracket(bracket(t2, wc @ t1), z)),
        (1, bracket(t1, z @ bracket(t2, wc))),
    ]


def commutator_via_image(f: Poly, w: Mat, z: Mat, budget: int, seed: int,
                         witness: Optional[ImageWitness] = None) -> WaringCertificate:
    target = bracket(w, z)
    if target.is_zero():
        return _empty(f, target, "commutator")
    n = target.n
    t = witness or find_split_spectrum_witness(f, n, budget, seed)
    anchor = find_invertible_witness(hat_of(f), n, budget, seed)
    m = f.nvars
    t1 = evaluate(f, EvalPoint(anchor.point.args[:m]))
    t2 = evaluate(f, EvalPoint(anchor.point.args[m:2 * m]))
    subs = []
    for i, (sign, piece) in enumerate(three_term_expansion(t1, t2, w, z)):
        subs.append((sign, f"term[{i}]", traceless_waring_certificate(f, piece, budget, seed, witness=t)))
    terms = _merge(subs)
    pairs = len({term.pair for term in terms})
    meta = {"route": "commutator", "pairs": pairs, "terms": len(terms),
            "bound": bound_formula(1, "field").constant, "anchor_det": str(anchor.value.det())}
    return WaringCertificate(f, n, target.field, tuple(terms), target, meta)


# ---- bounds ----

@dataclass(frozen=True)
class BoundReport:
    k: int
    formula: int
    regime: str
    constant: int
    hypothesis: str


def _commutator_bound(k: int) -> int:
    return 1936 * k * k + 22 * k


def _field_bound(q: int = 4) -> int:
    # two four-square-zero expansions per side plus the central term
    return 2 * q * q + 2 * q * q + q


REGIMES: Dict[str, str] = {
    "general": "M_n(C), C commutative, every element a sum of k commutators",
    "commutative": "M_n(C), C commutative, two commutators",
    "endomorphism": "endomorphisms of an infinite-dimensional space, one commutator",
    "hilbert": "bounded operators on a Hilbert space, doubled endomorphism count",
    "field": "M_n(F) over a field, square-zero decompositions of length four",
    "square_zero": "traceless matrix as a sum of f(A) - f(A) elements",
    "nine": "linear combination of f(A) elements, algebraically closed field",
    "nine_nonclosed": "linear combination of f(A) elements, arbitrary field",
}


def bound_formula(k: int, regime: str = "general") -> BoundReport:
    if k < 1:
        raise PreconditionError(f"commutator count must be positive, got {k}")
    if regime not in REGIMES:
        raise PreconditionError(f"unknown regime {regime!r}; known: {', '.join(REGIMES)}")
    constants = {
        "general": _commutator_bound(k),
        "commutative": _commutator_bound(2),
        "endomorphism": _commutator_bound(1),
        "hilbert": 2 * _commutator_bound(1),
        "field": _field_bound(),
        "square_zero": 4,
        "nine": 9,
        "nine_nonclosed": 2 * _field_bound() + 1,
    }
    return BoundReport(k, _commutator_bound(k), regime, constants[regime], REGIMES[regime])


# ---- verification ----

def _same_shape(m: Mat, n: int, field: Field) -> bool:
    return m.n == n and m.field == field


def verify_certificate(cert: WaringCertificate) -> Verdict:
    n, field, f = cert.n, cert.field, cert.f
    if f.field != field or not _same_shape(cert.target, n, field):
        return Verdict(False, "shape mismatch")
    for term in cert.terms:
        w = term.witness
        if not _same_shape(w.value, n, field) or w.point.n != n or w.point.field != field:
            return Verdict(False, "shape mismatch")
        if len(w.point) < f.nvars:
            return Verdict(False, "shape mismatch")
        try:
            field.coerce(term.coeff)
        except (FieldMismatchError, PreconditionError):
            return Verdict(False, "shape mismatch")
        conj = w.conjugator
        if conj is not None:
            if not (_same_shape(conj.p, n, field) and _same_shape(conj.p_inv, n, field)) or not conj.is_valid():
                return Verdict(False, "conjugator mismatch")

    total = Mat.zeros(n, field)
    for term in cert.terms:
        total = total + term.witness.value * term.coeff
    if total != cert.target:
        return Verdict(False, "sum mismatch")

    for term in cert.terms:
        if not term.witness.recheck(f):
            return Verdict(False, "witness mismatch")

    groups: Dict[int, List[CertificateTerm]] = {}
    for term in cert.terms:
        if term.pair is not None:
            groups.setdefault(term.pair, []).append(term)
    eye = Mat.identity(n, field)
    for members in groups.values():
        if len(members) != 2:
            return Verdict(False, "pair mismatch")
        a, b = members
        if a.coeff + b.coeff != 0 or a.witness.point != b.witness.point:
            return Verdict(False, "pair mismatch")
        if a.witness.conjugator is None or b.witness.conjugator is None:
            return Verdict(False, "pair mismatch")
        gap = a.witness.conjugator.p @ b.witness.conjugator.p_inv - eye
        if not gap.is_square_zero():
            return Verdict(False, "pair mismatch")
    return Verdict(True)


# ---- floating-point conjugation flow ----

@dataclass(frozen=True)
class FlowReport:
    lambdas: Tuple[float, ...]
    residuals: Tuple[float, ...]
    slope: Optional[float]


def expm(a: np.ndarray, terms: int = 18) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a truncated Taylor series."""
    norm = np.linalg.norm(a, 1)
    squarings = int(np.ceil(np.log2(norm))) + 1 if norm > 0 else 0
    squarings = max(squarings, 0)
    scaled = a / (2.0 ** squarings)
    out = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    for k in range(1, terms + 1):
        term = term @ scaled / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def conjugation_flow_demo(d: Any, x: Any, lambdas: Sequence[float]) -> FlowReport:
    """
    Residuals |(e^{-lx} d e^{lx} - d)/l - [d, x]| for each l. The difference
    quotient converges to [d, x] at first order, so the log-log slope is near 1.
    Approximate by nature.
    """
    d = np.asarray(d, dtype=float)
    x = np.asarray(x, dtype=float)
    if d.ndim != 2 or d.size == 0 or d.shape[0] != d.shape[1] or x.shape != d.shape:
        raise PreconditionError(f"d and x must be square of the same nonzero size, got {d.shape} and {x.shape}")
    diag = np.diag(d)
    if not np.array_equal(d, np.diag(diag)) or len(set(diag.tolist())) != len(diag):
        raise PreconditionError("d must be diagonal with distinct entries")
    exact = d @ x - x @ d
    residuals = []
    for lam in lambdas:
        approx = (expm(-lam * x) @ d @ expm(lam * x) - d) / lam
        residuals.append(float(np.linalg.norm(approx - exact)))
    slope = None
    if len(lambdas) >= 2 and all(r > 0 for r in residuals):
        slope = float(np.polyfit(np.log(np.asarray(lambdas, dtype=float)), np.log(residuals), 1)[0])
    return FlowReport(tuple(float(v) for v in lambdas), tuple(residuals), slope)


def random_flow_inputs(n: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    if n < 1:
        raise PreconditionError(f"flow demo needs n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return np.diag(np.arange(1.0, n + 1)), rng.standard_normal((n, n))
