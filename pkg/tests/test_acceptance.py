"""Full-size grids; deselect with -m "not slow"."""
import random
from fractions import Fraction

import pytest

from ncwaring.decompose import traceless_four_square_zero
from ncwaring.exactmat import Mat, bracket, canonical_square_zero
from ncwaring.fields import QQ
from ncwaring.freealg import Poly, capelli, commutator_of
from ncwaring.images import (
    EvalPoint,
    ImageKind,
    ImageWitness,
    capelli_dependence_test,
    classify_on_mn,
    evaluate,
    find_split_spectrum_witness,
    random_point,
)
from ncwaring.waring import (
    bound_formula,
    conj_difference_pair,
    conjugation_flow_demo,
    target_square_zero_certificate,
    three_term_expansion,
    traceless_waring_certificate,
    verify_certificate,
)

pytestmark = pytest.mark.slow

X1, X2 = Poly.var(1), Poly.var(2)
C = commutator_of(X1, X2)
POLYS = {"commutator": C, "product": X1 * X2, "commutator_cubed": C ** 3, "square": X1 * X1}
BUDGET = 200


def _traceless(rng, n, height=10):
    rows = [[rng.randint(-height, height) for _ in range(n)] for _ in range(n)]
    rows[-1][-1] = -sum(rows[i][i] for i in range(n - 1))
    return Mat(rows)


def _invertible(rng, n, height=3):
    while True:
        p = Mat([[rng.randint(-height, height) for _ in range(n)] for _ in range(n)])
        if p.det() != 0:
            return p


@pytest.mark.parametrize("name", list(POLYS))
@pytest.mark.parametrize("n", [2, 3, 4])
def test_four_pair_certificates(name, n, seed):
    f = POLYS[name]
    rng = random.Random(seed * 1000 + n)
    t = find_split_spectrum_witness(f, n, BUDGET, seed)
    for _ in range(25):
        cert = traceless_waring_certificate(f, _traceless(rng, n), BUDGET, seed, witness=t)
        assert cert.pair_count <= 4
        assert verify_certificate(cert).valid


@pytest.mark.parametrize("name", list(POLYS))
@pytest.mark.parametrize("n", [2, 3, 4])
def test_every_canonical_square_zero_is_reached(name, n, seed):
    f = POLYS[name]
    for r in range(1, n // 2 + 1):
        cert = target_square_zero_certificate(f, canonical_square_zero(n, r), BUDGET, seed)
        assert len(cert.terms) == 2
        assert verify_certificate(cert).valid


def test_bound_constants():
    assert bound_formula(2).formula == 7788
    assert bound_formula(1).formula == 1958
    assert bound_formula(1, "hilbert").constant == 3916
    assert bound_formula(1, "field").constant == 68


def test_classification_regressions(seed):
    assert classify_on_mn(C ** 2, 2, 50, seed).kind == ImageKind.CENTRAL
    neither = classify_on_mn(C ** 2, 3, 50, seed)
    assert neither.kind == ImageKind.NEITHER and neither.witness.recheck(C ** 2)
    assert classify_on_mn(C, 1, 10, seed).kind == ImageKind.IDENTITY
    assert classify_on_mn(capelli(5), 2, 10 ** 4, seed).kind == ImageKind.IDENTITY
    for n in (2, 3):
        powers = [X1 ** i for i in range(n + 1)]
        assert capelli_dependence_test(powers, n, 50, seed).dependent


def test_conjugation_and_three_term_identities(rng):
    for _ in range(100):
        t = ImageWitness(Mat([[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)]),
                         EvalPoint((Mat.identity(3),)))
        p = _invertible(rng, 3)
        u = p @ canonical_square_zero(3, 1) @ p.inverse()
        plus, minus = conj_difference_pair(t, u)
        assert plus.value - minus.value == bracket(t.value, u)

    done = 0
    while done < 100:
        t1, t2, w, z = (Mat([[rng.randint(-4, 4) for _ in range(3)] for _ in range(3)]) for _ in range(4))
        if not bracket(t1, t2).is_invertible():
            continue
        total = Mat.zeros(3)
        for sign, piece in three_term_expansion(t1, t2, w, z):
            total = total + piece * sign
        assert total == bracket(w, z)
        done += 1


def _random_poly(rng):
    terms = {}
    for _ in range(rng.randint(1, 3)):
        word = tuple(rng.randint(1, 2) for _ in range(rng.randint(1, 3)))
        terms[word] = rng.randint(-3, 3) or 1
    return Poly(terms)


def test_left_multiplication_keeps_independence(rng, seed):
    checked = 0
    while checked < 50:
        n = rng.choice([2, 3])
        fs = [_random_poly(rng) for _ in range(rng.randint(1, 3))]
        if not capelli_dependence_test(fs, n, 16, seed).dependent:
            h = _random_poly(rng)
            moved = capelli_dependence_test([h * f for f in fs], n, 64, seed)
            assert not moved.dependent
            checked += 1


def test_shifted_commutator_has_unit_trace(rng):
    for n in (2, 3):
        f = C + Fraction(1, n)
        traces = [evaluate(f, random_point(rng, 2, n, QQ, 10)).trace() for _ in range(1000)]
        assert all(t == 1 for t in traces)
        # any positive combination of values has positive trace, so 0 is never reached
        assert sum(traces) == len(traces)


def test_four_square_zero_parts(rng):
    for _ in range(100):
        n = rng.randint(2, 5)
        split = traceless_four_square_zero(_traceless(rng, n))
        assert split.verify()
        assert len(split.parts) <= 4
        assert all(p.rank() <= n // 2 for p in split.parts)


def test_flow_slope(np_rng):
    x = np_rng.standard_normal((3, 3))
    report = conjugation_flow_demo([[1, 0, 0], [0, 2, 0], [0, 0, 3]], x, [10.0 ** -k for k in range(2, 7)])
    assert report.slope == pytest.approx(1.0, abs=0.2)
