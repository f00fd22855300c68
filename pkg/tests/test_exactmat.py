from fractions import Fraction

import pytest

from ncwaring.errors import FieldMismatchError, FieldTooSmallError, PreconditionError, SingularMatrixError
from ncwaring.exactmat import (
    Conjugator,
    Mat,
    bracket,
    canonical_square_zero,
    charpoly,
    eigen_triangular_conjugator,
    eval_univariate,
    max_root_multiplicity,
    nilpotency_index,
    nilpotent_jordan_basis,
    rational_spectrum,
    square_zero_conjugator,
    zero_diagonal_conjugator,
)
from ncwaring.fields import QQ, Field

F7 = Field.prime(7)


def E(n, i, j, field=QQ):
    return Mat.unit(n, i, j, field)


class TestBasics:
    def test_construction_checks(self):
        with pytest.raises(PreconditionError):
            Mat([[1, 2]])
        with pytest.raises(FieldMismatchError):
            Mat.identity(2) + Mat.identity(2, F7)

    def test_bracket_of_units(self):
        assert bracket(E(2, 1, 1), E(2, 1, 2)) == E(2, 1, 2)
        assert bracket(E(2, 1, 2), E(2, 2, 1)) == Mat.diag([1, -1])

    def test_det_and_inverse(self, random_invertible):
        assert Mat.diag([2, 3]).det() == 6
        assert E(2, 1, 2).det() == 0
        assert Mat([[0, 1], [1, 0]]).det() == -1
        for field in (QQ, F7):
            p = random_invertible(4, field=field)
            assert p @ p.inverse() == Mat.identity(4, field)
        with pytest.raises(SingularMatrixError):
            E(3, 1, 2).inverse()

    def test_prime_field_elimination(self):
        a = Mat([[3, 5], [2, 6]], F7)
        assert a.det() == 1
        assert a @ a.inverse() == Mat.identity(2, F7)
        singular = Mat([[1, 2], [4, 1]], F7)
        assert singular.det() == 0
        assert singular.rank() == 1
        assert len(singular.kernel()) == 1
        with pytest.raises(SingularMatrixError):
            singular.inverse()

    def test_fraction_entries(self):
        a = Mat([["1/2", 1], [0, "2/3"]])
        assert a.det() == Fraction(1, 3)
        assert a.inverse() == Mat([[2, -3], [0, "3/2"]])

    def test_block_diag_of_unequal_sizes(self):
        a = Mat([[1, 2], [3, 4]])
        b = Mat([[5]])
        s = Mat.block_diag(b, a)
        assert s == Mat([[5, 0, 0], [0, 1, 2], [0, 3, 4]])
        assert Mat.block_diag(a, Mat.identity(3)).n == 5
        with pytest.raises(FieldMismatchError):
            Mat.block_diag(b, Mat.identity(2, F7))

    def test_rank_nullity(self, rng):
        for _ in range(20):
            rows = [[rng.randint(-3, 3) for _ in range(4)] for _ in range(3)]
            rows.append([a + b for a, b in zip(rows[0], rows[1])])
            a = Mat(rows)
            kernel = a.kernel()
            assert a.rank() + len(kernel) == 4
            assert len(kernel) >= 1
            for v in kernel:
                assert all(x == 0 for x in a.apply(v))

    def test_scalar_and_square_zero_predicates(self):
        assert Mat.identity(3).is_scalar()
        assert not Mat.diag([1, 2]).is_scalar()
        assert E(3, 1, 3).is_square_zero()
        assert nilpotency_index(E(3, 1, 2) + E(3, 2, 3)) == 3
        assert nilpotency_index(Mat.identity(2)) is None


class TestCharpoly:
    def test_examples(self):
        assert charpoly(Mat.identity(2)) == [1, -2, 1]
        assert charpoly(E(2, 1, 2)) == [1, 0, 0]
        assert charpoly(Mat.diag([1, -1])) == [1, 0, -1]

    def test_trace_and_determinant_coefficients(self, random_mat):
        for _ in range(10):
            a = random_mat(3)
            cp = charpoly(a)
            assert cp[1] == -a.trace()
            assert cp[3] == -a.det()

    def test_reduces_modulo_p(self, random_mat):
        for n in (2, 3, 4):
            a = random_mat(n)
            reduced = Mat(a.rows, F7)
            assert charpoly(reduced) == [F7.coerce(c) for c in charpoly(a)]

    @pytest.mark.parametrize("field", [QQ, F7])
    def test_cayley_hamilton(self, random_mat, field):
        for n in (1, 2, 3, 4, 5):
            a = random_mat(n, field=field)
            assert eval_univariate(charpoly(a), a).is_zero()


class TestSpectrum:
    def test_max_root_multiplicity(self):
        assert max_root_multiplicity(Mat.identity(3)) == 3
        assert max_root_multiplicity(Mat.diag([1, 1, 2])) == 2
        assert max_root_multiplicity(Mat.diag([1, -1])) == 1

    def test_designed_multiplicity_survives_conjugation(self, rng, random_invertible):
        for _ in range(5):
            mult = rng.randint(1, 4)
            values = [2] * mult + [rng.choice([-3, -1, 5, 7]) for _ in range(5 - mult)]
            expected = max(values.count(v) for v in values)
            p = random_invertible(5)
            a = p @ Mat.diag(values) @ p.inverse()
            assert max_root_multiplicity(a) == expected

    def test_rational_spectrum(self):
        s = rational_spectrum(Mat.diag([1, 2, 3]))
        assert s.roots == ((1, 1), (2, 1), (3, 1))
        assert s.splits
        rot = rational_spectrum(Mat([[0, 1], [-1, 0]]))
        assert rot.roots == ()
        assert not rot.splits
        swap = rational_spectrum(Mat([[0, 1], [1, 0]]))
        assert swap.roots == ((-1, 1), (1, 1))
        assert swap.splits

    def test_fractional_roots(self):
        s = rational_spectrum(Mat.diag([Fraction(1, 2), Fraction(1, 2), Fraction(-2, 3)]))
        assert s.roots == ((Fraction(-2, 3), 1), (Fraction(1, 2), 2))
        assert s.max_multiplicity == 2

    def test_prime_field_rejected(self):
        with pytest.raises(PreconditionError):
            rational_spectrum(Mat.identity(2, F7))


class TestConjugators:
    def test_compose_and_inverse(self, random_invertible, random_mat):
        c1 = Conjugator.of(random_invertible(3))
        c2 = Conjugator.of(random_invertible(3))
        a = random_mat(3)
        assert c1.compose(c2).apply(a) == c1.apply(c2.apply(a))
        assert c1.inverse().apply(c1.apply(a)) == a
        assert c1.unapply(c1.apply(a)) == a
        assert c1.compose(c2).is_valid()
        assert not Conjugator(Mat.identity(2) * 2, Mat.identity(2)).is_valid()

    def test_jordan_examples(self):
        j3 = E(3, 1, 2) + E(3, 2, 3)
        assert nilpotent_jordan_basis(j3).unapply(j3) == j3
        zero = Mat.zeros(2)
        assert nilpotent_jordan_basis(zero).p == Mat.identity(2)
        assert nilpotent_jordan_basis(E(3, 1, 3)).unapply(E(3, 1, 3)) == E(3, 1, 2)
        with pytest.raises(PreconditionError):
            nilpotent_jordan_basis(Mat.identity(2))

    def test_jordan_form_of_random_nilpotents(self, random_nilpotent):
        for n in (2, 3, 4, 5):
            u = random_nilpotent(n)
            j = nilpotent_jordan_basis(u).unapply(u)
            for i in range(n):
                for k in range(n):
                    if k == i + 1:
                        assert j[i, k] in (0, 1)
                    else:
                        assert j[i, k] == 0

    def test_zero_diagonal(self, random_traceless):
        already = E(2, 1, 2) + E(2, 2, 1)
        assert zero_diagonal_conjugator(already).p == Mat.identity(2)
        d = Mat.diag([1, -1])
        form = zero_diagonal_conjugator(d).unapply(d)
        assert form[0, 0] == 0 and form[1, 1] == 0
        for n in (3, 4, 5):
            a = random_traceless(n)
            b = zero_diagonal_conjugator(a).unapply(a)
            assert all(b[i, i] == 0 for i in range(n))

    @pytest.mark.parametrize("values", [[1, 2, -3], [1, 2, 3, -6], [5, -1, -1, -1, -2]])
    def test_zero_diagonal_of_diagonal_input(self, values):
        d = Mat.diag(values)
        conj = zero_diagonal_conjugator(d)
        assert conj.is_valid()
        b = conj.unapply(d)
        assert all(b[i, i] == 0 for i in range(d.n))
        assert charpoly(b) == charpoly(d)

    def test_zero_diagonal_dense_and_prime_field(self):
        dense = Mat([[2, 1, 3, -1], [4, -1, 0, 2], [1, 1, 5, 0], [0, 3, -2, -6]])
        b = zero_diagonal_conjugator(dense).unapply(dense)
        assert all(b[i, i] == 0 for i in range(4))
        d7 = Mat.diag([1, 2, 4], F7)
        b7 = zero_diagonal_conjugator(d7).unapply(d7)
        assert all(b7[i, i] == 0 for i in range(3))

    def test_zero_diagonal_preconditions(self):
        with pytest.raises(PreconditionError):
            zero_diagonal_conjugator(Mat.diag([1, 1]))
        f3 = Field.prime(3)
        with pytest.raises(FieldTooSmallError):
            zero_diagonal_conjugator(Mat.identity(3, f3))

    def test_square_zero_conjugator(self):
        e12 = E(2, 1, 2)
        assert square_zero_conjugator(e12, e12).unapply(e12) == e12
        assert square_zero_conjugator(e12, E(2, 2, 1)).unapply(e12) == E(2, 2, 1)
        s = E(3, 1, 3) * 2
        assert square_zero_conjugator(s, E(3, 1, 2)).unapply(s) == E(3, 1, 2)

    def test_square_zero_conjugator_random(self, random_invertible):
        for n, r in ((4, 2), (5, 2), (5, 1)):
            c = canonical_square_zero(n, r)
            p, q = random_invertible(n), random_invertible(n)
            s = p @ c @ p.inverse()
            t = q @ c @ q.inverse()
            assert square_zero_conjugator(s, t).unapply(s) == t

    def test_square_zero_conjugator_preconditions(self):
        with pytest.raises(PreconditionError):
            square_zero_conjugator(E(4, 1, 2), canonical_square_zero(4, 2))
        with pytest.raises(PreconditionError):
            square_zero_conjugator(Mat.identity(2), Mat.identity(2))

    def test_canonical_square_zero(self):
        c = canonical_square_zero(4, 2)
        assert c.rank() == 2
        assert c.is_square_zero()
        with pytest.raises(PreconditionError):
            canonical_square_zero(3, 2)

    def test_eigen_triangular_order(self, random_invertible):
        p = random_invertible(4)
        a = p @ Mat.diag([3, 1, 2, 1]) @ p.inverse()
        t = eigen_triangular_conjugator(a).unapply(a)
        assert [t[i, i] for i in range(4)] == [1, 1, 3, 2]
        assert t.strictly_lower().is_zero()

    def test_eigen_triangular_non_diagonalizable(self, random_invertible):
        block = Mat([[2, 1, 0], [0, 2, 0], [0, 0, 5]])
        p = random_invertible(3)
        a = p @ block @ p.inverse()
        t = eigen_triangular_conjugator(a).unapply(a)
        assert t.strictly_lower().is_zero()
        assert [t[i, i] for i in range(3)] == [2, 2, 5]

    def test_eigen_triangular_needs_split(self):
        with pytest.raises(PreconditionError):
            eigen_triangular_conjugator(Mat([[0, 1], [-1, 0]]))
