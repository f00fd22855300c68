"""
Classical decompositions used as ingredients by the certificate engine:
traceless matrix -> commutator, any matrix -> commutator plus scalar,
nilpotent -> two square-zero, traceless -> at most four square-zero.
"""
from dataclasses import dataclass
from typing import List, Tuple

from .errors import FieldTooSmallError, PreconditionError
from .exactmat import Mat, bracket, nilpotent_jordan_basis, zero_diagonal_conjugator


@dataclass(frozen=True)
class SquareZeroSum:
    parts: Tuple[Mat, ...]
    target: Mat

    def verify(self) -> bool:
        total = Mat.zeros(self.target.n, self.target.field)
        for part in self.parts:
            if not part.is_square_zero():
                return False
            total = total + part
        return total == self.target


@dataclass(frozen=True)
class CommutatorForm:
    x: Mat
    y: Mat
    target: Mat

    def verify(self) -> bool:
        return bracket(self.x, self.y) == self.target


def _require_traceless(a: Mat) -> None:
    if a.trace() != 0:
        raise PreconditionError(f"matrix has trace {a.trace()}, expected 0")


def commutator_realization(a: Mat) -> CommutatorForm:
    _require_traceless(a)
    n, field = a.n, a.field
    if a.is_zero():
        zero = Mat.zeros(n, field)
        return CommutatorForm(zero, zero, a)
    if not field.is_rational and field.characteristic < n:
        raise FieldTooSmallError(f"diag(0..{n - 1}) needs distinct entries, {field} is too small")
    conj = zero_diagonal_conjugator(a)
    d = conj.unapply(a)
    # [diag(0..n-1), y]_ij = (i - j) y_ij
    x = Mat.diag(list(range(n)), field)
    y = Mat([[d[i, j] / field.coerce(i - j) if i != j else 0 for j in range(n)] for i in range(n)], field)
    return CommutatorForm(conj.apply(x), conj.apply(y), a)


def commutators_plus_central_split(a: Mat, k: int = 1) -> Tuple[List[CommutatorForm], Mat]:
    """
    a = sum of k commutators + (tr(a)/n)*I. Over a field one commutator
    suffices; the extra k - 1 forms are zero.
    """
    if k < 1:
        raise PreconditionError(f"commutator count must be positive, got {k}")
    n, field = a.n, a.field
    if field.coerce(n) == 0:
        raise FieldTooSmallError(f"characteristic of {field} divides n = {n}")
    central = Mat.identity(n, field) * (a.trace() / field.coerce(n))
    first = commutator_realization(a - central)
    zero = Mat.zeros(n, field)
    forms = [first] + [CommutatorForm(zero, zero, zero) for _ in range(k - 1)]
    return forms, central


def nilpotent_two_square_zero(u: Mat) -> SquareZeroSum:
    conj = nilpotent_jordan_basis(u)
    j = conj.unapply(u)
    n, field = u.n, u.field
    odd = [[0] * n for _ in range(n)]
    even = [[0] * n for _ in range(n)]
    for i in range(n - 1):
        # 0-based even rows are the odd rows counted from 1
        (odd if i % 2 == 0 else even)[i][i + 1] = j[i, i + 1]
    a, b = Mat(odd, field), Mat(even, field)
    if a + b != j:
        raise PreconditionError("Jordan basis did not produce a superdiagonal form")
    return SquareZeroSum((conj.apply(a), conj.apply(b)), u)


def traceless_four_square_zero(a: Mat) -> SquareZeroSum:
    _require_traceless(a)
    conj = zero_diagonal_conjugator(a)
    d = conj.unapply(a)
    parts: List[Mat] = []
    for half in (d.strictly_lower(), d.strictly_upper()):
        for part in nilpotent_two_square_zero(half).parts:
            if not part.is_zero():
                parts.append(conj.apply(part))
    return SquareZeroSum(tuple(parts), a)
