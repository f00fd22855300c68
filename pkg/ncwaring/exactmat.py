"""
Exact dense square matrices over Q or F_p, and the similarity constructions
the certificate pipelines are built from.

Conjugator convention: a Conjugator (p, p_inv) returned by a normal-form
routine here satisfies `unapply(a) = p_inv @ a @ p = normal form`.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, List, Optional, Sequence, Tuple

from sympy import GF
from sympy import QQ as SQQ
from sympy import Poly as SymPoly
from sympy import Rational, symbols
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from .errors import FieldMismatchError, FieldTooSmallError, PreconditionError, SingularMatrixError
from .fields import QQ, Field, Scalar, common_field

Vector = Tuple[Scalar, ...]

_x = symbols("x")


class Mat:
    __slots__ = ("field", "rows", "_hash")

    def __init__(self, rows: Sequence[Sequence[Any]], field: Optional[Field] = None):
        rows = [list(r) for r in rows]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise PreconditionError("matrices are square and nonempty")
        if field is None:
            field = common_field(*(x for r in rows for x in r))
        self.field = field
        self.rows = tuple(tuple(field.coerce(x) for x in r) for r in rows)
        self._hash = None

    @classmethod
    def _raw(cls, rows: Tuple[Tuple[Scalar, ...], ...], field: Field) -> "Mat":
        m = object.__new__(cls)
        m.field = field
        m.rows = rows
        m._hash = None
        return m

    # ---- constructors ----

    @classmethod
    def zeros(cls, n: int, field: Field = QQ) -> "Mat":
        z = field.zero
        return cls._raw(tuple(tuple(z for _ in range(n)) for _ in range(n)), field)

    @classmethod
    def identity(cls, n: int, field: Field = QQ) -> "Mat":
        z, o = field.zero, field.one
        return cls._raw(tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), field)

    @classmethod
    def unit(cls, n: int, i: int, j: int, field: Field = QQ) -> "Mat":
        """Matrix unit e_ij, 1-based like the usual notation."""
        rows = [[0] * n for _ in range(n)]
        rows[i - 1][j - 1] = 1
        return cls(rows, field)

    @classmethod
    def diag(cls, values: Sequence[Any], field: Field = QQ) -> "Mat":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], field)

    @classmethod
    def from_columns(cls, cols: Sequence[Vector], field: Field) -> "Mat":
        return cls._raw(tuple(zip(*cols)), field)

    @classmethod
    def block_diag(cls, a: "Mat", b: "Mat") -> "Mat":
        """a ⊕ b; the blocks may have different sizes."""
        if a.field != b.field:
            raise FieldMismatchError(f"matrices over {a.field} and {b.field}")
        n, m = a.n, b.n
        z = a.field.zero
        rows = [list(r) + [z] * m for r in a.rows] + [[z] * n + list(r) for r in b.rows]
        return cls._raw(tuple(tuple(r) for r in rows), a.field)

    # ---- basics ----

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: Tuple[int, int]) -> Scalar:
        i, j = ij
        return self.rows[i][j]

    def _check(self, other: "Mat") -> None:
        if not isinstance(other, Mat):
            raise TypeError(f"expected a Mat, got {type(other).__name__}")
        if self.field != other.field:
            raise FieldMismatchError(f"matrices over {self.field} and {other.field}")
        if self.n != other.n:
            raise PreconditionError(f"dimension mismatch: {self.n} vs {other.n}")

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.field == other.field and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field, self.rows))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"Mat([{body}], {self.field})"

    def __add__(self, other: "Mat") -> "Mat":
        self._check(other)
        return Mat._raw(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.field)

    def __sub__(self, other: "Mat") -> "Mat":
        self._check(other)
        return Mat._raw(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.field)

    def __neg__(self) -> "Mat":
        return Mat._raw(tuple(tuple(-a for a in r) for r in self.rows), self.field)

    def __mul__(self, c: Any) -> "Mat":
        if isinstance(c, Mat):
            raise TypeError("use @ for matrix products")
        c = self.field.coerce(c)
        return Mat._raw(tuple(tuple(c * a for a in r) for r in self.rows), self.field)

    __rmul__ = __mul__

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check(other)
        zero = self.field.zero
        cols = list(zip(*other.rows))
        return Mat._raw(
            tuple(tuple(sum((a * b for a, b in zip(r, c) if a and b), zero) for c in cols) for r in self.rows),
            self.field,
        )

    def power(self, k: int) -> "Mat":
        out = Mat.identity(self.n, self.field)
        for _ in range(k):
            out = out @ self
        return out

    def apply(self, v: Vector) -> Vector:
        zero = self.field.zero
        return tuple(sum((a * b for a, b in zip(r, v) if a and b), zero) for r in self.rows)

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def transpose(self) -> "Mat":
        return Mat._raw(tuple(zip(*self.rows)), self.field)

    def trace(self) -> Scalar:
        return sum((self.rows[i][i] for i in range(self.n)), self.field.zero)

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.rows for a in r)

    def is_scalar(self) -> bool:
        d = self.rows[0][0]
        return all((a == d) if i == j else (a == 0) for i, r in enumerate(self.rows) for j, a in enumerate(r))

    def is_square_zero(self) -> bool:
        return (self @ self).is_zero()

    def strictly_upper(self) -> "Mat":
        z = self.field.zero
        return Mat._raw(tuple(tuple(a if j > i else z for j, a in enumerate(r)) for i, r in enumerate(self.rows)), self.field)

    def strictly_lower(self) -> "Mat":
        z = self.field.zero
        return Mat._raw(tuple(tuple(a if j < i else z for j, a in enumerate(r)) for i, r in enumerate(self.rows)), self.field)

    def flatten(self) -> Vector:
        return tuple(a for r in self.rows for a in r)

    def height(self) -> int:
        if self.field.is_rational:
            return max(max(abs(a.numerator), a.denominator) for r in self.rows for a in r)
        return max(int(a) for r in self.rows for a in r)

    # ---- elimination ----

    def rank(self) -> int:
        return rank_of_rows(self.rows, self.field)

    def kernel(self) -> List[Vector]:
        return nullspace(self.rows, self.field, self.n)

    def det(self) -> Scalar:
        return _from_domain(_to_domain(self.rows, self.field).det(), self.field)

    def inverse(self) -> "Mat":
        try:
            inv = _to_domain(self.rows, self.field).inv()
        except DMNonInvertibleMatrixError:
            raise SingularMatrixError("matrix is singular")
        return Mat._raw(_rows_from_domain(inv, self.field), self.field)

    def is_invertible(self) -> bool:
        return self.rank() == self.n


def bracket(a: Mat, b: Mat) -> Mat:
    return a @ b - b @ a


# ---- sympy DomainMatrix bridge ----

@lru_cache(maxsize=None)
def _sympy_domain(field: Field):
    return SQQ if field.is_rational else GF(field.characteristic)


def _to_domain(rows: Sequence[Sequence[Any]], field: Field) -> DomainMatrix:
    K = _sympy_domain(field)
    if field.is_rational:
        data = [[K(x.numerator, x.denominator) for x in map(field.coerce, r)] for r in rows]
    else:
        data = [[K(int(x)) for x in map(field.coerce, r)] for r in rows]
    return DomainMatrix(data, (len(data), len(data[0]) if data else 0), K)


def _from_domain(e: Any, field: Field) -> Scalar:
    if field.is_rational:
        return Fraction(int(e.numerator), int(e.denominator))
    return field.coerce(_sympy_domain(field).to_int(e))


def _rows_from_domain(m: DomainMatrix, field: Field) -> Tuple[Tuple[Scalar, ...], ...]:
    return tuple(tuple(_from_domain(e, field) for e in r) for r in m.to_list())


# ---- row reduction on plain row lists ----

def rref(rows: Sequence[Sequence[Scalar]], field: Field) -> Tuple[List[List[Scalar]], List[int]]:
    if not rows:
        return [], []
    reduced, pivots = _to_domain(rows, field).rref()
    return [list(r) for r in _rows_from_domain(reduced, field)], list(pivots)


def rank_of_rows(rows: Sequence[Sequence[Scalar]], field: Field) -> int:
    if not rows:
        return 0
    return _to_domain(rows, field).rank()


def nullspace(rows: Sequence[Sequence[Scalar]], field: Field, ncols: int) -> List[Vector]:
    """Basis of {v : rows . v = 0}, one vector per free column."""
    if not rows:
        return [tuple(field.one if i == j else field.zero for i in range(ncols)) for j in range(ncols)]
    reduced, pivots = rref(rows, field)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for r, pc in enumerate(pivots):
            v[pc] = -reduced[r][f]
        basis.append(tuple(v))
    return basis


def extend_independent(base: Sequence[Vector], candidates: Sequence[Vector], field: Field) -> List[Vector]:
    """Candidates, in order, that are independent modulo span(base) and of each other."""
    current = list(base)
    r = rank_of_rows(current, field)
    chosen = []
    for v in candidates:
        trial = current + [v]
        r2 = rank_of_rows(trial, field)
        if r2 > r:
            chosen.append(v)
            current, r = trial, r2
    return chosen


def standard_basis(n: int, field: Field) -> List[Vector]:
    return [tuple(field.one if i == j else field.zero for i in range(n)) for j in range(n)]


# ---- conjugators ----

@dataclass(frozen=True)
class Conjugator:
    p: Mat
    p_inv: Mat

    @classmethod
    def identity(cls, n: int, field: Field = QQ) -> "Conjugator":
        i = Mat.identity(n, field)
        return cls(i, i)

    @classmethod
    def of(cls, p: Mat) -> "Conjugator":
        return cls(p, p.inverse())

    def apply(self, a: Mat) -> Mat:
        return self.p @ a @ self.p_inv

    def unapply(self, a: Mat) -> Mat:
        return self.p_inv @ a @ self.p

    def inverse(self) -> "Conjugator":
        return Conjugator(self.p_inv, self.p)

    def compose(self, other: "Conjugator") -> "Conjugator":
        """self.compose(other).apply(a) == self.apply(other.apply(a))"""
        return Conjugator(self.p @ other.p, other.p_inv @ self.p_inv)

    def is_valid(self) -> bool:
        return (self.p @ self.p_inv) == Mat.identity(self.p.n, self.p.field)


# ---- characteristic polynomial and spectrum ----

def charpoly(a: Mat) -> List[Scalar]:
    """det(xI - a), coefficients from x^n down to the constant term (division-free)."""
    return [_from_domain(c, a.field) for c in _to_domain(a.rows, a.field).charpoly()]


def eval_univariate(coeffs: Sequence[Scalar], a: Mat) -> Mat:
    """Horner evaluation of a highest-first coefficient list at a matrix."""
    out = Mat.zeros(a.n, a.field)
    eye = Mat.identity(a.n, a.field)
    for c in coeffs:
        out = out @ a + eye * c
    return out


def _sympy_charpoly(a: Mat) -> SymPoly:
    if not a.field.is_rational:
        raise PreconditionError("spectral data is computed over the rationals only")
    coeffs = [Rational(c.numerator, c.denominator) for c in charpoly(a)]
    return SymPoly(coeffs, _x, domain=SQQ)


def max_root_multiplicity(a: Mat) -> int:
    # square-free decomposition is the repeated-gcd chain
    _, factors = _sympy_charpoly(a).sqf_list()
    return max(k for _, k in factors)


@dataclass(frozen=True)
class Spectrum:
    roots: Tuple[Tuple[Fraction, int], ...]
    splits: bool

    @property
    def distinct(self) -> int:
        return len(self.roots)

    @property
    def max_multiplicity(self) -> int:
        return max((k for _, k in self.roots), default=0)


def rational_spectrum(a: Mat) -> Spectrum:
    _, factors = _sympy_charpoly(a).factor_list()
    roots = []
    for fac, k in factors:
        if fac.degree() != 1:
            continue
        lead, const = fac.all_coeffs()
        r = -const / lead
        roots.append((Fraction(int(r.p), int(r.q)), int(k)))
    roots.sort()
    return Spectrum(tuple(roots), sum(k for _, k in roots) == a.n)


# ---- normal forms ----

def nilpotency_index(u: Mat) -> Optional[int]:
    power = u
    for k in range(1, u.n + 1):
        if power.is_zero():
            return k
        power = power @ u
    return None


def nilpotent_jordan_basis(u: Mat) -> Conjugator:
    """
    Jordan basis of a nilpotent matrix from its kernel chain. The conjugated
    matrix has ones on the superdiagonal inside each chain and zeros elsewhere;
    chains are ordered longest first.
    """
    k = nilpotency_index(u)
    if k is None:
        raise PreconditionError("matrix is not nilpotent")
    field = u.field
    kernels: List[List[Vector]] = [[]]
    power = Mat.identity(u.n, field)
    for _ in range(k):
        power = power @ u
        kernels.append(power.kernel())

    chains: List[Tuple[int, Vector]] = []
    carried: List[Vector] = []
    for level in range(k, 0, -1):
        starts = extend_independent(kernels[level - 1] + carried, kernels[level], field)
        chains.extend((level, v) for v in starts)
        carried = [u.apply(w) for w in carried + starts]

    cols: List[Vector] = []
    for length, v in chains:
        chain = [v]
        for _ in range(length - 1):
            chain.append(u.apply(chain[-1]))
        cols.extend(reversed(chain))
    return Conjugator.of(Mat.from_columns(cols, field))


def _moving_vector(a: Mat) -> Vector:
    # a vector v with a.v not proportional to v; a is not scalar
    n, field = a.n, a.field
    basis = standard_basis(n, field)
    for j in range(n):
        if any(a.rows[i][j] != 0 for i in range(n) if i != j):
            return basis[j]
    for i in range(n):
        for j in range(i + 1, n):
            if a.rows[i][i] != a.rows[j][j]:
                return tuple(x + y for x, y in zip(basis[i], basis[j]))
    raise PreconditionError("scalar matrix has no moving vector")


def _zero_diagonal(a: Mat) -> Conjugator:
    n, field = a.n, a.field
    if all(a.rows[i][i] == 0 for i in range(n)):
        return Conjugator.identity(n, field)
    if a.is_scalar():
        raise FieldTooSmallError(f"traceless nonzero scalar matrix over {field}; need characteristic > n")
    v = _moving_vector(a)
    av = a.apply(v)
    rest = extend_independent([v, av], standard_basis(n, field), field)
    q = Conjugator.of(Mat.from_columns([v, av] + rest, field))
    b = q.unapply(a)
    if n == 2:
        return q
    trailing = Mat._raw(tuple(r[1:] for r in b.rows[1:]), field)
    inner = _zero_diagonal(trailing)
    one = Mat.identity(1, field)
    lift = Conjugator(Mat.block_diag(one, inner.p), Mat.block_diag(one, inner.p_inv))
    return Conjugator(q.p @ lift.p, lift.p_inv @ q.p_inv)


def zero_diagonal_conjugator(a: Mat) -> Conjugator:
    if a.trace() != 0:
        raise PreconditionError("zero-diagonal form needs a traceless matrix")
    return _zero_diagonal(a)


def canonical_square_zero(n: int, r: int, field: Field = QQ) -> Mat:
    """Direct sum of r blocks [[0,1],[0,0]] followed by zeros."""
    if 2 * r > n:
        raise PreconditionError(f"square-zero rank {r} exceeds {n // 2}")
    rows = [[0] * n for _ in range(n)]
    for i in range(r):
        rows[2 * i][2 * i + 1] = 1
    return Mat(rows, field)


def _square_zero_basis(s: Mat) -> Mat:
    n, field = s.n, s.field
    basis = standard_basis(n, field)
    images: List[Vector] = []
    sources: List[Vector] = []
    r = 0
    for j in range(n):
        c = s.column(j)
        if rank_of_rows(images + [c], field) > r:
            images.append(c)
            sources.append(basis[j])
            r += 1
    extra = extend_independent(images, s.kernel(), field)
    cols: List[Vector] = []
    for w, v in zip(images, sources):
        cols.extend([w, v])
    return Mat.from_columns(cols + extra, field)


def square_zero_conjugator(s: Mat, t: Mat) -> Conjugator:
    s._check(t)
    if not s.is_square_zero() or not t.is_square_zero():
        raise PreconditionError("both matrices must square to zero")
    if s.rank() != t.rank():
        raise PreconditionError(f"rank mismatch: {s.rank()} vs {t.rank()}")
    ps = Conjugator.of(_square_zero_basis(s))
    pt = Conjugator.of(_square_zero_basis(t))
    return Conjugator(ps.p @ pt.p_inv, pt.p @ ps.p_inv)


def eigen_triangular_conjugator(a: Mat, spectrum: Optional[Spectrum] = None) -> Conjugator:
    """
    For a rationally split matrix, a basis in which it is block diagonal with
    one upper triangular block per eigenvalue. The two largest blocks go first
    and last.
    """
    spectrum = spectrum or rational_spectrum(a)
    if not spectrum.splits:
        raise PreconditionError("characteristic polynomial does not split over the rationals")
    n, field = a.n, a.field
    eye = Mat.identity(n, field)
    ranked = sorted(spectrum.roots, key=lambda rk: (-rk[1], rk[0]))
    ordered = ranked[:1] + ranked[2:] + ranked[1:2]
    cols: List[Vector] = []
    for lam, mult in ordered:
        b = a - eye * lam
        block: List[Vector] = []
        power = eye
        while len(block) < mult:
            power = power @ b
            block.extend(extend_independent(block, power.kernel(), field))
        cols.extend(block)
    return Conjugator.of(Mat.from_columns(cols, field))
