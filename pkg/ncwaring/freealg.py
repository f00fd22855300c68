"""
Noncommutative polynomials over an exact field.

A monomial is a Word, a tuple of variable indices (1 for X1, 2 for X2, ...);
the empty tuple is the unit. A Poly is a finitely supported map from words to
nonzero scalars, kept in canonical form so that equality of polynomials is
equality of term maps.
"""
from functools import lru_cache
from itertools import permutations
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Tuple

from .errors import FieldMismatchError, PreconditionError
from .fields import QQ, Field, Scalar, common_field

Word = Tuple[int, ...]


def word_key(w: Word) -> Tuple[int, Word]:
    # degree first, then lexicographic
    return (len(w), w)


class Poly:
    __slots__ = ("field", "_terms", "_hash")

    def __init__(self, terms: Mapping[Word, Any], field: Field = QQ):
        clean: Dict[Word, Scalar] = {}
        for w, c in terms.items():
            c = field.coerce(c)
            if c != 0:
                clean[tuple(w)] = c
        self.field = field
        self._terms = dict(sorted(clean.items(), key=lambda kv: word_key(kv[0])))
        self._hash = None

    # ---- constructors ----

    @classmethod
    def zero(cls, field: Field = QQ) -> "Poly":
        return cls({}, field)

    @classmethod
    def const(cls, c: Any, field: Field = QQ) -> "Poly":
        return cls({(): c}, field)

    @classmethod
    def var(cls, i: int, field: Field = QQ) -> "Poly":
        if i < 1:
            raise PreconditionError(f"variable indices start at 1, got {i}")
        return cls({(i,): 1}, field)

    @classmethod
    def monomial(cls, w: Iterable[int], c: Any = 1, field: Field = QQ) -> "Poly":
        return normalize([(tuple(w), c)], field)

    # ---- inspection ----

    @property
    def terms(self) -> Dict[Word, Scalar]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Word, Scalar]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def nvars(self) -> int:
        return max((max(w) for w in self._terms if w), default=0)

    @property
    def degree(self) -> int:
        """Largest word length; -1 for the zero polynomial."""
        return max((len(w) for w in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not w for w in self._terms)

    @property
    def constant_term(self) -> Scalar:
        return self._terms.get((), self.field.zero)

    def is_multilinear(self) -> bool:
        """Every monomial is a permutation of X1..Xm, m = nvars."""
        m = self.nvars
        if m == 0 or self.is_zero():
            return False
        target = tuple(range(1, m + 1))
        return all(tuple(sorted(w)) == target for w in self._terms)

    # ---- arithmetic ----

    def _check(self, other: "Poly") -> None:
        if self.field != other.field:
            raise FieldMismatchError(f"polynomials over {self.field} and {other.field}")

    def _lift(self, other: Any) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(other, self.field)

    def __add__(self, other: Any) -> "Poly":
        other = self._lift(other)
        out = dict(self._terms)
        for w, c in other._terms.items():
            out[w] = out.get(w, 0) + c
        return Poly(out, self.field)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({w: -c for w, c in self._terms.items()}, self.field)

    def __sub__(self, other: Any) -> "Poly":
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> "Poly":
        return self._lift(other) - self

    def __mul__(self, other: Any) -> "Poly":
        if not isinstance(other, Poly):
            c = self.field.coerce(other)
            return Poly({w: c * v for w, v in self._terms.items()}, self.field)
        self._check(other)
        out: Dict[Word, Scalar] = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return Poly(out, self.field)

    def __rmul__(self, other: Any) -> "Poly":
        # scalars are central
        return self * other

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise PreconditionError("negative powers do not exist in the free algebra")
        out = Poly.const(1, self.field)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field == other.field and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field, tuple(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        from .parser import render_poly
        return f"Poly({render_poly(self)!r}, {self.field})"

    # ---- derived ----

    def shift(self, k: int) -> "Poly":
        """Rename every variable X_i to X_{i+k}."""
        return Poly({tuple(i + k for i in w): c for w, c in self._terms.items()}, self.field)

    def over(self, field: Field) -> "Poly":
        if field == self.field:
            return self
        if not self.field.is_rational:
            raise FieldMismatchError(f"cannot move a polynomial from {self.field} to {field}")
        return Poly({w: field.coerce(c) for w, c in self._terms.items()}, field)


def normalize(raw_terms: Iterable[Tuple[Iterable[int], Any]], field: Field = None) -> Poly:
    raw = [(tuple(w), c) for w, c in raw_terms]
    for w, _ in raw:
        if any(i < 1 for i in w):
            raise PreconditionError(f"variable indices start at 1, got word {w}")
    inferred = common_field(*(c for _, c in raw))
    if field is None:
        field = inferred
    for _, c in raw:
        if not isinstance(c, int) and Field.of(c) != field:
            raise FieldMismatchError(f"scalar {c!r} given for a polynomial over {field}")
    out: Dict[Word, Scalar] = {}
    for w, c in raw:
        out[w] = out.get(w, 0) + field.coerce(c)
    return Poly(out, field)


def commutator_of(f: Poly, g: Poly) -> Poly:
    return f * g - g * f


def hat_of(f: Poly) -> Poly:
    """[f(X1..Xm), f(Xm+1..X2m)] with m = nvars(f)."""
    return commutator_of(f, f.shift(f.nvars))


def permutation_sign(perm: Tuple[int, ...]) -> int:
    inversions = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


@lru_cache(maxsize=None)
def capelli(s: int) -> Poly:
    """
    The s-th Capelli polynomial. X1..Xs are the alternating slots; the
    separating slots Y1..Y(s-1) are the variables X(s+1)..X(2s-1).
    """
    if s < 1:
        raise PreconditionError(f"Capelli index must be positive, got {s}")
    raw: List[Tuple[Word, int]] = []
    for perm in permutations(range(1, s + 1)):
        word: List[int] = []
        for pos, x in enumerate(perm):
            if pos:
                word.append(s + pos)
            word.append(x)
        raw.append((tuple(word), permutation_sign(perm)))
    return normalize(raw, QQ)


def ad_power(f: Poly, k: int) -> Poly:
    """ad_f^k applied to the fresh variable X(m+1)."""
    if k < 1:
        raise PreconditionError(f"ad power must be positive, got {k}")
    g = Poly.var(f.nvars + 1, f.field)
    for _ in range(k):
        g = commutator_of(f, g)
    return g


def least_rotation(w: Word) -> Word:
    if not w:
        return w
    return min(w[i:] + w[:i] for i in range(len(w)))


def cyclic_normal_form(f: Poly) -> Poly:
    """
    Rotate every word to its least rotation and merge. Two polynomials differ
    by a sum of commutators exactly when their normal forms agree.
    """
    out: Dict[Word, Scalar] = {}
    for w, c in f.items():
        r = least_rotation(w)
        out[r] = out.get(r, 0) + c
    return Poly(out, f.field)


def cyclically_equivalent(f: Poly, g: Poly) -> bool:
    return cyclic_normal_form(f - g).is_zero()
