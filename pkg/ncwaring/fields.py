from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Union

from sympy import isprime

from .errors import FieldMismatchError, PreconditionError


class Fp:
    """Element of the prime field F_p, stored as its least nonnegative residue."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = value % p
        self.p = p

    def _residue(self, other: Any) -> int:
        if isinstance(other, Fp):
            if other.p != self.p:
                raise FieldMismatchError(f"cannot combine F_{self.p} and F_{other.p} elements")
            return other.value
        if isinstance(other, int):
            return other % self.p
        raise FieldMismatchError(f"cannot combine an F_{self.p} element with {type(other).__name__}")

    def __add__(self, other: Any) -> "Fp":
        return Fp(self.value + self._residue(other), self.p)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "Fp":
        return Fp(self.value - self._residue(other), self.p)

    def __rsub__(self, other: Any) -> "Fp":
        return Fp(self._residue(other) - self.value, self.p)

    def __mul__(self, other: Any) -> "Fp":
        return Fp(self.value * self._residue(other), self.p)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "Fp":
        d = self._residue(other)
        if d == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return Fp(self.value * pow(d, -1, self.p), self.p)

    def __rtruediv__(self, other: Any) -> "Fp":
        if self.value == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return Fp(self._residue(other) * pow(self.value, -1, self.p), self.p)

    def __neg__(self) -> "Fp":
        return Fp(-self.value, self.p)

    def __pow__(self, k: int) -> "Fp":
        if k < 0:
            return (1 / self) ** (-k)
        return Fp(pow(self.value, k, self.p), self.p)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, Fp):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.p, self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"Fp({self.value}, {self.p})"

    def __str__(self) -> str:
        return str(self.value)


Scalar = Union[Fraction, Fp]


@dataclass(frozen=True)
class Field:
    """Q when characteristic is 0, otherwise F_p."""

    characteristic: int = 0

    @classmethod
    def rationals(cls) -> "Field":
        return cls(0)

    @classmethod
    def prime(cls, p: int) -> "Field":
        if not isprime(p):
            raise PreconditionError(f"{p} is not a prime")
        return cls(p)

    @classmethod
    def parse(cls, tag: str) -> "Field":
        tag = tag.strip()
        if tag == "Q":
            return cls.rationals()
        if tag.startswith("Fp:"):
            try:
                p = int(tag[3:])
            except ValueError:
                raise PreconditionError(f"bad field tag {tag!r}")
            return cls.prime(p)
        raise PreconditionError(f"bad field tag {tag!r} (expected Q or Fp:<p>)")

    @staticmethod
    def of(x: Any) -> "Field":
        if isinstance(x, Fp):
            return Field(x.p)
        return QQ

    @property
    def is_rational(self) -> bool:
        return self.characteristic == 0

    @property
    def tag(self) -> str:
        return "Q" if self.is_rational else f"Fp:{self.characteristic}"

    @property
    def zero(self) -> Scalar:
        return self.coerce(0)

    @property
    def one(self) -> Scalar:
        return self.coerce(1)

    def coerce(self, x: Any) -> Scalar:
        if isinstance(x, bool):
            x = int(x)
        if self.is_rational:
            if isinstance(x, Fraction):
                return x
            if isinstance(x, int):
                return Fraction(x)
            if isinstance(x, str):
                return _parse_rational(x)
            raise FieldMismatchError(f"cannot read {x!r} as a rational")
        p = self.characteristic
        if isinstance(x, Fp):
            if x.p != p:
                raise FieldMismatchError(f"F_{x.p} element used over F_{p}")
            return x
        if isinstance(x, int):
            return Fp(x, p)
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise FieldMismatchError(f"{x} has no image in F_{p}")
            return Fp(x.numerator, p) / x.denominator
        if isinstance(x, str):
            return self.coerce(_parse_rational(x))
        raise FieldMismatchError(f"cannot read {x!r} in F_{p}")

    def format(self, x: Scalar) -> str:
        return str(self.coerce(x))

    def __str__(self) -> str:
        return self.tag


def _parse_rational(text: str) -> Fraction:
    try:
        num, _, den = text.strip().partition("/")
        value = Fraction(int(num), int(den) if den else 1)
    except (ValueError, ZeroDivisionError):
        raise PreconditionError(f"bad scalar literal {text!r}")
    return value


QQ = Field.rationals()


def common_field(*xs: Any) -> Field:
    """Field shared by the given scalars; plain ints fit anywhere."""
    found = None
    for x in xs:
        if isinstance(x, Fp):
            f = Field(x.p)
        elif isinstance(x, Fraction):
            f = QQ
        else:
            continue
        if found is None:
            found = f
        elif found != f:
            raise FieldMismatchError(f"scalars over {found} and {f}")
    return found or QQ
