"""
Text syntax for polynomials.

    expr     := ['-'] term (('+' | '-') term)*
    term     := factor ('*' factor)*
    factor   := atom ('^' natural)?
    atom     := rational | variable | '(' expr ')' | '[' expr ',' expr ']'
    variable := 'X' natural
    rational := integer ('/' positive-integer)?

Whitespace between tokens is ignored. '[a,b]' is the commutator ab - ba.
"""
from fractions import Fraction
from typing import List

from .errors import PolySyntaxError
from .fields import QQ, Field
from .freealg import Poly, commutator_of


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def fail(self, message: str) -> PolySyntaxError:
        return PolySyntaxError(message, self.pos + 1)

    def skip_ws(self) -> None:
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            found = self.peek() or "end of input"
            raise self.fail(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def digits(self) -> int:
        start = self.pos
        while self.pos < len(self.src) and self.src[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.fail("expected digits")
        return int(self.src[start:self.pos])

    def parse(self) -> Poly:
        poly = self.expr()
        if self.peek():
            raise self.fail(f"unexpected {self.peek()!r}")
        return poly

    def expr(self) -> Poly:
        negate = False
        if self.peek() == "-":
            self.pos += 1
            negate = True
        out = self.term()
        if negate:
            out = -out
        while self.peek() in ("+", "-"):
            op = self.src[self.pos]
            self.pos += 1
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Poly:
        out = self.factor()
        while self.peek() == "*":
            self.pos += 1
            out = out * self.factor()
        return out

    def factor(self) -> Poly:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            self.skip_ws()
            base = base ** self.digits()
        return base

    def atom(self) -> Poly:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            self.expect(")")
            return inner
        if ch == "[":
            self.pos += 1
            left = self.expr()
            self.expect(",")
            right = self.expr()
            self.expect("]")
            return commutator_of(left, right)
        if ch == "X":
            self.pos += 1
            at = self.pos
            index = self.digits()
            if index < 1:
                self.pos = at
                raise self.fail("variable indices start at 1")
            return Poly.var(index)
        if ch.isdigit():
            num = self.digits()
            den = 1
            if self.peek() == "/":
                self.pos += 1
                self.skip_ws()
                at = self.pos
                den = self.digits()
                if den == 0:
                    self.pos = at
                    raise self.fail("zero denominator")
            return Poly.const(Fraction(num, den))
        if not ch:
            raise self.fail("unexpected end of input")
        raise self.fail(f"unexpected {ch!r}")


def parse_poly(src: str, field: Field = QQ) -> Poly:
    return _Parser(src).parse().over(field)


def _render_word(w) -> str:
    return "*".join(f"X{i}" for i in w)


def render_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    parts: List[str] = []
    for w, c in p.items():
        if p.field.is_rational:
            negative = c < 0
            mag = -c if negative else c
        else:
            negative = False
            mag = c
        if not w:
            body = str(mag)
        elif mag == 1:
            body = _render_word(w)
        else:
            body = f"{mag}*{_render_word(w)}"
        if not parts:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(parts)
