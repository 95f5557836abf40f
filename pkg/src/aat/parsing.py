"""Recursive-descent parser for the canonical polynomial syntax.

Grammar: integers and rationals (``3``, ``7/2``), ring identifiers, ``+ - * ^``
and parentheses.  ``^`` takes a nonnegative integer literal only; there is no
implicit multiplication.  The canonical printer in `rings` emits exactly this
syntax, so print -> parse round-trips.
"""

from __future__ import annotations

from fractions import Fraction

from .rings import MPoly, VarRing


class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


_OPS = set("+-*^()")


class _Token:
    __slots__ = ("kind", "value", "line", "column")

    def __init__(self, kind, value, line, column):
        self.kind = kind  # 'num', 'name', one of +-*^(), 'end'
        self.value = value
        self.line = line
        self.column = column


def _tokenize(text: str):
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch in _OPS:
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            start = i
            start_col = col
            while i < n and text[i].isdigit():
                i += 1
                col += 1
            numerator = int(text[start:i])
            value = Fraction(numerator)
            if i < n and text[i] == "/":
                j = i + 1
                if j < n and text[j].isdigit():
                    i = j
                    col += 1
                    dstart = i
                    while i < n and text[i].isdigit():
                        i += 1
                        col += 1
                    den = int(text[dstart:i])
                    if den == 0:
                        raise ParseError("zero denominator in rational literal", line, start_col)
                    value = Fraction(numerator, den)
                else:
                    raise ParseError("expected digits after '/' in rational literal", line, col)
            tokens.append(_Token("num", value, line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            start = i
            start_col = col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
                col += 1
            tokens.append(_Token("name", text[start:i], line, start_col))
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("end", None, line, col))
    return tokens


class _Parser:
    def __init__(self, tokens, ring: VarRing):
        self.tokens = tokens
        self.pos = 0
        self.ring = ring

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self, kind=None) -> _Token:
        tok = self.tokens[self.pos]
        if kind is not None and tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.value!r}", tok.line, tok.column)
        self.pos += 1
        return tok

    def parse(self) -> MPoly:
        p = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.value!r}", tok.line, tok.column)
        return p

    def expr(self) -> MPoly:
        sign = 1
        tok = self.peek()
        if tok.kind in ("+", "-"):
            self.take()
            sign = -1 if tok.kind == "-" else 1
        p = self.term()
        if sign < 0:
            p = -p
        while self.peek().kind in ("+", "-"):
            op = self.take().kind
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> MPoly:
        p = self.factor()
        while self.peek().kind == "*":
            self.take()
            p = p * self.factor()
        return p

    def factor(self) -> MPoly:
        p = self.base()
        if self.peek().kind == "^":
            self.take()
            tok = self.peek()
            if tok.kind != "num" or tok.value.denominator != 1:
                raise ParseError("exponent must be a nonnegative integer literal", tok.line, tok.column)
            self.take()
            p = p**tok.value.numerator
        return p

    def base(self) -> MPoly:
        tok = self.peek()
        if tok.kind == "num":
            self.take()
            return self.ring.const(tok.value)
        if tok.kind == "name":
            self.take()
            if tok.value not in self.ring.names:
                raise ParseError(f"unknown identifier {tok.value!r}", tok.line, tok.column)
            return self.ring.var(tok.value)
        if tok.kind == "(":
            self.take()
            p = self.expr()
            close = self.peek()
            if close.kind != ")":
                raise ParseError("expected ')'", close.line, close.column)
            self.take()
            return p
        raise ParseError(f"unexpected {tok.value!r}", tok.line, tok.column)


def parse_poly(text: str, ring: VarRing) -> MPoly:
    """Parse one polynomial in the given ring's alphabet."""
    return _Parser(_tokenize(text), ring).parse()
