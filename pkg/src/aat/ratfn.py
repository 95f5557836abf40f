"""Rational functions (quotients of MPoly) and the generic substitution op."""

from __future__ import annotations

from fractions import Fraction
from numbers import Complex
from typing import Mapping, Union

from . import euclid
from .rings import DomainError, MPoly, PoleError, StructuralError, VarRing, _check_same_ring

POLE_FLOOR = 1e-300  # numeric denominators below this magnitude signal a pole


class RatFn:
    """Quotient of two polynomials, kept normalized.

    Invariants: the denominator is not identically zero, gcd(num, den) = 1,
    and the denominator's canonical leading coefficient is 1.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly | None = None):
        if den is None:
            den = num.ring.one()
        _check_same_ring(num, den)
        if den.is_zero():
            raise DomainError("rational function with zero denominator")
        if num.is_zero():
            den = num.ring.one()
        else:
            g = euclid.gcd(num, den)
            if not g.is_constant():
                num = euclid.exact_div(num, g)
                den = euclid.exact_div(den, g)
            _, lead = den.leading()
            if lead != 1:
                num = num.scale(1 / lead)
                den = den.scale(1 / lead)
        self.num = num
        self.den = den

    @property
    def ring(self) -> VarRing:
        return self.num.ring

    @classmethod
    def const(cls, ring: VarRing, c) -> "RatFn":
        return cls(ring.const(c))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> MPoly:
        if not self.is_poly():
            raise DomainError(f"not a polynomial: {self}")
        return self.num.scale(1 / self.den.constant_value())

    def _coerce(self, other) -> "RatFn":
        if isinstance(other, RatFn):
            return other
        if isinstance(other, MPoly):
            return RatFn(other)
        if isinstance(other, (int, Fraction)):
            return RatFn(self.ring.const(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        return RatFn(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        other = self._coerce(other)
        return RatFn(self.num * other.den - other.num * self.den, self.den * other.den)

    def __mul__(self, other):
        other = self._coerce(other)
        return RatFn(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.num.is_zero():
            raise DomainError("division by the zero rational function")
        return RatFn(self.num * other.den, self.den * other.num)

    def __neg__(self):
        return RatFn(-self.num, self.den)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise DomainError("rational function power must be an integer")
        if n < 0:
            return RatFn(self.den, self.num) ** (-n)
        return RatFn(self.num**n, self.den**n)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, MPoly)):
            other = self._coerce(other)
        return isinstance(other, RatFn) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def diff(self, name: str) -> "RatFn":
        """Formal partial derivative (quotient rule)."""
        return RatFn(
            self.num.diff(name) * self.den - self.num * self.den.diff(name),
            self.den * self.den,
        )

    def eval_numeric(self, values: Mapping[str, complex]) -> complex:
        den = self.den.eval_numeric(values)
        if abs(den) < POLE_FLOOR:
            raise PoleError(f"denominator vanished numerically: {self.den}")
        return self.num.eval_numeric(values) / den

    def __str__(self) -> str:
        if self.is_poly():
            return str(self.as_poly())
        num = str(self.num)
        den = str(self.den)
        num_s = num if _is_atomic(num) else f"({num})"
        den_s = den if _is_atomic(den) else f"({den})"
        return f"{num_s}/{den_s}"

    def __repr__(self) -> str:
        return f"RatFn({self})"


def _is_atomic(text: str) -> bool:
    return not any(op in text for op in (" + ", " - ")) and not text.startswith("-")


SubsValue = Union[int, Fraction, MPoly, RatFn, float, complex]


def substitute(p: MPoly, bindings: Mapping[str, SubsValue]):
    """Substitute values for variables: symbolic bindings give a RatFn,
    numeric bindings give a complex value.

    Symbolic mode accepts rationals, polynomials and rational functions and
    may bind any subset of the variables.  Numeric mode is triggered by any
    float/complex value; it then requires every name appearing in p
    (parameters included) to be bound.
    """
    numeric = any(isinstance(v, Complex) and not isinstance(v, (int, Fraction)) for v in bindings.values())
    if numeric:
        values = {}
        for name, v in bindings.items():
            p.ring.index(name)
            if isinstance(v, (MPoly, RatFn)):
                raise StructuralError("cannot mix numeric and symbolic bindings")
            values[name] = complex(v)
        return p.eval_numeric(values)
    return substitute_symbolic(p, bindings)


def substitute_symbolic(p: MPoly, bindings: Mapping[str, SubsValue]) -> RatFn:
    ring = p.ring
    vals: dict = {}
    for name, v in bindings.items():
        i = ring.index(name)
        if isinstance(v, RatFn):
            _check_same_ring(v.num, p)
            vals[i] = v
        elif isinstance(v, MPoly):
            _check_same_ring(v, p)
            vals[i] = RatFn(v)
        else:
            vals[i] = RatFn(ring.const(v))
    out = RatFn(ring.zero())
    pow_cache: dict = {}
    for exps, c in p.terms.items():
        rest = list(exps)
        factor = RatFn(ring.const(c))
        for i, v in vals.items():
            e = exps[i]
            rest[i] = 0
            if e:
                key = (i, e)
                if key not in pow_cache:
                    pow_cache[key] = v**e
                factor = factor * pow_cache[key]
        out = out + factor * MPoly(ring, {tuple(rest): Fraction(1)})
    return out


def ratfn_subs(r: RatFn, bindings: Mapping[str, SubsValue]) -> RatFn:
    """Symbolic substitution into a rational function."""
    num = substitute_symbolic(r.num, bindings)
    den = substitute_symbolic(r.den, bindings)
    if den.is_zero():
        raise DomainError("substitution made the denominator vanish identically")
    return num / den
