"""Higher derivatives through the first-order relations.

Each relation P(z0; x1..xn) = 0 with z0 = df_k/du_p differentiates to

    d2f_k/du_p du_q = -(P_1 * df_1/du_q + ... + P_n * df_n/du_q) / P_0,

with P_i the partial of P by its i-th slot, everything evaluated from the
backend.  One more formal differentiation gives the third order.  The same
recursion powers the executable periodicity criterion: if two points share
values and first derivatives, their recursion-computed higher derivatives
agree, so the Taylor expansions coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import naming
from .ratfn import RatFn
from .rings import DomainError, PoleError, StructuralError

_SINGULAR_FLOOR = 1e-12


class RecursionSingular(DomainError):
    """The relation's z0-partial vanished at the evaluation point."""


class _Context:
    """Cached backend data and relation partials at one point u."""

    def __init__(self, relations, backend, u):
        self.backend = backend
        self.u = tuple(complex(c) for c in u)
        self.n = backend.n
        if backend.is_pole(self.u):
            raise PoleError(f"evaluation point on the pole set: {u}")
        self.x = backend.value(self.u)
        self.jac = backend.jacobian(self.u)
        self.rel = {}
        for rel in relations:
            self.rel[(rel.k, rel.p)] = rel
        if len(self.rel) != self.n * self.n:
            raise StructuralError("the recursion needs the full set of first-order relations")
        self._d2 = {}

    def bindings(self, k, p):
        rel = self.rel[(k, p)]
        values = {rel.zvar: self.jac[k - 1][p - 1]}
        for i in range(1, self.n + 1):
            values[naming.x(i)] = self.x[i - 1]
        return rel, values

    def partial(self, rel, values, slot):
        """slot 0 is the derivative slot; slot i >= 1 is x_i."""
        name = rel.zvar if slot == 0 else naming.x(slot)
        return rel.poly.diff(name).eval_numeric(values)

    def partial2(self, rel, values, s1, s2):
        n1 = rel.zvar if s1 == 0 else naming.x(s1)
        n2 = rel.zvar if s2 == 0 else naming.x(s2)
        return rel.poly.diff(n1).diff(n2).eval_numeric(values)

    def d2(self, k, p, q):
        key = (k, p, q)
        if key in self._d2:
            return self._d2[key]
        rel, values = self.bindings(k, p)
        p0 = self.partial(rel, values, 0)
        scale = 1 + max(abs(v) for v in values.values())
        if abs(p0) < _SINGULAR_FLOOR * scale:
            raise RecursionSingular(f"P_{k}{p},0 ~ 0 at u = {self.u}")
        acc = 0j
        for i in range(1, self.n + 1):
            acc += self.partial(rel, values, i) * self.jac[i - 1][q - 1]
        out = -acc / p0
        self._d2[key] = out
        return out

    def d3(self, k, p, q, r):
        rel, values = self.bindings(k, p)
        p0 = self.partial(rel, values, 0)
        scale = 1 + max(abs(v) for v in values.values())
        if abs(p0) < _SINGULAR_FLOOR * scale:
            raise RecursionSingular(f"P_{k}{p},0 ~ 0 at u = {self.u}")
        f_r = self.d2(k, p, r)

        def dslot(j):
            # d/du_r of P_j evaluated along u:
            # P_{j,0} * d2f_k/du_p du_r + sum_m P_{j,m} * z_{m r}
            out = self.partial2(rel, values, j, 0) * f_r
            for m in range(1, self.n + 1):
                out += self.partial2(rel, values, j, m) * self.jac[m - 1][r - 1]
            return out

        num = 0j
        den_rate = dslot(0)
        for i in range(1, self.n + 1):
            num += dslot(i) * self.jac[i - 1][q - 1]
            num += self.partial(rel, values, i) * self.d2(i, q, r)
        total = -(num * p0 - (-self.d2(k, p, q) * p0) * den_rate) / (p0 * p0)
        return total


def higher_derivative(relations, backend, k, p, q, u) -> complex:
    """Second derivative d2 f_k / du_p du_q at u via the relation recursion."""
    return _Context(relations, backend, u).d2(k, p, q)


def third_derivative(relations, backend, k, p, q, r, u) -> complex:
    """Third derivative d3 f_k / du_p du_q du_r via one more differentiation."""
    return _Context(relations, backend, u).d3(k, p, q, r)


def symbolic_second_derivative(rel) -> RatFn:
    """The second derivative of a one-variable mapping as a rational function
    of (z, x): -P_1(x) * z / P_0(z, x), normalized."""
    poly = rel.poly
    zv = rel.zvar
    p0 = poly.diff(zv)
    p1 = poly.diff(naming.x(1))
    z = poly.ring.var(zv)
    return RatFn(-p1 * z, p0)


@dataclass
class TaylorCheck:
    applicable: bool
    matched: bool | None
    detail: str

    def to_json(self):
        return {"applicable": self.applicable, "matched": self.matched, "detail": self.detail}


def taylor_match_check(relations, backend, a, b, *, order: int = 3, tol: float = 1e-8) -> TaylorCheck:
    """Executable periodicity content: when the mapping values and first
    derivatives agree at a and b, the recursion forces every higher derivative
    to agree, so the local expansions are identical."""
    if order < 2 or order > 3:
        raise DomainError("supported orders are 2 and 3")
    a = tuple(complex(c) for c in a)
    b = tuple(complex(c) for c in b)
    n = backend.n
    try:
        va, vb = backend.value(a), backend.value(b)
        ja, jb = backend.jacobian(a), backend.jacobian(b)
    except PoleError:
        return TaylorCheck(False, None, "pole at a witness point")
    for ca, cb in zip(va, vb):
        if abs(ca - cb) > tol * (1 + abs(ca)):
            return TaylorCheck(False, None, "mapping values differ at a and b")
    for ra, rb in zip(ja, jb):
        for ca, cb in zip(ra, rb):
            if abs(ca - cb) > tol * (1 + abs(ca)):
                return TaylorCheck(False, None, "first derivatives differ at a and b")
    try:
        ctx_a = _Context(relations, backend, a)
        ctx_b = _Context(relations, backend, b)
        for k in range(1, n + 1):
            for p in range(1, n + 1):
                for q in range(1, n + 1):
                    da = ctx_a.d2(k, p, q)
                    db = ctx_b.d2(k, p, q)
                    if abs(da - db) > tol * (1 + abs(da)):
                        return TaylorCheck(True, False, f"order-2 mismatch at (k,p,q)=({k},{p},{q})")
                    if order >= 3:
                        for r in range(1, n + 1):
                            ta = ctx_a.d3(k, p, q, r)
                            tb = ctx_b.d3(k, p, q, r)
                            if abs(ta - tb) > tol * (1 + abs(ta)):
                                return TaylorCheck(
                                    True, False, f"order-3 mismatch at ({k},{p},{q},{r})"
                                )
    except RecursionSingular as err:
        return TaylorCheck(False, None, f"recursion singular: {err}")
    return TaylorCheck(True, True, f"derivatives agree through order {order}")
