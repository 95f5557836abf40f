"""Negation relations, the rational addition formula, and the group law.

For one-component mappings whose addition polynomial has degree one or two in
the value slot, the addition theorem resolves into honest rational functions
R_0, R_1 of (theta, x) at u and at v: the degree-two case checks that the
discriminant is a perfect square of the form (s*x0*y0 + t) over the variety
and fixes the root branch against the backend.  Points on the variety add and
subtract through their u-parameters (always) or through the formula (when one
was resolved), and the negation relations come from pinning the value slot of
the addition polynomial at u + v = 0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import naming
from .euclid import factor_candidates, poly_sqrt, resultant, squarefree_in
from .ratfn import RatFn
from .rings import DomainError, MPoly, PoleError, StructuralError, VarRing, rename, transport
from .sampling import draw_point, vanishes
from .variety import VarietySpec

_INF = None  # infinity marker for point coordinates


@dataclass
class VarietyPoint:
    theta: complex | None
    x: tuple
    u: tuple | None = None

    def is_finite(self) -> bool:
        return self.theta is not None and all(c is not None for c in self.x)

    def close_to(self, other: "VarietyPoint", tol: float = 1e-8) -> bool:
        pairs = [(self.theta, other.theta), *zip(self.x, other.x)]
        for a, b in pairs:
            if (a is None) != (b is None):
                return False
            if a is not None and abs(a - b) > tol * (1 + abs(a) + abs(b)):
                return False
        return True


@dataclass
class NegationRelation:
    D: list  # per component: MPoly or None
    E: list  # per component: MPoly (in the (x, y_k) presentation ring) or None
    modes: list
    notes: list = field(default_factory=list)


@dataclass
class AdditionFormula:
    R: list  # R[0] = theta slot, R[k] = component k; RatFn in the formula ring
    excluded: list  # divisor polynomials that the formula cannot cross
    branch: int
    degrees: dict

    def excluded_hit(self, values: dict, tol: float = 1e-9) -> bool:
        for d in self.excluded:
            if abs(d.eval_numeric(values)) < tol:
                return True
        return False


@dataclass
class ResolveOutcome:
    status: str  # "resolved" | "unresolved"
    formula: AdditionFormula | None
    reason: str = ""


class DivisorDegeneracyError(DomainError):
    """Formula-mode addition hit the excluded divisor."""


# -- negation ---------------------------------------------------------------------


def derive_negation(sys, backend, *, seed: int = 0, tol: float = 1e-7) -> NegationRelation:
    """Relations D_k(x; y) = 0 binding the values at u and at -u, and their
    one-y-slot consequences E_k(y_k; x).

    When f_k(0) is finite the value slot of G_k is pinned to it; at a pole the
    value escapes to infinity, so the leading value-slot coefficient must
    vanish instead (the projective reading of the same substitution).
    """
    n = sys.n
    zero_vals = backend.values_at_zero()
    D = []
    modes = []
    notes = []
    for k in range(1, n + 1):
        g = sys.poly(k)
        lvar = naming.L(k)
        if zero_vals[k - 1] is not None:
            d = g.subs_exact({lvar: zero_vals[k - 1]}).normalized()
            mode = f"value-at-zero ({zero_vals[k - 1]})"
        else:
            d = g.leading_coeff_in(lvar).normalized()
            mode = "pole-leading-coefficient"
        if d.is_zero() or d.is_constant():
            D.append(None)
            modes.append(mode)
            notes.append(f"component {k}: degenerate substitution ({mode})")
            continue
        if not vanishes(d, backend, seed=naming.stage_seed(seed, f"negD{k}"), tol=tol, y_mode="neg"):
            D.append(None)
            modes.append(mode)
            notes.append(f"component {k}: relation failed numeric vetting ({mode})")
            continue
        D.append(d)
        modes.append(mode)
    E = []
    for k in range(1, n + 1):
        e = _negation_consequence(sys, backend, D, k, seed=seed, tol=tol)
        if e is None:
            notes.append(f"component {k}: no usable one-slot negation relation")
        E.append(e)
    return NegationRelation(D=D, E=E, modes=modes, notes=notes)


def _negation_consequence(sys, backend, D, k, *, seed, tol):
    yk = naming.y(k)
    pool = [d for d in D if d is not None]
    cands = [d for d in pool if d.degree_in(yk) > 0]
    if not cands:
        return None
    r = min(cands, key=lambda q: (q.total_degree(), len(q.terms)))
    for j in range(1, sys.n + 1):
        if j == k:
            continue
        vj = naming.y(j)
        if r.degree_in(vj) <= 0:
            continue
        partners = [d for d in pool if d is not r and d.degree_in(vj) > 0]
        if not partners:
            return None
        r = resultant(r, partners[0], vj).normalized()
        if r.is_zero():
            return None
    best = None
    for i, cand in enumerate(factor_candidates(r)):
        if cand.degree_in(yk) < 1:
            continue
        if vanishes(cand, backend, seed=naming.stage_seed(seed, f"negE{k}:{i}"), tol=tol, y_mode="neg"):
            best = cand
            break
    if best is None:
        return None
    ring = naming.negation_ring(sys.n, k, sys.ring.parameters)
    return transport(best, ring).normalized()


# -- the rational addition formula ---------------------------------------------------


def resolve_addition(sys, spec: VarietySpec, backend, *, seed: int = 0, tol: float = 1e-8) -> ResolveOutcome:
    """Solve the addition polynomial for the value at u+v as a rational function
    on the variety (one component, value-slot degree one or two)."""
    if sys.n != 1:
        return ResolveOutcome("unresolved", None, "symbolic resolution is limited to one component")
    g = sys.poly(1)
    lvar = naming.L(1)
    deg = g.degree_in(lvar)
    if deg not in (1, 2):
        return ResolveOutcome("unresolved", None, f"value-slot degree {deg} not in (1, 2)")
    fring = naming.formula_ring(1, sys.ring.parameters)
    coeffs = {d: transport(c, fring) for d, c in g.coeffs_in(lvar).items()}
    a = coeffs.get(deg, fring.zero())
    b = coeffs.get(deg - 1, fring.zero()) if deg == 2 else coeffs.get(0, fring.zero())
    if deg == 1:
        r1 = RatFn(-b, a)
        formula = _finish_formula(spec, fring, r1, branch=0)
        ok, reason = _verify_formula(formula, spec, backend, seed=seed, tol=tol)
        if not ok:
            return ResolveOutcome("unresolved", None, reason)
        return ResolveOutcome("resolved", formula)
    c = coeffs.get(0, fring.zero())
    disc = b * b - a * c.scale(4)  # exact scale matters: R1 = (-b +- sqrt(disc))/(2a)
    root = _discriminant_root(disc, spec, fring)
    if root is None:
        return ResolveOutcome(
            "unresolved", None, "unresolved: extension degree > 1 ansatz insufficient"
        )
    for branch in (1, -1):
        r1 = RatFn(-b + root.scale(branch), a.scale(2))
        formula = _finish_formula(spec, fring, r1, branch=branch)
        ok, reason = _verify_formula(formula, spec, backend, seed=seed, tol=tol)
        if ok:
            return ResolveOutcome("resolved", formula)
    return ResolveOutcome("unresolved", None, f"no root branch matched the backend: {reason}")


def _variety_coeffs(spec: VarietySpec):
    v = spec.V
    by_deg = v.coeffs_in(naming.THETA)
    return {d: c for d, c in by_deg.items() if not c.is_zero()}


def _discriminant_root(disc: MPoly, spec: VarietySpec, fring: VarRing):
    """Square root of the discriminant in the ansatz shape s*x0*y0 + t.

    The discriminant has no theta slots, so the cross term forces s*t = 0:
    either it is a perfect square t^2 outright, or s^2 * W(x1) * W(y1) where
    W is the square of the theta slot on the variety.
    """
    t = poly_sqrt(disc)
    if t is not None:
        return t
    if spec.h != 2:
        return None
    vc = _variety_coeffs(spec)
    if 1 in vc:  # theta-linear term breaks the odd/even split the ansatz needs
        return None
    lead = vc.get(2)
    low = vc.get(0)
    if lead is None or low is None or not lead.is_constant():
        return None
    # theta^2 = W(x) on the variety
    w_x = rename(low.scale(-1 / lead.constant_value()), {naming.THETA: "x0"}, fring)
    w_y = rename(w_x, {naming.x(1): naming.y(1)}, fring)
    quotient = RatFn(disc, w_x * w_y)
    s_num = poly_sqrt(quotient.num)
    s_den = poly_sqrt(quotient.den)
    if s_num is None or s_den is None:
        return None
    s = RatFn(s_num, s_den)
    if not s.is_poly():
        return None
    # keep the exact scale: sqrt(disc) = s * x0 * y0 on the variety
    return s.as_poly() * fring.var("x0") * fring.var("y0")


def _finish_formula(spec: VarietySpec, fring: VarRing, r1: RatFn, *, branch: int) -> AdditionFormula:
    r1 = _reduce_formula(r1, spec, fring)
    r0 = _theta_slot_formula(spec, fring, r1)
    excluded = _excluded_divisors(r1)
    degrees = {
        "r1_num_total": r1.num.total_degree(),
        "r1_den_total": r1.den.total_degree(),
    }
    return AdditionFormula(R=[r0, r1], excluded=excluded, branch=branch, degrees=degrees)


def _theta_slot_formula(spec: VarietySpec, fring: VarRing, r1: RatFn) -> RatFn:
    """theta(u+v) by formal differentiation of the value formula along u.

    With theta = alpha * f'(u), the chain rule gives
        theta(u+v) = alpha * (R1_x0 * theta'(u) + R1_x1 * f'(u)),
    the variety relation turns theta' into -V_x * f' / V_theta, and
    alpha * f'(u) is theta(u) itself, so the weight cancels:
        R0 = x0 * (R1_x1 - R1_x0 * V_x / V_theta).
    """
    to_f = {naming.THETA: "x0"}
    v_theta = rename(spec.V.diff(naming.THETA), to_f, fring)
    v_x = rename(spec.V.diff(naming.x(1)), to_f, fring)
    dlog = -RatFn(v_x) / RatFn(v_theta)
    r0 = (r1.diff("x0") * dlog + r1.diff(naming.x(1))) * RatFn(fring.var("x0"))
    return _reduce_formula(r0, spec, fring)


def _reduce_formula(r: RatFn, spec: VarietySpec, fring: VarRing) -> RatFn:
    num = _fold_theta_powers(r.num, spec, fring)
    den = _fold_theta_powers(r.den, spec, fring)
    if den.is_zero():
        return r
    return RatFn(num, den)


def _fold_theta_powers(p: MPoly, spec: VarietySpec, fring: VarRing) -> MPoly:
    """Rewrite powers x0^h and y0^h using the variety polynomial (monic leads only)."""
    vc = _variety_coeffs(spec)
    lead = vc.get(spec.h)
    if lead is None or not lead.is_constant():
        return p
    scale = -1 / lead.constant_value()
    for slot, xname in (("x0", naming.x(1)), ("y0", naming.y(1))):
        tail = {
            d: rename(c.scale(scale), {naming.THETA: slot, naming.x(1): xname}, fring)
            for d, c in vc.items()
            if d < spec.h
        }
        while p.degree_in(slot) >= spec.h:
            dmax = p.degree_in(slot)
            top = p.coeff_of(slot, dmax)
            # x0^dmax = x0^(dmax-h) * sum tail[d] x0^d
            rest = p - top * fring.var(slot) ** dmax
            fold = fring.zero()
            for d, c in tail.items():
                fold = fold + c * fring.var(slot) ** (dmax - spec.h + d)
            p = rest + top * fold
    return p


def _excluded_divisors(r1: RatFn) -> list:
    den = r1.den
    if den.is_constant():
        return []
    sf = den
    for v in den.variables_present():
        if sf.degree_in(v) >= 2:
            sf = squarefree_in(sf, v)
    return [sf.normalized()]


def _verify_formula(formula: AdditionFormula, spec: VarietySpec, backend, *, seed, tol, samples=20):
    rng = random.Random(naming.stage_seed(seed, "formula-verify"))
    box = backend.default_box()
    good = 0
    tried = 0
    reason = ""
    while tried < samples:
        u = draw_point(rng, backend.n, box)
        v = draw_point(rng, backend.n, box)
        try:
            values = _formula_bindings(spec, backend, u, v)
            if formula.excluded_hit(values, tol=1e-6):
                continue
            got = formula.R[1].eval_numeric(values)
            want = backend.value(tuple(a + b for a, b in zip(u, v)))[0]
        except PoleError:
            continue
        tried += 1
        if abs(got - want) <= tol * (1 + abs(want)):
            good += 1
        else:
            reason = f"|formula - backend| = {abs(got - want):.3e} at sample {tried}"
    if tried == 0:
        return False, "no usable verification samples"
    return good >= max(1, int(0.9 * tried)), reason or f"{good}/{tried} samples matched"


def _formula_bindings(spec: VarietySpec, backend, u, v) -> dict:
    alpha = spec.alpha
    n = backend.n
    ju = backend.jacobian(u)
    jv = backend.jacobian(v)
    xu = backend.value(u)
    yv = backend.value(v)
    values = {
        "x0": sum(complex(alpha[k][p]) * ju[k][p] for k in range(n) for p in range(n)),
        "y0": sum(complex(alpha[k][p]) * jv[k][p] for k in range(n) for p in range(n)),
    }
    for i in range(1, n + 1):
        values[naming.x(i)] = xu[i - 1]
        values[naming.y(i)] = yv[i - 1]
    return values


# -- points and the group operations ------------------------------------------------


_BIG = 1e8


def backend_point(backend, spec: VarietySpec, u) -> VarietyPoint:
    """The variety point over the parameter value u, with infinity markers."""
    u = tuple(complex(c) for c in u)
    try:
        if backend.is_pole(u):
            raise PoleError("pole")
        vals = backend.value(u)
        jac = backend.jacobian(u)
    except PoleError:
        return VarietyPoint(theta=_INF, x=(_INF,) * backend.n, u=u)
    n = backend.n
    theta = sum(complex(spec.alpha[k][p]) * jac[k][p] for k in range(n) for p in range(n))
    xs = tuple(c if abs(c) < _BIG else _INF for c in vals)
    if abs(theta) >= _BIG:
        theta = _INF
    return VarietyPoint(theta=theta, x=xs, u=u)


def point_add(
    p1: VarietyPoint,
    p2: VarietyPoint,
    *,
    backend=None,
    spec: VarietySpec | None = None,
    formula: AdditionFormula | None = None,
) -> VarietyPoint:
    """Group addition: via u-parameters (backend mode) or via the resolved
    rational formula (formula mode)."""
    if formula is not None:
        if not (p1.is_finite() and p2.is_finite()):
            raise DivisorDegeneracyError("formula mode needs finite points")
        values = {"x0": p1.theta, "y0": p2.theta}
        for i, c in enumerate(p1.x, start=1):
            values[naming.x(i)] = c
        for i, c in enumerate(p2.x, start=1):
            values[naming.y(i)] = c
        if formula.excluded_hit(values, tol=1e-9):
            raise DivisorDegeneracyError("excluded divisor hit")
        theta = formula.R[0].eval_numeric(values)
        xs = tuple(r.eval_numeric(values) for r in formula.R[1:])
        return VarietyPoint(theta=theta, x=xs, u=None)
    if backend is None or spec is None:
        raise StructuralError("backend mode needs the backend and the variety spec")
    if p1.u is None or p2.u is None:
        raise StructuralError("backend mode needs points that carry u parameters")
    u = tuple(a + b for a, b in zip(p1.u, p2.u))
    return backend_point(backend, spec, u)


def point_sub(p1: VarietyPoint, p2: VarietyPoint, *, backend, spec: VarietySpec) -> VarietyPoint:
    if p1.u is None or p2.u is None:
        raise StructuralError("subtraction works through u parameters")
    u = tuple(a - b for a, b in zip(p1.u, p2.u))
    return backend_point(backend, spec, u)


def variety_residual(spec: VarietySpec, point: VarietyPoint) -> float:
    """Scaled residual |V(theta; x)| at a finite point."""
    if not point.is_finite():
        raise DomainError("residual needs a finite point")
    values = {naming.THETA: point.theta}
    for i, c in enumerate(point.x, start=1):
        values[naming.x(i)] = c
    total, biggest = spec.V.eval_terms(values)
    return abs(total) / (1.0 + biggest)


def uniqueness_witness(backend, spec: VarietySpec, period, *, seed=0, tol=1e-8, shifts=5):
    """Two distinct parameters with the same variety point stay indistinguishable
    under arbitrary shifts: the executable content of formula-mode soundness."""
    rng = random.Random(naming.stage_seed(seed, "uniqueness"))
    box = backend.default_box()
    for _ in range(60):
        u1 = draw_point(rng, backend.n, box)
        u2 = tuple(a + b for a, b in zip(u1, period))
        if backend.is_pole(u1) or backend.is_pole(u2):
            continue
        pt1 = backend_point(backend, spec, u1)
        pt2 = backend_point(backend, spec, u2)
        if not (pt1.is_finite() and pt2.is_finite() and pt1.close_to(pt2, tol)):
            continue
        for _ in range(shifts):
            b = draw_point(rng, backend.n, box)
            w1 = tuple(a + c for a, c in zip(u1, b))
            w2 = tuple(a + c for a, c in zip(u2, b))
            if backend.is_pole(w1) or backend.is_pole(w2):
                continue
            f1 = backend.value(w1)
            f2 = backend.value(w2)
            for c1, c2 in zip(f1, f2):
                if abs(c1 - c2) > tol * (1 + abs(c1)):
                    return False
        return True
    raise StructuralError("no usable witness pair found")
