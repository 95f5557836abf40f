"""Built-in addition-theorem polynomials, including exact generation for the
Weierstrass-based families.

The Weierstrass addition polynomial is never written down by hand: it is
produced by eliminating the two derivative slots from the classical addition
relation combined with the curve equation at u and at v, then picking the
factor that actually vanishes on backend samples.  The same chain produces
the second component polynomial of the zeta-drift family.
"""

from __future__ import annotations

from fractions import Fraction

from . import naming
from .euclid import factor_candidates, resultant
from .parsing import parse_poly
from .rings import MPoly, StructuralError, VarRing, transport
from .sampling import vanishes


def _curve_rhs(ring: VarRing, var: str, g2: Fraction, g3: Fraction) -> MPoly:
    t = ring.var(var)
    return 4 * t**3 - ring.const(g2) * t - ring.const(g3)


def _select_vanishing(cands, backend, lvar, *, seed, require_positive_degree=True):
    for cand in cands:
        if require_positive_degree and cand.degree_in(lvar) <= 0:
            continue
        if vanishes(cand, backend, seed=seed, tol=1e-7):
            return cand.normalized()
    return None


def weierstrass_addition_poly(g2: Fraction, g3: Fraction, backend, *, seed: int = 0) -> MPoly:
    """Addition polynomial G(L1; x1, y1) for the p-function with given invariants.

    Derived by eliminating tx = p'(u), ty = p'(v) from
        4*(x1-y1)^2*(L1 + x1 + y1) = (tx - ty)^2,
        tx^2 = 4*x1^3 - g2*x1 - g3,   ty^2 = 4*y1^3 - g2*y1 - g3.
    """
    scratch = VarRing(("L1", "x1", "y1", "tx", "ty"))
    L1, x1, y1 = scratch.var("L1"), scratch.var("x1"), scratch.var("y1")
    tx, ty = scratch.var("tx"), scratch.var("ty")
    a = tx**2 - _curve_rhs(scratch, "x1", g2, g3)
    b = ty**2 - _curve_rhs(scratch, "y1", g2, g3)
    c = 4 * (x1 - y1) ** 2 * (L1 + x1 + y1) - (tx - ty) ** 2
    r1 = resultant(c, a, "tx")
    r2 = resultant(r1, b, "ty").normalized()
    g = _select_vanishing(factor_candidates(r2), backend, "L1", seed=naming.stage_seed(seed, "gen-wp"))
    if g is None:
        raise StructuralError("no vanishing factor found for the p addition polynomial")
    return g


def zeta_drift_addition_poly(g2: Fraction, g3: Fraction, backend, *, seed: int = 0) -> MPoly:
    """Addition polynomial G(L2; x1, x2, y1, y2) for f2 = u2 - zeta(u1).

    f2 adds up to the quotient term of the zeta addition formula:
        2*(x1-y1)*(L2 - x2 - y2) + tx - ty = 0
    and the derivative slots are eliminated against the curve equations.
    """
    scratch = VarRing(("L2", "x1", "x2", "y1", "y2", "tx", "ty"))
    L2 = scratch.var("L2")
    x1, x2 = scratch.var("x1"), scratch.var("x2")
    y1, y2 = scratch.var("y1"), scratch.var("y2")
    tx, ty = scratch.var("tx"), scratch.var("ty")
    a = tx**2 - _curve_rhs(scratch, "x1", g2, g3)
    b = ty**2 - _curve_rhs(scratch, "y1", g2, g3)
    c = 2 * (x1 - y1) * (L2 - x2 - y2) + tx - ty
    r1 = resultant(c, a, "tx")
    r2 = resultant(r1, b, "ty").normalized()
    g = _select_vanishing(factor_candidates(r2), backend, "L2", seed=naming.stage_seed(seed, "gen-zeta"))
    if g is None:
        raise StructuralError("no vanishing factor found for the zeta-drift addition polynomial")
    return g


def default_aat_texts(family: str, n: int):
    """Fixed addition polynomials for the families that have closed textual G."""
    if family == "exp" and n == 1:
        return ["L1 - x1*y1"]
    if family == "rational" and n == 1:
        return ["L1 - x1 - y1"]
    if family == "singular2-case1" and n == 2:
        return ["L1 - x1 - y1", "L2 - x2 - y2"]
    if family == "singular2-case2" and n == 2:
        return ["L1 - x1 - y1", "L2 - x2*y2"]
    if family == "singular2-case3" and n == 2:
        return ["L1 - x1*y1", "L2 - x2*y2"]
    return None


def build_auto_aat(family: str, n: int, ring: VarRing, backend, params: dict, *, seed: int = 0):
    """Materialize `G = auto` for a built-in family, in the problem's big ring."""
    texts = default_aat_texts(family, n)
    if texts is not None:
        return [parse_poly(t, ring) for t in texts]
    if family == "weierstrass" and n == 1:
        g = weierstrass_addition_poly(params["g2"], params["g3"], backend, seed=seed)
        return [transport(g, ring)]
    if family == "singular2-case4" and n == 2:
        g1 = weierstrass_addition_poly(params["g2"], params["g3"], backend, seed=seed)
        # the p-component polynomial lives in (L1, x1, y1) already
        out = [transport(g1, ring)]
        if int(params.get("epsilon", 1)) == 1:
            g2poly = zeta_drift_addition_poly(params["g2"], params["g3"], backend, seed=seed)
        else:
            g2poly = parse_poly("L2 - x2 - y2", ring)
            return [out[0], g2poly]
        return [out[0], transport(g2poly, ring)]
    raise StructuralError(f"no automatic addition polynomials for family {family!r} with n={n}")
