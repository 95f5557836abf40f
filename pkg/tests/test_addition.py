import cmath
import random
from fractions import Fraction

import pytest

from aat import naming
from aat.addition import (
    DivisorDegeneracyError,
    backend_point,
    derive_negation,
    point_add,
    point_sub,
    resolve_addition,
    uniqueness_witness,
    variety_residual,
)
from aat.backends import make_backend
from aat.elimination import AATSystem, derive_first_order
from aat.generate import build_auto_aat
from aat.parsing import parse_poly
from aat.ratfn import RatFn
from aat.sampling import residual_check
from aat.variety import QuotientContext, VarietySpec, find_primitive_element


@pytest.fixture(scope="module")
def exp_ctx():
    ring = naming.problem_ring(1)
    sys = AATSystem(n=1, ring=ring, polys=[parse_poly("L1 - x1*y1", ring)])
    backend = make_backend("exp", {"c": Fraction(1)})
    relations, _ = derive_first_order(sys, backend, seed=42)
    spec = find_primitive_element(relations, backend, seed=1)
    return sys, backend, relations, spec


@pytest.fixture(scope="module")
def wp_ctx():
    backend = make_backend("weierstrass", {"g2": Fraction(4), "g3": Fraction(0)})
    ring = naming.problem_ring(1)
    polys = build_auto_aat("weierstrass", 1, ring, backend, {"g2": Fraction(4), "g3": Fraction(0)}, seed=0)
    sys = AATSystem(n=1, ring=ring, polys=polys)
    relations, _ = derive_first_order(sys, backend, seed=42)
    spec = find_primitive_element(relations, backend, seed=1)
    return sys, backend, relations, spec


# -- negation -----------------------------------------------------------------


def test_negation_exp(exp_ctx):
    sys, backend, _, _ = exp_ctx
    neg = derive_negation(sys, backend, seed=7)
    assert neg.modes[0].startswith("value-at-zero")
    assert str(neg.E[0]) == "x1*y1 - 1"
    rep = residual_check(
        neg.E[0], backend, relation_id="E1", samples=100, seed=8, tol=1e-9, y_mode="neg"
    )
    assert rep.ok


def test_negation_additive():
    ring = naming.problem_ring(1)
    sys = AATSystem(n=1, ring=ring, polys=[parse_poly("L1 - x1 - y1", ring)])
    backend = make_backend("rational", {})
    neg = derive_negation(sys, backend, seed=7)
    assert str(neg.E[0]) == "x1 + y1"


def test_negation_weierstrass_pole_mode(wp_ctx):
    sys, backend, _, _ = wp_ctx
    neg = derive_negation(sys, backend, seed=7)
    assert neg.modes[0] == "pole-leading-coefficient"
    assert str(neg.E[0]) == "x1 - y1"  # evenness, derived not assumed
    rep = residual_check(
        neg.E[0], backend, relation_id="E1", samples=100, seed=9, tol=1e-9, y_mode="neg"
    )
    assert rep.ok


# -- resolution ----------------------------------------------------------------


def test_resolve_exp(exp_ctx):
    sys, backend, _, spec = exp_ctx
    out = resolve_addition(sys, spec, backend, seed=3)
    assert out.status == "resolved"
    fring = out.formula.R[1].ring
    assert out.formula.R[1] == RatFn(fring.var("x1") * fring.var("y1"))
    assert out.formula.R[0] == RatFn(fring.var("x1") * fring.var("y1"))
    assert out.formula.excluded == []


def test_resolve_weierstrass_matches_classical(wp_ctx):
    sys, backend, _, spec = wp_ctx
    out = resolve_addition(sys, spec, backend, seed=3)
    assert out.status == "resolved"
    r1 = out.formula.R[1]
    fring = r1.ring
    # classical form: -x - y + ((tx - ty)/(2(x - y)))^2, reduced onto the variety
    x0, y0 = fring.var("x0"), fring.var("y0")
    x1, y1 = fring.var("x1"), fring.var("y1")
    num = (x0 - y0) ** 2 - (x1 + y1).scale(4) * (x1 - y1) ** 2
    classical = RatFn(num, (x1 - y1).scale(2) ** 2)
    lat = backend.lattice
    rng = random.Random(5)
    agree = 0
    for _ in range(40):
        u = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        v = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        if lat.lattice_distance(u) < 0.2 or lat.lattice_distance(v) < 0.2:
            continue
        if lat.lattice_distance(u + v) < 0.2 or abs(lat.wp(u) - lat.wp(v)) < 1e-3:
            continue
        vals = {
            "x0": lat.wp_prime(u), "x1": lat.wp(u),
            "y0": lat.wp_prime(v), "y1": lat.wp(v),
        }
        want = lat.wp(u + v)
        got = r1.eval_numeric(vals)
        cls = classical.eval_numeric(vals)
        assert abs(cls - want) < 1e-8 * (1 + abs(want))
        assert abs(got - want) < 1e-8 * (1 + abs(want))
        agree += 1
    assert agree >= 25
    # excluded divisor is the coincidence locus x1 = y1
    assert [str(d) for d in out.formula.excluded] == ["x1 - y1"]


def test_resolve_rejects_non_square_discriminant(exp_ctx):
    _, backend, _, _ = exp_ctx
    ring = naming.problem_ring(1)
    sys = AATSystem(n=1, ring=ring, polys=[parse_poly("L1^2 - x1 - y1", ring)])
    vring = naming.variety_ring(1)
    v = parse_poly("theta^2 - x1", vring)
    qc = QuotientContext(v, 1)
    spec = VarietySpec(alpha=((1,),), V=v, h=2, qc=qc, reps={(1, 1): qc.theta()}, degree_bound=2)
    out = resolve_addition(sys, spec, backend, seed=3)
    assert out.status == "unresolved"
    assert "ansatz insufficient" in out.reason


def test_theta_slot_formula_with_scaled_weight(wp_ctx):
    sys, backend, relations, _ = wp_ctx
    spec2 = find_primitive_element(relations, backend, seed=1, alpha_override=((2,),))
    out = resolve_addition(sys, spec2, backend, seed=3)
    assert out.status == "resolved"
    lat = backend.lattice
    rng = random.Random(8)
    checked = 0
    for _ in range(120):
        u = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        v = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        if min(lat.lattice_distance(w) for w in (u, v, u + v)) < 0.25:
            continue
        if abs(lat.wp(u) - lat.wp(v)) < 1e-3:
            continue
        vals = {
            "x0": 2 * lat.wp_prime(u), "x1": lat.wp(u),
            "y0": 2 * lat.wp_prime(v), "y1": lat.wp(v),
        }
        want = 2 * lat.wp_prime(u + v)  # theta at u+v under the scaled weight
        got = out.formula.R[0].eval_numeric(vals)
        assert abs(got - want) < 1e-8 * (1 + abs(want))
        checked += 1
        if checked >= 20:
            break
    assert checked >= 20


def test_formula_independent_of_sampling_seed(wp_ctx):
    sys, backend, _, spec = wp_ctx
    f1 = resolve_addition(sys, spec, backend, seed=3).formula
    f2 = resolve_addition(sys, spec, backend, seed=991).formula
    assert str(f1.R[0]) == str(f2.R[0])
    assert str(f1.R[1]) == str(f2.R[1])
    assert f1.degrees == f2.degrees


# -- group operations -----------------------------------------------------------


def test_exp_point_arithmetic(exp_ctx):
    sys, backend, _, spec = exp_ctx
    out = resolve_addition(sys, spec, backend, seed=3)
    p2 = backend_point(backend, spec, (cmath.log(2),))
    p3 = backend_point(backend, spec, (cmath.log(3),))
    s = point_add(p2, p3, backend=backend, spec=spec)
    assert abs(s.x[0] - 6) < 1e-12
    sf = point_add(p2, p3, formula=out.formula)
    assert sf.close_to(s, 1e-10)
    d = point_sub(s, p3, backend=backend, spec=spec)
    assert d.close_to(p2, 1e-10)


def test_wp_formula_backend_agreement(wp_ctx):
    sys, backend, _, spec = wp_ctx
    formula = resolve_addition(sys, spec, backend, seed=3).formula
    rng = random.Random(12)
    lat = backend.lattice
    checked = 0
    for _ in range(200):
        u = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        v = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        if min(lat.lattice_distance(w) for w in (u, v, u + v)) < 0.2:
            continue
        p1 = backend_point(backend, spec, (u,))
        p2 = backend_point(backend, spec, (v,))
        want = point_add(p1, p2, backend=backend, spec=spec)
        try:
            got = point_add(p1, p2, formula=formula)
        except DivisorDegeneracyError:
            continue
        assert got.close_to(want, 1e-8)
        assert variety_residual(spec, got) < 1e-8
        checked += 1
        if checked >= 30:
            break
    assert checked >= 30


def test_formula_mode_refuses_excluded_divisor(wp_ctx):
    sys, backend, _, spec = wp_ctx
    formula = resolve_addition(sys, spec, backend, seed=3).formula
    u = 0.41 + 0.27j
    p1 = backend_point(backend, spec, (u,))
    p2 = backend_point(backend, spec, (-u,))  # same x-value, divisor x1 = y1
    with pytest.raises(DivisorDegeneracyError):
        point_add(p1, p2, formula=formula)
    ident = point_sub(p1, p1, backend=backend, spec=spec)
    with pytest.raises(DivisorDegeneracyError):
        point_add(p1, ident, formula=formula)  # infinite point never reaches the formula


def test_wp_identity_and_inverse(wp_ctx):
    _, backend, _, spec = wp_ctx
    p = backend_point(backend, spec, (0.31 + 0.17j,))
    identity = point_sub(p, p, backend=backend, spec=spec)
    assert identity.theta is None and identity.x[0] is None  # pole markers at u = 0
    back = point_add(identity, p, backend=backend, spec=spec)
    assert back.close_to(p, 1e-9)


def test_group_axioms_spot(exp_ctx):
    sys, backend, _, spec = exp_ctx
    rng = random.Random(3)
    for _ in range(10):
        us = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(3)]
        pts = [backend_point(backend, spec, (u,)) for u in us]
        ab = point_add(pts[0], pts[1], backend=backend, spec=spec)
        ba = point_add(pts[1], pts[0], backend=backend, spec=spec)
        assert ab.close_to(ba, 1e-10)
        abc1 = point_add(ab, pts[2], backend=backend, spec=spec)
        abc2 = point_add(pts[0], point_add(pts[1], pts[2], backend=backend, spec=spec), backend=backend, spec=spec)
        assert abc1.close_to(abc2, 1e-9)


def test_uniqueness_witness_wp(wp_ctx):
    _, backend, _, spec = wp_ctx
    lat = backend.lattice
    assert uniqueness_witness(backend, spec, (2 * lat.omega1,), seed=5)
