from fractions import Fraction

import pytest

from aat import naming
from aat.backends import make_backend
from aat.parsing import parse_poly
from aat.sampling import SamplingError, residual_check, vanishes


def test_exp_addition_residual_is_tiny():
    ring = naming.problem_ring(1)
    g = parse_poly("L1 - x1*y1", ring)
    backend = make_backend("exp", {"c": Fraction(1)})
    rep = residual_check(g, backend, relation_id="aat", samples=100, seed=42, tol=1e-12)
    assert rep.ok and rep.max < 1e-12
    assert rep.samples == 100


def test_corrupted_relation_fails():
    ring = naming.problem_ring(1)
    bad = parse_poly("L1 + x1*y1", ring)  # sign flipped
    backend = make_backend("exp", {"c": Fraction(1)})
    rep = residual_check(bad, backend, relation_id="bad", samples=50, seed=42, tol=1e-9)
    assert not rep.ok


def test_weierstrass_ode_relation():
    ring = naming.problem_ring(1)
    p = parse_poly("z1_1^2 - 4*x1^3 + 4*x1", ring)
    backend = make_backend("weierstrass", {"g2": Fraction(4), "g3": Fraction(0)})
    rep = residual_check(p, backend, relation_id="ode", samples=100, seed=7, tol=1e-9)
    assert rep.ok
    assert rep.p95 < 1e-9


def test_theta_binding_and_determinism():
    ring = naming.problem_ring(1)
    v = parse_poly("theta^2 - 4*x1^3 + 4*x1", ring)
    backend = make_backend("weierstrass", {"g2": Fraction(4), "g3": Fraction(0)})
    alpha = ((Fraction(1),),)
    rep1 = residual_check(v, backend, relation_id="v", samples=60, seed=3, tol=1e-9, alpha=alpha)
    rep2 = residual_check(v, backend, relation_id="v", samples=60, seed=3, tol=1e-9, alpha=alpha)
    assert rep1 == rep2
    assert rep1.ok


def test_negation_mode_binds_y_to_minus_u():
    ring = naming.problem_ring(1)
    e = parse_poly("x1*y1 - 1", ring)  # exp(-u) = 1/exp(u)
    backend = make_backend("exp", {"c": Fraction(1)})
    rep = residual_check(e, backend, relation_id="neg", samples=60, seed=5, tol=1e-10, y_mode="neg")
    assert rep.ok


def test_pole_dominated_region_raises():
    ring = naming.problem_ring(1)
    p = parse_poly("z1_1^2 - 4*x1^3 + 4*x1", ring)
    backend = make_backend("weierstrass", {"g2": Fraction(4), "g3": Fraction(0)})
    with pytest.raises(SamplingError):
        residual_check(p, backend, relation_id="tiny", samples=40, seed=1, tol=1e-9, box=1e-7)


def test_vanishes_probe():
    ring = naming.problem_ring(1)
    backend = make_backend("exp", {"c": Fraction(2)})
    assert vanishes(parse_poly("z1_1 - 2*x1", ring), backend, seed=11)
    assert not vanishes(parse_poly("z1_1 - x1", ring), backend, seed=11)
