import random
from fractions import Fraction

import pytest

from aat.rings import VarRing


@pytest.fixture
def ring3():
    return VarRing(("x1", "x2", "x3"))


@pytest.fixture
def pring():
    """Ring with two parameters, as used by the Weierstrass family."""
    return VarRing(("theta", "x1"), ("g2", "g3"))


def random_poly(rng: random.Random, ring: VarRing, max_degree=3, max_terms=5, coeff_range=6):
    """Small random polynomial with exact rational coefficients."""
    width = len(ring.names)
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        exps = [0] * width
        budget = rng.randint(0, max_degree)
        for _ in range(budget):
            exps[rng.randrange(width)] += 1
        num = rng.randint(-coeff_range, coeff_range)
        den = rng.randint(1, 3)
        c = Fraction(num, den)
        if c:
            terms[tuple(exps)] = terms.get(tuple(exps), Fraction(0)) + c
    return ring.poly(terms)
