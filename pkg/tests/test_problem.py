from fractions import Fraction

import pytest

from aat.problem import ProblemError, load_problem, parse_problem

EXP_TEXT = """\
[mapping]
n = 1
family = exp
[aat]
G1 = L1 - x1*y1
[options]
tol = 1e-9
samples = 100
seed = 42
"""


def test_minimal_exp_problem():
    spec = parse_problem(EXP_TEXT)
    assert spec.n == 1
    assert spec.family == "exp"
    assert str(spec.aat_polys[0]) == "L1 - x1*y1"
    assert spec.options.tol == 1e-9
    assert spec.options.samples == 100
    assert spec.options.seed == 42


def test_weierstrass_problem_with_params_and_auto():
    text = """\
[mapping]
n = 1
family = weierstrass
param g2 = 4
param g3 = 0
[aat]
G1 = auto
[options]
seed = 7
"""
    spec = parse_problem(text)
    assert spec.params == {"g2": Fraction(4), "g3": Fraction(0)}
    g = spec.aat_polys[0]
    assert g.degree_in("L1") == 2
    # parameter values are substituted: the stored polynomial is numeric
    assert g.degree_in("g2") == 0


def test_rational_param_values():
    text = EXP_TEXT.replace("family = exp", "family = exp\nparam c = 1/2")
    spec = parse_problem(text)
    assert spec.params["c"] == Fraction(1, 2)


def test_arity_mismatch_rejected():
    text = """\
[mapping]
n = 2
family = singular2-case3
[aat]
G1 = L1 - x1*y1
"""
    with pytest.raises(ProblemError) as err:
        parse_problem(text)
    assert "expected 2 addition polynomials" in str(err.value)


def test_degree_zero_in_value_slot_rejected():
    text = """\
[mapping]
n = 1
family = exp
[aat]
G1 = x1 - y1
"""
    with pytest.raises(ProblemError) as err:
        parse_problem(text)
    assert "positive degree in L1" in str(err.value)


def test_malformed_sections_rejected():
    with pytest.raises(ProblemError):
        parse_problem("n = 1\n")  # content before any section
    with pytest.raises(ProblemError):
        parse_problem("[bogus]\n")
    with pytest.raises(ProblemError):
        parse_problem("[mapping]\nn = 1\nfamily = martian\n[aat]\nG1 = L1 - x1*y1\n")
    with pytest.raises(ProblemError):
        parse_problem("[mapping]\nn = 1\n[aat]\nG1 = L1 - x1*y1\n[options]\nbogus = 3\n")
    with pytest.raises(ProblemError):
        parse_problem(EXP_TEXT.replace("G1 = L1 - x1*y1", "G1 = L1 - (x1"))


def test_comments_and_missing_file(tmp_path):
    spec = parse_problem("# leading comment\n" + EXP_TEXT + "# trailing\n")
    assert spec.n == 1
    with pytest.raises(FileNotFoundError):
        load_problem(tmp_path / "missing.aat")


def test_bundled_problem_files_load():
    for name in ("exp", "lemniscatic", "additive", "zeta-drift"):
        spec = load_problem(f"problems/{name}.aat")
        assert spec.n in (1, 2)
