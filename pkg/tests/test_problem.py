import pytest
from hypothesis import given
from hypothesis import strategies as st

from symline.problem import NotAnODE, ProblemError, ProblemFile, UnsupportedDegree
from symline.symcore import is_zero, parse
from symline.symcore import expr as E

GENERAL = """# general case
param a
func f, g
ode: x*y' + a*y - f(x)*g(x^a*y) = 0
expect.class: CaseGeneral
"""


def test_parse_problem():
    pf = ProblemFile.parse_text(GENERAL, "k.ode")
    assert pf.params == ("a",) and pf.funcs == ("f", "g")
    assert pf.expect == {"class": "CaseGeneral"}
    (ode,) = pf.branches()
    want = parse("f(x)*g(x^a*y)/x - a*y/x", params=["a"], funcs=["f", "g"])
    assert is_zero(E.sub(ode.phi, want))


def test_text_round_trip():
    pf = ProblemFile.parse_text(GENERAL)
    assert ProblemFile.parse_text(pf.to_text("again")) == pf


def test_quadratic_gives_two_branches():
    pf = ProblemFile.parse_text("ode: y'^2 - 4*x^2 = 0")
    a, b = pf.branches()
    assert is_zero(E.sub(a.phi, parse("2*x"))) and is_zero(E.add(b.phi, parse("2*x")))


@pytest.mark.parametrize(
    "text, err",
    [
        ("ode: y^2 = x", NotAnODE),
        ("ode: y'^3 = x", UnsupportedDegree),
        ("ode: y' = x\node: y' = y", ProblemError),
        ("expect.colour: red\node: y' = x", ProblemError),
        ("what is this", ProblemError),
        ("ode: y' + x", ProblemError),
    ],
)
def test_bad_problems(text, err):
    with pytest.raises(err):
        ProblemFile.parse_text(text).branches()


@given(st.lists(st.sampled_from(["a", "b", "c"]), unique=True), st.sampled_from(["x^2", "a*x", "y^2 + 1"]))
def test_declarations_round_trip(params, rhs):
    if "a" in rhs and "a" not in params:
        params = ["a", *params]
    pf = ProblemFile(f"y' = {rhs}", tuple(params))
    assert ProblemFile.parse_text(pf.to_text()) == pf
