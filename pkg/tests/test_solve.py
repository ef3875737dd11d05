import pytest

from symline.model import ImplicitSolution, InvariantSolutionDegenerate, Ode
from symline.solve import (
    canonical_data,
    check_solution,
    determining_residual,
    implicit_solution,
    integrating_factor,
    is_exact,
    same_solution_family,
    verify_symmetry,
)
from symline.symcore import diff, is_zero, parse
from symline.symcore import expr as E


def P(t, **kw):
    return parse(t, **kw)


ODE = Ode(P("y^3/x^2"))  # scaling symmetry [2 x, y]


def test_determining_residual():
    assert is_zero(determining_residual(ODE.phi, P("2*x"), P("y")))
    assert not verify_symmetry(ODE, P("1"), P("0"))


def test_zero_generator_rejected():
    with pytest.raises(ValueError):
        verify_symmetry(ODE, E.ZERO, E.ZERO)


def test_integrating_factor_is_exact():
    mu = integrating_factor(ODE, P("2*x"), P("y"))
    assert is_exact(ODE, mu)


def test_trivial_invariant_solution():
    # eta = xi*phi makes the integrating factor blow up
    ode = Ode(P("y/x"))
    with pytest.raises(InvariantSolutionDegenerate):
        integrating_factor(ode, P("x"), P("y"))


def test_implicit_solution_checks():
    sol = implicit_solution(ODE, P("2*x"), P("y"))
    assert check_solution(ODE, sol)
    assert not check_solution(ODE, ImplicitSolution(P("x")))


def test_canonical_data_invariants():
    f, p, q = canonical_data(P("2*x"), P("y"))
    # f advances by one along the generator, u = p y + q is invariant
    assert is_zero(E.sub(E.mul(P("2*x"), diff(f, "x")), E.ONE))
    u = E.add(E.mul(p, E.sym("y")), q)
    assert is_zero(E.add(E.mul(P("2*x"), diff(u, "x")), E.mul(P("y"), diff(u, "y"))))


def test_same_solution_family_ignores_relabeling():
    a = P("x*y")
    assert same_solution_family(a, E.exp_(a))
    assert not same_solution_family(a, P("x + y"))
