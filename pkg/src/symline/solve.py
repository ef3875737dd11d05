"""Verification oracles and quadrature solutions from a linear symmetry."""
from __future__ import annotations

from .model import X, Y, Classification, ImplicitSolution, InvariantSolutionDegenerate, LinearSymmetry, Ode, SolutionCheckFailed
from .symcore import Expr, diff, integrate, is_closed, is_zero, normalize, substitute
from .symcore import expr as E
from .symcore.probe import recording
from .symcore.queries import drop_var

Z = "z"


def determining_residual(phi: Expr, xi: Expr, eta: Expr) -> Expr:
    """eta_x + (eta_y - xi_x) phi - xi phi_x - eta phi_y  (xi free of y)."""
    return E.add(
        diff(eta, X),
        E.mul(E.sub(diff(eta, Y), diff(xi, X)), phi),
        E.neg(E.mul(xi, diff(phi, X))),
        E.neg(E.mul(eta, diff(phi, Y))),
    )


def verify_symmetry(ode: Ode, xi: Expr, eta: Expr) -> bool:
    if E.has(xi, Y):
        raise ValueError("xi must be free of y")
    if is_zero(xi) and is_zero(eta):
        raise ValueError("the zero generator is not a symmetry")
    return is_zero(determining_residual(ode.phi, xi, eta))


def integrating_factor(ode: Ode, xi: Expr, eta: Expr) -> Expr:
    """mu = 1/(eta - xi phi), making mu (phi dx - dy) exact."""
    d = normalize(E.sub(eta, E.mul(xi, ode.phi)))
    if is_zero(d):
        raise InvariantSolutionDegenerate("eta - xi*phi vanishes identically")
    return normalize(E.pow_(d, E.NEG_ONE))


def is_exact(ode: Ode, mu: Expr) -> bool:
    return is_zero(E.add(diff(E.mul(mu, ode.phi), Y), diff(mu, X)))


def check_solution(ode: Ode, sol: ImplicitSolution | Expr) -> bool:
    lhs = sol.lhs if isinstance(sol, ImplicitSolution) else sol
    if is_zero(diff(lhs, Y)):
        return False
    return is_zero(E.add(diff(lhs, X), E.mul(diff(lhs, Y), ode.phi)))


def same_solution_family(l1: Expr, l2: Expr) -> bool:
    """Level sets coincide: the gradients of the two left-hand sides are parallel."""
    return is_zero(E.sub(E.mul(diff(l1, X), diff(l2, Y)), E.mul(diff(l1, Y), diff(l2, X))))


def canonical_data(xi: Expr, eta: Expr):
    """(f, p, q) with u = p y + q invariant and t = f canonical for the generator."""
    P = normalize(diff(eta, Y))
    Q = normalize(E.sub(eta, E.mul(P, E.sym(Y))))
    f = integrate(E.pow_(xi, E.NEG_ONE), X, site="solution:f")
    p = normalize(E.exp_(E.neg(integrate(E.div(P, xi), X, site="solution:p"))))
    q = normalize(E.neg(integrate(E.div(E.mul(Q, p), xi), X, site="solution:q")))
    return f, p, q


def implicit_solution(ode: Ode, xi: Expr, eta: Expr) -> ImplicitSolution:
    """f - Int^{p y + q} dz/G(z) = C1 in the canonical coordinates of the symmetry.

    In t = f(x), u = p y + q the ODE becomes du/dt = G(u); the exact form
    mu (phi dx - dy) integrates to dt - du/G(u) there.
    """
    integrating_factor(ode, xi, eta)  # raises on the degenerate case
    f, p, q = canonical_data(xi, eta)
    u = normalize(E.add(E.mul(p, E.sym(Y)), q))
    G = E.div(E.add(E.mul(p, ode.phi), E.mul(diff(p, X), E.sym(Y)), diff(q, X)), diff(f, X))
    Gz = normalize(substitute(G, Y, E.div(E.sub(E.sym(Z), q), p)))
    Gz = drop_var(Gz, X)
    if E.has(Gz, X):
        raise SolutionCheckFailed("reduced right-hand side still depends on x")
    inv = integrate(E.pow_(Gz, E.NEG_ONE), Z, site="solution:G")
    if is_closed(inv):
        rhs = substitute(inv, Z, u)
    else:
        rhs = E.integral_to(normalize(E.pow_(Gz, E.NEG_ONE)), Z, u)
    sol = ImplicitSolution(E.sub(f, rhs))
    if not check_solution(ode, sol):
        raise SolutionCheckFailed(f"implicit solution failed the derivative check: {sol}")
    return sol


def solution_from_symmetry(ode: Ode, sym: LinearSymmetry) -> ImplicitSolution:
    return implicit_solution(ode, sym.xi, sym.eta)


def attach(cls: Classification, sym: LinearSymmetry, with_solution: bool = True) -> Classification:
    """Verify ``sym`` on the classified ODE and, when it passes, add the implicit solution."""
    with recording() as log:
        ok = not (is_zero(sym.xi) and is_zero(sym.eta)) and verify_symmetry(cls.ode, sym.xi, sym.eta)
        cls.verified["determining"] = ok
        if not ok:
            cls.outcome = "Error"
            cls.failed = "found symmetry does not satisfy the determining equation"
            cls.symmetry = None
            return cls
        cls.symmetry = sym
        cls.verified["solution"] = False
        if with_solution:
            try:
                cls.solution = implicit_solution(cls.ode, sym.xi, sym.eta)
                cls.verified["solution"] = True
            except (InvariantSolutionDegenerate, SolutionCheckFailed) as exc:
                cls.details["solution_error"] = f"{type(exc).__name__}: {exc}"
    cls.verified["probabilistic"] = log.probabilistic > 0
    return cls
