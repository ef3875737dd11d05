"""Changes of the dependent variable u = U(x, y) with t = x."""
from __future__ import annotations

from dataclasses import dataclass

from .model import X, Y, LinearSymmetry, Ode, PullbackNotLinear, SingularTransform
from .symcore import Expr, diff, is_zero, normalize, poly_parts, render, substitute
from .symcore import expr as E

U = "u"


def _rename(e: Expr, old: str, new: str) -> Expr:
    return substitute(e, old, E.sym(new))


@dataclass(frozen=True)
class Transform:
    """u = forward(x, y), with inverse y = inverse(x, u)."""

    kind: str
    forward: Expr
    inverse: Expr

    def __post_init__(self):
        if normalize(diff(self.forward, Y)) == E.ZERO:
            raise SingularTransform(f"u = {render(self.forward)} does not depend on y")

    @property
    def U_x(self) -> Expr:
        return diff(self.forward, X)

    @property
    def U_y(self) -> Expr:
        return diff(self.forward, Y)

    def to_u(self, e: Expr) -> Expr:
        """Rewrite an (x, y) expression in the new variable, then call that variable y again."""
        return normalize(_rename(substitute(e, Y, self.inverse), U, Y))

    def from_u(self, e: Expr) -> Expr:
        """Read y in ``e`` as the new variable u and express it in the old (x, y)."""
        return normalize(substitute(e, Y, self.forward))

    def apply(self, ode: Ode) -> Ode:
        """The ODE satisfied by u: u' = U_x + U_y * phi."""
        rhs = E.add(self.U_x, E.mul(self.U_y, ode.phi))
        return ode.with_phi(self.to_u(rhs))

    def pullback(self, sym: LinearSymmetry) -> LinearSymmetry:
        xi = sym.xi
        eta_u = self.from_u(sym.eta)
        eta = normalize(E.div(E.sub(eta_u, E.mul(xi, self.U_x)), self.U_y))
        parts = poly_parts(eta, Y, 1)
        if parts is None:
            raise PullbackNotLinear(f"pulled back eta is not linear in y: {render(eta)}")
        c0, c1 = (parts + [E.ZERO])[:2]
        return LinearSymmetry(normalize(xi), normalize(E.add(c0, E.mul(c1, E.sym(Y)))))

    def pushforward(self, sym: LinearSymmetry) -> LinearSymmetry:
        eta_hat = E.add(E.mul(sym.xi, self.U_x), E.mul(sym.eta, self.U_y))
        return LinearSymmetry(sym.xi, self.to_u(eta_hat))

    def round_trip_ok(self) -> bool:
        back = substitute(self.inverse, U, self.forward)
        return is_zero(E.sub(back, E.sym(Y)))

    def as_dict(self) -> dict:
        return {"kind": self.kind, "forward": f"u = {render(self.forward)}", "inverse": f"y = {render(self.inverse)}"}


def scaling(A: Expr) -> Transform:
    """y = A(x) u."""
    u = E.sym(U)
    return Transform("scale", normalize(E.div(E.sym(Y), A)), normalize(E.mul(A, u)))


def linear(p: Expr, q: Expr = E.ZERO) -> Transform:
    """u = p(x) y + q(x)."""
    u = E.sym(U)
    fwd = normalize(E.add(E.mul(p, E.sym(Y)), q))
    inv = normalize(E.div(E.sub(u, q), p))
    return Transform("linear", fwd, inv)


def log_map(A: Expr, coeffs) -> Transform:
    """u = ln A(x, y) for A = c0 + c1 y."""
    c0, c1 = coeffs
    u = E.sym(U)
    inv = normalize(E.div(E.sub(E.exp_(u), c0), c1))
    return Transform("log", E.ln_(A), inv)


def compose_pullback(chain, sym: LinearSymmetry) -> LinearSymmetry:
    for tr in reversed(chain):
        sym = tr.pullback(sym)
    return sym
