"""Symmetries of the restricted form xi = F(x), eta = Q(x).

With K = phi_y/phi_yy, the ODE admits [F, Q] iff either

* K_y != 0: Upsilon = K_x/K_y (= -Q/F) and
  W = (Upsilon phi_y - Upsilon_x - phi_x)/(phi + Upsilon) are both free of y,
  giving F = exp(Int W dx), Q = -Upsilon F; or
* K_y == 0: K is a constant kappa and phi = A(x) + B(x) exp(y/kappa),
  giving F = exp(-Int A/kappa dx)/B, Q = A F.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import X, Y, DegenerateLinear, DivisionDegenerate, LinearSymmetry
from .symcore import Expr, diff, integrate, is_free_of, is_zero, normalize, render
from .symcore import expr as E
from .symcore.probe import leaves, probe_points
from .symcore.queries import drop_var


@dataclass(frozen=True)
class FxQxSymmetry:
    F: Expr
    Q: Expr
    route: str  # "K_y != 0" or "K_y = 0"

    @property
    def separable(self) -> bool:
        return self.Q == E.ZERO

    def as_symmetry(self) -> LinearSymmetry:
        return LinearSymmetry(self.F, self.Q)


@dataclass(frozen=True)
class Absent:
    """A failed existence condition, with the offending expression."""

    condition: str
    expr: Expr | None = None

    def __str__(self):
        tail = f": {render(self.expr)}" if self.expr is not None else ""
        return f"{self.condition}{tail}"


def compute_K(phi: Expr) -> Expr:
    phi_yy = diff(diff(phi, Y), Y)
    if is_zero(phi_yy):
        raise DegenerateLinear("phi_yy vanishes: the ODE is linear in y")
    return normalize(E.div(diff(phi, Y), phi_yy))


def detect_Ky_nonzero(phi: Expr, K: Expr):
    ups = normalize(E.div(diff(K, X), diff(K, Y)))
    if not is_free_of(ups, Y):
        return Absent("Upsilon = K_x/K_y depends on y", ups)
    ups = drop_var(ups, Y)
    den = normalize(E.add(phi, ups))
    if is_zero(den):
        raise DivisionDegenerate("phi + Upsilon vanishes identically")
    W = normalize(E.div(E.sub(E.mul(ups, diff(phi, Y)), E.add(diff(ups, X), diff(phi, X))), den))
    if not is_free_of(W, Y):
        return Absent("W = (Upsilon phi_y - Upsilon_x - phi_x)/(phi + Upsilon) depends on y", W)
    W = drop_var(W, Y)
    F = normalize(E.exp_(integrate(W, X, site="fxqx:F")))
    Q = normalize(E.neg(E.mul(ups, F)))
    return FxQxSymmetry(F, Q, "K_y != 0")


def constant_value(K: Expr) -> Expr:
    """Exact value of an expression known to be constant in x and y."""
    if not (E.has(K, X) or E.has(K, Y)):
        return K
    syms, pars, fns = leaves(K)
    if pars or fns:
        return drop_var(drop_var(K, X), Y)
    v, _ = next(iter(probe_points(K, 1, 0)))
    r = Fraction(v).limit_denominator(64)
    if abs(float(r) - v) < 1e-9 and is_zero(E.sub(K, E.num(r))):
        return E.num(r)
    return drop_var(drop_var(K, X), Y)


def detect_Ky_zero(phi: Expr, kappa: Expr):
    kernel = E.exp_(E.div(E.sym(Y), kappa))
    B = normalize(E.mul(diff(phi, Y), kappa, E.exp_(E.neg(E.div(E.sym(Y), kappa)))))
    if not is_free_of(B, Y):
        return Absent("phi is not A(x) + B(x) exp(y/kappa): B depends on y", B)
    B = drop_var(B, Y)
    A = normalize(E.sub(phi, E.mul(B, kernel)))
    if not is_free_of(A, Y):
        return Absent("phi is not A(x) + B(x) exp(y/kappa): A depends on y", A)
    A = drop_var(A, Y)
    F = normalize(E.div(E.exp_(E.neg(integrate(E.div(A, kappa), X, site="fxqx:pattern2"))), B))
    Q = normalize(E.mul(A, F))
    return FxQxSymmetry(F, Q, "K_y = 0")


def find_fxqx(phi: Expr):
    """FxQxSymmetry or Absent; raises DegenerateLinear for linear ODEs."""
    K = compute_K(phi)
    if is_zero(diff(K, Y)):
        if not is_zero(diff(K, X)):
            return Absent("K_y = 0 but K depends on x", K)
        return detect_Ky_zero(phi, constant_value(K))
    return detect_Ky_nonzero(phi, K)


def is_separable(phi: Expr) -> bool:
    """phi = X(x) Y(y), tested through the mixed derivative of ln phi."""
    if is_zero(phi):
        return True
    lp = E.ln_(phi)
    return is_zero(diff(diff(lp, X), Y))
