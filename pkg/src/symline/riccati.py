"""Linear symmetries of Riccati ODEs y' = f2 y^2 + f1 y + f0.

The classification through A = Psi_yy/Psi_yyy does not apply (Psi_yyy = 0), so a
three-step strategy is used instead:

1. look for [F(x), Q(x)] directly, then for [F(x), P(x) y] via the Chini
   invariant s3^2/s2^3 (a constant invariant gives the symmetry in closed form);
2. change variables y = u/f2 (family f = p) or y = u - 1 (family q = p) and
   re-enter step 1;
3. family f = q: p follows algebraically from the relative invariants s2, s3,
   s4 and f2; membership is the constancy of two expressions a, b.
"""
from __future__ import annotations

from dataclasses import dataclass

import sympy

from . import transform
from .fxqx import FxQxSymmetry, find_fxqx
from .model import X, Y, ChiniDeferral, Classification, DegenerateBernoulli, LinearSymmetry, NotRiccati, Ode, PipelineError
from .solve import attach
from .symcore import Expr, diff, is_zero, normalize, poly_parts, render, substitute
from .symcore import expr as E
from .symcore.integrate import SympyBridge
from .symcore.probe import InvalidPoint, evaluate, leaves, random_assignment
from .symcore.queries import drop_var


@dataclass(frozen=True)
class RiccatiCoeffs:
    f2: Expr
    f1: Expr
    f0: Expr


@dataclass(frozen=True)
class RiccatiInvariants:
    s2: Expr
    s3: Expr
    s4: Expr
    chini: Expr

    def as_dict(self) -> dict:
        return {k: render(getattr(self, k)) for k in ("s2", "s3", "s4", "chini")}


def _d(e: Expr, n: int = 1) -> Expr:
    for _ in range(n):
        e = diff(e, X)
    return e


def extract_coeffs(ode: Ode) -> RiccatiCoeffs:
    parts = poly_parts(ode.phi, Y, 2)
    if parts is None or len(parts) < 3 or is_zero(parts[2]):
        raise NotRiccati("right-hand side is not quadratic in y")
    f0, f1, f2 = (drop_var(c, Y) for c in parts)
    if is_zero(f0):
        raise DegenerateBernoulli("f0 vanishes: Bernoulli equation")
    return RiccatiCoeffs(f2, f1, f0)


def invariants(c: RiccatiCoeffs) -> RiccatiInvariants:
    f2, f1, f0 = c.f2, c.f1, c.f0
    s2 = normalize(E.mul(f0, f2))
    s3 = normalize(E.sub(E.sub(E.mul(_d(f0), f2), E.mul(_d(f2), f0)), E.mul(2, f0, f1, f2)))
    s4 = normalize(E.div(E.add(E.mul(2, s2, _d(s3)), E.mul(-3, s3, _d(s2)), E.mul(3, E.pow_(s3, 2))), E.mul(2, s2)))
    chini = normalize(E.div(E.pow_(s3, 2), E.pow_(s2, 3)))
    return RiccatiInvariants(s2, s3, s4, chini)


def scale_coeffs(c: RiccatiCoeffs, pt: Expr) -> RiccatiCoeffs:
    """Coefficients of the ODE for u = pt(x) y."""
    return RiccatiCoeffs(normalize(E.div(c.f2, pt)), normalize(E.add(c.f1, E.div(_d(pt), pt))), normalize(E.mul(pt, c.f0)))


def reparametrize_coeffs(c: RiccatiCoeffs, X_of_t: Expr) -> RiccatiCoeffs:
    """Coefficients after x = X(t), with t written as x again."""
    dX = _d(X_of_t)
    return RiccatiCoeffs(*(normalize(E.mul(dX, substitute(f, X, X_of_t))) for f in (c.f2, c.f1, c.f0)))


def coeffs_to_phi(c: RiccatiCoeffs) -> Expr:
    y = E.sym(Y)
    return E.add(E.mul(c.f2, E.pow_(y, 2)), E.mul(c.f1, y), c.f0)


def _mostly_negative(e: Expr, tries: int = 16) -> bool:
    syms, pars, fns = leaves(e)
    signs = []
    for i in range(tries):
        try:
            v, _ = evaluate(e, random_assignment(syms, pars, fns, 104729 + i))
        except InvalidPoint:
            continue
        signs.append(v < 0)
    return bool(signs) and all(signs)


def branch_sqrt(e: Expr) -> Expr:
    """A square root of ``e`` with square factors taken out as a rational branch.

    sqrt((x - 1)^2 h) becomes (x - 1) sqrt(h): it differs from the principal
    root by a sign that is constant on each interval, which keeps symmetries valid.
    """
    conv = SympyBridge(X)
    try:
        s = sympy.together(conv(normalize(e)))
    except TypeError:
        return E.sqrt_(e)
    out, inside = sympy.Integer(1), sympy.Integer(1)
    for part, sign in zip(sympy.fraction(s), (1, -1)):
        c, facs = sympy.factor_list(part)
        inside *= c**sign
        for g, k in facs:
            out *= g ** (sign * (k // 2))
            inside *= g ** (sign * (k % 2))
    return normalize(E.mul(conv.to_expr(out), E.sqrt_(conv.to_expr(inside))))


def solve_chini(c: RiccatiCoeffs):
    """[F(x), P(x) y] when the Chini invariant is constant, else None."""
    inv = invariants(c)
    if not is_zero(diff(inv.chini, X)):
        return None
    f2, f0 = c.f2, c.f0
    r = normalize(E.div(f2, f0))
    sign = 1
    if _mostly_negative(r):
        # sqrt(f2/f0) = i sqrt(-f2/f0): drop the constant factor i
        r, sign = normalize(E.neg(r)), -1
    root = branch_sqrt(r)
    xi = normalize(E.div(root, f2))
    P = E.div(E.sub(E.mul(_d(f0), f2), E.mul(f0, _d(f2))), E.mul(2, E.pow_(f0, 2), f2, root))
    eta = normalize(E.mul(sign, P, E.sym(Y)))
    return LinearSymmetry(xi, eta)


def step1(ode: Ode):
    """(symmetry, how) from the [F, Q] and [F, P y] searches, or (None, reasons)."""
    reasons = []
    try:
        r = find_fxqx(ode.phi)
    except PipelineError as exc:
        r = None
        reasons.append(f"fxqx: {exc}")
    if isinstance(r, FxQxSymmetry):
        return r.as_symmetry(), "fxqx"
    if r is not None:
        reasons.append(f"fxqx: {r}")
    try:
        sym = solve_chini(extract_coeffs(ode))
    except PipelineError as exc:
        reasons.append(f"chini: {exc}")
        sym = None
    if sym is not None:
        return sym, "chini"
    reasons.append("chini: invariant is not constant")
    return None, reasons


def _via(ode: Ode, tr: transform.Transform):
    reduced = tr.apply(ode)
    sym, how = step1(reduced)
    if sym is None:
        return None, how
    return tr.pullback(sym), how


def case_fp(ode: Ode, c: RiccatiCoeffs):
    """y = u/f2 maps the f = p family to one with a [1, -q'] symmetry."""
    return _via(ode, transform.linear(c.f2))


def case_qp(ode: Ode, c: RiccatiCoeffs):
    """y = u - 1 maps the q = p family to a Chini-solvable one."""
    return _via(ode, transform.linear(E.ONE, E.ONE))


def p_formula(c: RiccatiCoeffs, inv: RiccatiInvariants | None = None):
    """p for the f = q family in terms of s2, s3, s4 and f = f2; None when the denominator vanishes."""
    inv = inv or invariants(c)
    s2, s3, s4, f = inv.s2, inv.s3, inv.s4, c.f2
    den = E.mul(s2, E.sub(E.mul(2, s2, _d(s3)), E.mul(3, s3, _d(s2))))
    if is_zero(den):
        return None
    inner = E.add(
        E.mul(E.sub(_d(s2, 2), s4), s2),
        E.mul(-8, E.pow_(s2, 3)),
        E.mul(-2, E.pow_(_d(s2), 2)),
        E.mul(2, E.pow_(s3, 2)),
    )
    num = E.add(E.mul(3, s2, _d(f, 2), _d(s2)), E.mul(-2, E.pow_(s2, 2), _d(f, 3)), E.mul(inner, _d(f)))
    return normalize(E.div(E.mul(f, num), den))


def fq_constants(c: RiccatiCoeffs, p: Expr):
    f2, f1, f0 = c.f2, c.f1, c.f0
    a = normalize(E.div(E.add(E.mul(f1, p), E.mul(-2, E.pow_(f2, 2)), _d(p)), f2))
    b = normalize(
        E.div(
            E.add(E.mul(f0, E.pow_(p, 2)), E.mul(f2, E.sub(E.pow_(f2, 2), E.add(E.mul(f1, p), _d(p)))), E.mul(_d(f2), p)),
            f2,
        )
    )
    return a, b


def integrability_residuals(c: RiccatiCoeffs, p: Expr):
    """The two relations p must satisfy for members of the f = q family."""
    f2, f1, f0 = c.f2, c.f1, c.f0
    r1 = E.sub(
        _d(f2, 2),
        E.add(E.mul(f1, _d(f2)), E.mul(-2, f0, _d(p)), E.neg(E.mul(p, _d(f0))),
              E.div(E.add(E.pow_(_d(f2), 2), E.mul(p, f0, _d(f2))), f2)),
    )
    r2 = E.sub(
        _d(p, 2),
        E.add(E.mul(2, _d(f2), f2), E.neg(E.mul(_d(p), f1)), E.neg(E.mul(p, _d(f1))),
              E.div(E.add(E.mul(_d(f2), _d(p)), E.mul(p, f1, _d(f2))), f2)),
    )
    return r1, r2


def case_fq(c: RiccatiCoeffs, inv: RiccatiInvariants | None = None):
    """(symmetry, a, b, p) for the f = q family, None for non-members."""
    p = p_formula(c, inv)
    if p is None:
        raise ChiniDeferral("constant Chini invariant: handled by step 1")
    if is_zero(p):
        return None
    a, b = fq_constants(c, p)
    if not (is_zero(diff(a, X)) and is_zero(diff(b, X))):
        return None
    f = c.f2
    xi = normalize(E.div(p, f))
    eta = normalize(E.neg(E.div(E.add(E.mul(_d(p), E.sym(Y)), _d(f)), f)))
    return LinearSymmetry(xi, eta), drop_var(a, X), drop_var(b, X), p


def riccati_strategy(ode: Ode, with_solution: bool = True) -> Classification:
    cls = Classification("DegenerateRiccatiPath", ode)
    trace = []
    try:
        c = extract_coeffs(ode)
    except PipelineError as exc:
        cls.failed = f"{type(exc).__name__}: {exc}"
        return cls
    inv = invariants(c)
    cls.riccati = {**inv.as_dict(), "step": None, "a": None, "b": None}
    cls.details["coefficients"] = {"f2": render(c.f2), "f1": render(c.f1), "f0": render(c.f0)}

    sym, how = step1(ode)
    if sym is not None:
        return _done(cls, sym, "RiccatiStep1", how, with_solution)
    trace.extend(how)

    for name, case in (("f=p", case_fp), ("q=p", case_qp)):
        try:
            sym, how = case(ode, c)
        except PipelineError as exc:
            trace.append(f"{name}: {exc}")
            continue
        if sym is not None:
            return _done(cls, sym, "RiccatiStep2", f"{name} ({how})", with_solution)
        trace.extend(f"{name} / {h}" for h in how)

    try:
        got = case_fq(c, inv)
    except PipelineError as exc:
        got = None
        trace.append(f"f=q: {exc}")
    if got is not None:
        sym, a, b, p = got
        cls.riccati.update(a=render(a), b=render(b))
        cls.details["p"] = render(p)
        return _done(cls, sym, "RiccatiStep3", "f=q", with_solution)
    trace.append("f=q: p vanishes or a, b are not constant")
    cls.details["trace"] = trace
    cls.failed = "; ".join(trace)
    return cls


def _done(cls: Classification, sym: LinearSymmetry, outcome: str, how: str, with_solution: bool) -> Classification:
    cls.outcome = outcome
    cls.case = how
    cls.riccati["step"] = int(outcome[-1])
    return attach(cls, sym, with_solution)
