"""Table-driven antiderivatives with an unevaluated fallback.

The integrator tries, in order: linearity, a short table of monomials and
exponentials, partial fractions for expressions rational in the variable, and
the derivative-divides rule ``c u'(v) h(u(v))``.  Anything else comes back as
``Int(e, v)``, which is still an exact antiderivative as far as ``diff`` is
concerned.

Every call is attributed to a named call site; ``integration_audit`` collects
them so reports can show that the pipeline only ever integrates (never solves
an auxiliary ODE).
"""
from __future__ import annotations

import contextvars
from contextlib import contextmanager
from fractions import Fraction

import sympy

from . import expr as E
from .calculus import diff, replace, substitute
from .expr import Add, Elem, Expr, Fn, Int, IntTo, Mul, Num, Pow, Sym
from .normal import expand_terms, normalize

MAX_DEPTH = 3
_DUMMY = "w_"

_audit: contextvars.ContextVar[list | None] = contextvars.ContextVar("integration_audit", default=None)


@contextmanager
def integration_audit():
    sites: list = []
    token = _audit.set(sites)
    try:
        yield sites
    finally:
        _audit.reset(token)


def integrate(e: Expr, v: str, site: str | None = None) -> Expr:
    """Antiderivative of ``e`` with respect to ``v`` (other symbols held fixed)."""
    sites = _audit.get()
    if sites is not None:
        sites.append(site or "unlabelled")
    return _int(normalize(E.as_expr(e)), v, 0)


def is_closed(e: Expr) -> bool:
    return not E.contains_integral(e)


def _split_const(e: Expr, v: str):
    factors = e.factors if isinstance(e, Mul) else (e,)
    const = [f for f in factors if not E.has(f, v)]
    rest = [f for f in factors if E.has(f, v)]
    return E.mul(*const), E.mul(*rest)


def _int(e: Expr, v: str, depth: int) -> Expr:
    if not E.has(e, v):
        return E.mul(e, E.sym(v))
    const, rest = _split_const(e, v)
    if const != E.ONE:
        return E.mul(const, _int(rest, v, depth))
    if isinstance(rest, Add):
        return E.add(*(_int(normalize(t), v, depth) for t in rest.terms))
    terms = expand_terms(rest) if not _has_v_denominator(rest, v) else [rest]
    if len(terms) > 1:
        return E.add(*(_int(normalize(t), v, depth) for t in terms))
    out = _table(rest, v)
    if out is not None:
        return out
    if _is_rational_in(rest, v):
        out = _rational(rest, v, depth)
        if out is not None:
            return out
    out = _derivative_divides(rest, v, depth)
    if out is not None:
        return out
    return E.integral(rest, v)


def _has_v_denominator(e: Expr, v: str) -> bool:
    factors = e.factors if isinstance(e, Mul) else (e,)
    return any(isinstance(f, Pow) and isinstance(f.base, Add) and isinstance(f.exp, Num) and f.exp.value < 0 and E.has(f.base, v)
               for f in factors)


# ---------------------------------------------------------------- table


def _linear(w: Expr, v: str):
    """Return dw/dv when ``w`` is linear in ``v`` with a nonzero slope, else None."""
    d = normalize(diff(w, v))
    if d == E.ZERO or E.has(d, v):
        return None
    return d


def _table(e: Expr, v: str):
    x = E.sym(v)
    if e == x:
        return E.mul(E.HALF, E.pow_(x, E.num(2)))
    if isinstance(e, Pow) and e.base == x and not E.has(e.exp, v):
        if e.exp == E.NEG_ONE:
            return E.ln_(x)
        k1 = E.add(e.exp, E.ONE)
        return E.div(E.pow_(x, k1), k1)
    if isinstance(e, Elem):
        d = _linear(e.arg, v)
        if d is None:
            return None
        if e.name == "exp":
            return E.div(e, d)
        if e.name == "sin":
            return E.div(E.neg(E.cos_(e.arg)), d)
        if e.name == "cos":
            return E.div(E.sin_(e.arg), d)
        if e.name == "ln":
            return E.div(E.sub(E.mul(e.arg, e), e.arg), d)
    if isinstance(e, Pow) and not E.has(e.exp, v) and e.exp != E.NEG_ONE:
        d = _linear(e.base, v)
        if d is not None:
            k1 = E.add(e.exp, E.ONE)
            return E.div(E.pow_(e.base, k1), E.mul(k1, d))
    if isinstance(e, Pow) and e.exp == E.NEG_ONE:
        d = _linear(e.base, v)
        if d is not None:
            return E.div(E.ln_(e.base), d)
        return _arctan(e.base, v)
    return None


def _linear_over_quadratic(e: Expr, v: str):
    """(a D' + b)/D = a ln D + b/D for a quadratic D and linear numerator."""
    factors = e.factors if isinstance(e, Mul) else (e,)
    dens = [f for f in factors if isinstance(f, Pow) and f.exp == E.NEG_ONE and E.has(f.base, v)]
    if len(dens) != 1:
        return None
    D = dens[0].base
    N = E.mul(*(f for f in factors if f is not dens[0]))
    dD, dN = normalize(diff(D, v)), normalize(diff(N, v))
    ddD = normalize(diff(dD, v))
    if not (isinstance(ddD, Num) and ddD.value != 0 and not E.has(dN, v)):
        return None
    a = normalize(E.div(dN, ddD))
    b = normalize(E.sub(N, E.mul(a, dD)))
    if E.has(b, v) or E.has(a, v):
        return None
    at = _arctan(D, v)
    if at is None:
        return None
    return E.add(E.mul(a, E.ln_(D)), E.mul(b, at))


def _arctan(base: Expr, v: str):
    """Int dv/(alpha v^2 + beta v + gamma) for numeric coefficients and no real roots."""
    d1 = normalize(diff(base, v))
    d2 = normalize(diff(d1, v))
    if not isinstance(d2, Num) or d2.value == 0:
        return None
    beta, gamma = normalize(substitute(d1, v, E.ZERO)), normalize(substitute(base, v, E.ZERO))
    if not (isinstance(beta, Num) and isinstance(gamma, Num)):
        return None
    alpha = d2.value / 2
    disc = 4 * alpha * gamma.value - beta.value**2
    if disc <= 0:
        return None
    root = E.sqrt_(E.num(disc))
    arg = E.div(E.add(E.mul(E.num(2 * alpha), E.sym(v)), beta), root)
    return E.mul(2, E.pow_(root, E.NEG_ONE), E.arctan_(arg))


# ---------------------------------------------------------------- rational functions


def _is_rational_in(e: Expr, v: str) -> bool:
    if not E.has(e, v):
        return True
    if isinstance(e, Sym):
        return True
    if isinstance(e, (Add, Mul)):
        return all(_is_rational_in(c, v) for c in E.children(e))
    if isinstance(e, Pow):
        return E.is_integer(e.exp) and _is_rational_in(e.base, v)
    return False


class SympyBridge:
    def __init__(self, v: str):
        self.v = v
        self.var = sympy.Symbol(v)
        self.kernels: dict = {}
        self.back: dict = {}

    def __call__(self, e: Expr):
        if isinstance(e, Num):
            return sympy.Rational(e.value.numerator, e.value.denominator)
        if isinstance(e, Sym) and e.name == self.v:
            return self.var
        if not E.has(e, self.v):
            s = self.kernels.get(e)
            if s is None:
                s = sympy.Symbol(f"k{len(self.kernels)}")
                self.kernels[e] = s
                self.back[s] = e
            return s
        if isinstance(e, Add):
            return sympy.Add(*(self(t) for t in e.terms))
        if isinstance(e, Mul):
            return sympy.Mul(*(self(f) for f in e.factors))
        if isinstance(e, Pow):
            return sympy.Pow(self(e.base), int(e.exp.value))
        raise TypeError(f"not rational: {e}")

    def to_expr(self, s) -> Expr:
        if s.is_Rational:
            return E.num(Fraction(int(s.p), int(s.q)))
        if s.is_Symbol:
            return E.sym(self.v) if s == self.var else self.back[s]
        if s.is_Add:
            return E.add(*(self.to_expr(a) for a in s.args))
        if s.is_Mul:
            return E.mul(*(self.to_expr(a) for a in s.args))
        if s.is_Pow and s.exp.is_Integer:
            return E.pow_(self.to_expr(s.base), E.num(int(s.exp)))
        raise TypeError(f"unexpected sympy node {s}")


def _rational(e: Expr, v: str, depth: int):
    conv = SympyBridge(v)
    try:
        s = conv(e)
        parts = sympy.apart(s, conv.var)
    except (TypeError, sympy.PolynomialError, NotImplementedError):
        return None
    # keep the factored denominators apart returns: the table needs them
    terms = [conv.to_expr(t) for t in sympy.Add.make_args(parts)]
    if len(terms) == 1 and terms[0] == e:
        return _linear_over_quadratic(e, v)
    return E.add(*(_int(t, v, depth) for t in terms))


# ---------------------------------------------------------------- derivative divides


def _candidates(e: Expr, v: str):
    seen = set()
    for n in E.subexpressions(e):
        if not E.has(n, v):
            continue
        cands = []
        if isinstance(n, (Elem, Fn)):
            cands.append(n.arg)
            if isinstance(n, Fn) and n.order > 0:
                cands.append(Fn(n.name, n.arg, n.order - 1))
            if isinstance(n, Elem) and n.name == "ln":
                cands.append(n)
        elif isinstance(n, Pow):
            cands.append(n.base)
            if not isinstance(n.exp, Num):
                cands.append(n)
        elif isinstance(n, (Int, IntTo)):
            cands.append(n)
        for c in cands:
            if c not in seen and not (isinstance(c, Sym) and c.name == v):
                seen.add(c)
                yield c


def _derivative_divides(e: Expr, v: str, depth: int):
    if depth >= MAX_DEPTH:
        return None
    w = E.sym(_DUMMY + str(depth))
    for u in _candidates(e, v):
        du = diff(u, v)
        if normalize(du) == E.ZERO:
            continue
        r = normalize(E.div(e, du))
        h = normalize(replace(r, u, w))
        if E.has(h, v):
            continue
        inner = _int(h, w.name, depth + 1)
        if is_closed(inner):
            return substitute(inner, w.name, u)
    return None
