"""Differentiation and capture-free substitution."""
from __future__ import annotations

from . import expr as E
from .expr import Add, Elem, Expr, Fn, Int, IntTo, Mul, Num, Par, Pow, Sym


def diff(e: Expr, v: str) -> Expr:
    """Exact partial derivative of ``e`` with respect to the symbol named ``v``."""
    if isinstance(v, Sym):
        v = v.name
    memo: dict = {}

    def d(n: Expr) -> Expr:
        if not E.has(n, v):
            return E.ZERO
        hit = memo.get(n)
        if hit is not None:
            return hit
        out = _diff_node(n, v, d)
        memo[n] = out
        return out

    return d(e)


def _diff_node(n: Expr, v: str, d) -> Expr:
    if isinstance(n, Sym):
        return E.ONE if n.name == v else E.ZERO
    if isinstance(n, (Num, Par)):
        return E.ZERO
    if isinstance(n, Add):
        return E.add(*(d(t) for t in n.terms))
    if isinstance(n, Mul):
        fs = n.factors
        terms = []
        for i, f in enumerate(fs):
            df = d(f)
            if df != E.ZERO:
                terms.append(E.mul(*fs[:i], df, *fs[i + 1:]))
        return E.add(*terms)
    if isinstance(n, Pow):
        b, k = n.base, n.exp
        if not E.has(k, v):
            return E.mul(k, E.pow_(b, E.add(k, E.NEG_ONE)), d(b))
        # b^k = exp(k ln b)
        return E.mul(n, E.add(E.mul(d(k), E.ln_(b)), E.mul(k, d(b), E.pow_(b, E.NEG_ONE))))
    if isinstance(n, Elem):
        w = n.arg
        dw = d(w)
        if n.name == "exp":
            return E.mul(n, dw)
        if n.name == "ln":
            return E.mul(dw, E.pow_(w, E.NEG_ONE))
        if n.name == "sin":
            return E.mul(E.cos_(w), dw)
        if n.name == "cos":
            return E.mul(E.NEG_ONE, E.sin_(w), dw)
        if n.name == "tan":
            return E.mul(E.add(E.ONE, E.pow_(n, E.num(2))), dw)
        if n.name == "arctan":
            return E.mul(dw, E.pow_(E.add(E.ONE, E.pow_(w, E.num(2))), E.NEG_ONE))
        raise ValueError(f"unknown elementary function {n.name}")
    if isinstance(n, Fn):
        return E.mul(Fn(n.name, n.arg, n.order + 1), d(n.arg))
    if isinstance(n, Int):
        if n.var == v:
            return n.integrand
        return E.integral(d(n.integrand), n.var)
    if isinstance(n, IntTo):
        out = E.mul(substitute(n.integrand, n.dummy, n.upper), d(n.upper))
        if E.has(n.integrand, v) and n.dummy != v:
            out = E.add(out, E.integral_to(d(n.integrand), n.dummy, n.upper))
        return out
    raise TypeError(f"cannot differentiate {type(n).__name__}")


def _fresh(base: str, avoid: set) -> str:
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def substitute(e: Expr, v: str, r: Expr) -> Expr:
    """Replace free occurrences of symbol ``v`` in ``e`` by ``r``."""
    if isinstance(v, Sym):
        v = v.name
    r = E.as_expr(r)
    r_free = E.free_names(r)
    memo: dict = {}

    def s(n: Expr) -> Expr:
        if not E.has(n, v):
            return n
        hit = memo.get(n)
        if hit is not None:
            return hit
        out = _subst_node(n)
        memo[n] = out
        return out

    def _subst_node(n: Expr) -> Expr:
        if isinstance(n, Sym):
            return r if n.name == v else n
        if isinstance(n, Add):
            return E.add(*(s(t) for t in n.terms))
        if isinstance(n, Mul):
            return E.mul(*(s(f) for f in n.factors))
        if isinstance(n, Pow):
            return E.pow_(s(n.base), s(n.exp))
        if isinstance(n, Elem):
            return E.elem(n.name, s(n.arg))
        if isinstance(n, Fn):
            return Fn(n.name, s(n.arg), n.order)
        if isinstance(n, Int):
            if n.var == v or n.var in r_free:
                # F(var) = IntTo(h[var->dummy], dummy, var), then substitute
                dummy = _fresh("z", E.free_names(n.integrand) | r_free | {v, n.var})
                as_to = IntTo(substitute(n.integrand, n.var, E.sym(dummy)), dummy, E.sym(n.var))
                return s(as_to)
            return E.integral(s(n.integrand), n.var)
        if isinstance(n, IntTo):
            h, dummy = n.integrand, n.dummy
            if dummy in r_free or dummy == v:
                new = _fresh("z", E.free_names(h) | r_free | {v})
                h = substitute(h, dummy, E.sym(new))
                dummy = new
            return E.integral_to(s(h), dummy, s(n.upper))
        return n

    return s(e)


def replace(e: Expr, target: Expr, r: Expr) -> Expr:
    """Structurally replace every occurrence of the subexpression ``target``."""
    memo: dict = {}

    def s(n: Expr) -> Expr:
        if n == target:
            return r
        hit = memo.get(n)
        if hit is not None:
            return hit
        if isinstance(n, Add):
            out = E.add(*(s(t) for t in n.terms))
        elif isinstance(n, Mul):
            out = E.mul(*(s(f) for f in n.factors))
        elif isinstance(n, Pow):
            out = E.pow_(s(n.base), s(n.exp))
        elif isinstance(n, Elem):
            out = E.elem(n.name, s(n.arg))
        elif isinstance(n, Fn):
            out = Fn(n.name, s(n.arg), n.order)
        elif isinstance(n, Int):
            out = E.integral(s(n.integrand), n.var)
        elif isinstance(n, IntTo):
            out = E.integral_to(s(n.integrand), n.dummy, s(n.upper))
        else:
            out = n
        memo[n] = out
        return out

    return s(e)
