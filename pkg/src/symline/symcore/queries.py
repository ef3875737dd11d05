"""Structural queries answered through the zero test."""
from __future__ import annotations

from fractions import Fraction
from math import factorial

from . import expr as E
from .calculus import diff
from .expr import Expr, Pow, Sym
from .normal import expand_terms, normalize, numer_denom
from .probe import InvalidPoint, note_verdict, evaluate, is_zero, leaves, random_assignment

WITNESS_GAP = 1e-6


def _moves_with(e: Expr, v: str, tries: int = 4) -> bool:
    """Cheap witness: two points differing only in ``v`` give clearly different values."""
    syms, pars, fns = leaves(e)
    for i in range(tries):
        a = random_assignment(syms, pars, fns, 6007 + i)
        b = random_assignment(syms, pars, fns, 6007 + i)
        b.values[v] = random_assignment({v}, set(), set(), 9001 + i).values[v]
        try:
            ya, ba = evaluate(e, a)
            yb, bb = evaluate(e, b)
        except InvalidPoint:
            continue
        if abs(ya - yb) > WITNESS_GAP * max(1.0, ba, bb):
            return True
    return False


def is_free_of(e: Expr, v: str) -> bool:
    """True when ``e`` does not depend on ``v`` (its ``v``-derivative is zero)."""
    if not E.has(e, v):
        return True
    if _moves_with(e, v):
        note_verdict("witness")
        return False
    return is_zero(diff(e, v))


def _structural(num: Expr, v: str, maxdeg: int):
    coeffs = [[] for _ in range(maxdeg + 1)]
    for t in expand_terms(num):
        factors = t.factors if isinstance(t, E.Mul) else (t,)
        k = 0
        rest = []
        for f in factors:
            if isinstance(f, Sym) and f.name == v:
                k += 1
            elif isinstance(f, Pow) and isinstance(f.base, Sym) and f.base.name == v and E.is_integer(f.exp) and f.exp.value > 0:
                k += int(f.exp.value)
            else:
                rest.append(f)
        if k > maxdeg:
            return None
        r = E.mul(*rest)
        if E.has(r, v):
            return None
        coeffs[k].append(r)
    return [E.add(*c) for c in coeffs]


def _trim(coeffs: list) -> list:
    out = list(coeffs)
    while len(out) > 1 and out[-1] == E.ZERO:
        out.pop()
    return out


def poly_parts(e: Expr, v: str, maxdeg: int):
    """Coefficients [c0, ..., cd] (d <= maxdeg) of ``e`` as a polynomial in ``v``, or None."""
    n = normalize(e)
    num, den = numer_denom(n)
    if not E.has(den, v):
        coeffs = _structural(num, v, maxdeg)
        if coeffs is not None:
            return _trim([normalize(E.div(c, den)) for c in coeffs])
    # semantic route: the (maxdeg+1)-th derivative must vanish
    ders = [n]
    for _ in range(maxdeg + 1):
        ders.append(diff(ders[-1], v))
    if not is_zero(ders[-1]):
        return None
    coeffs = [E.ZERO] * (maxdeg + 1)
    rest = n
    for k in range(maxdeg, -1, -1):
        dk = rest
        for _ in range(k):
            dk = diff(dk, v)
        ck = normalize(E.mul(E.num(Fraction(1, factorial(k))), dk))
        if E.has(ck, v):
            if not is_free_of(ck, v):
                return None
        coeffs[k] = ck
        rest = normalize(E.sub(rest, E.mul(ck, E.pow_(E.sym(v), E.num(k)))))
    return _trim(coeffs)


def degree_at_most(e: Expr, v: str, d: int) -> bool:
    return poly_parts(e, v, d) is not None


def drop_var(e: Expr, v: str, trials=(1, 2, Fraction(7, 5), 3, -1)) -> Expr:
    """Remove a structural but fake dependence on ``v`` by substituting a valid constant.

    Only applied when ``e`` is free of ``v`` under the zero test.
    """
    from .calculus import substitute
    from .probe import ProbeFailure, probe_points

    e = normalize(e)
    if not E.has(e, v) or not is_free_of(e, v):
        return e
    for c in trials:
        try:
            r = normalize(substitute(e, v, E.num(c)))
            for _ in probe_points(r, 2, 0):
                pass
        except (ZeroDivisionError, ProbeFailure):
            continue
        return r
    return e
