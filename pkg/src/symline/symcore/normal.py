"""Rational normalization over kernels.

An expression is viewed as a rational function in a finite set of kernels:

* atoms: symbols, parameters, non-exp elementary applications, arbitrary
  function applications and integrals;
* radicals ``b^(1/D)`` of compound bases, tied to ``b`` by the relation
  ``g^D = b``;
* exponentials ``exp(m/D)`` of a monomial ``m`` (all multiples of ``m`` in
  exponents share one kernel);
* symbolic powers ``b^(m/D)``.

Rational exponents of atoms are handled by raising the generator to the LCM of
the denominators seen.  The rational function is built in a sympy fraction
field, which cancels the polynomial GCD, and converted back with the content
and the sign pulled out front so the result is unique for a given kernel set.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

import sympy
from sympy.polys.domains import QQ
from sympy.polys.fields import field

from . import expr as E
from .expr import Add, Elem, Expr, Fn, Int, IntTo, Mul, Num, Par, Pow, Sym

MAX_EXPAND_TERMS = 400


def _is_atom(e: Expr) -> bool:
    if isinstance(e, Elem):
        return e.name != "exp"
    return isinstance(e, (Sym, Par, Fn, Int, IntTo))


# ---------------------------------------------------------------- expansion


def expand_terms(e: Expr) -> list:
    """Terms of the distributed expansion of ``e`` (products of sums multiplied out)."""
    if isinstance(e, Add):
        out = []
        for t in e.terms:
            out.extend(expand_terms(t))
        return out
    if isinstance(e, Mul):
        acc = [E.ONE]
        for f in e.factors:
            parts = _factor_terms(f)
            if len(acc) * len(parts) > MAX_EXPAND_TERMS:
                return [e]
            acc = [E.mul(a, b) for a in acc for b in parts]
        return acc
    return _factor_terms(e)


def _factor_terms(f: Expr) -> list:
    if isinstance(f, Add):
        return expand_terms(f)
    if isinstance(f, Pow) and isinstance(f.base, Add) and E.is_integer(f.exp) and 1 < f.exp.value <= 8:
        base = expand_terms(f.base)
        acc = [E.ONE]
        for _ in range(int(f.exp.value)):
            if len(acc) * len(base) > MAX_EXPAND_TERMS:
                return [f]
            acc = [E.mul(a, b) for a in acc for b in base]
        return acc
    return [f]


def expand(e: Expr) -> Expr:
    return E.add(*expand_terms(e))


class _SympyAtoms:
    """Two-way map between expressions and sympy, non-polynomial pieces as symbols."""

    def __init__(self):
        self.atoms: dict = {}
        self.names: dict = {}

    def to(self, e: Expr):
        if isinstance(e, Num):
            return sympy.Rational(e.value.numerator, e.value.denominator)
        if isinstance(e, Add):
            return sympy.Add(*(self.to(t) for t in e.terms))
        if isinstance(e, Mul):
            return sympy.Mul(*(self.to(f) for f in e.factors))
        if isinstance(e, Pow) and E.is_integer(e.exp):
            return sympy.Pow(self.to(e.base), int(e.exp.value))
        s = self.atoms.get(e)
        if s is None:
            s = self.atoms[e] = sympy.Symbol(f"a{len(self.atoms)}")
            self.names[s] = e
        return s

    def back(self, s) -> Expr:
        if s.is_Rational:
            return E.num(Fraction(int(s.p), int(s.q)))
        if s.is_Symbol:
            return self.names[s]
        if s.is_Add:
            return E.add(*(self.back(a) for a in s.args))
        if s.is_Mul:
            return E.mul(*(self.back(a) for a in s.args))
        if s.is_Pow and s.exp.is_Integer:
            return E.pow_(self.back(s.base), E.num(int(s.exp)))
        raise TypeError(f"unexpected sympy node {s}")


@lru_cache(maxsize=8192)
def canonical_exponent(k: Expr) -> Expr:
    """Exponent rewritten so that equal exponents give equal kernel monomials.

    A rational function of the single variable in its denominator is split
    into partial fractions (unique), so y x^2/(x^2 - 1) and y + y/(x^2 - 1)
    yield the same exponential kernels.
    """
    n = normalize(k)
    _, den = numer_denom(n)
    vs = {v for v in E.subexpressions(den) if isinstance(v, Sym)}
    opaque = any(isinstance(v, (Fn, Int, IntTo, Elem)) or (isinstance(v, Pow) and not E.is_integer(v.exp))
                 for v in E.subexpressions(n))
    if len(vs) != 1 or opaque:
        return expand(n)
    br = _SympyAtoms()
    try:
        parts = sympy.apart(br.to(n), br.to(next(iter(vs))))
        return expand(br.back(parts))
    except (sympy.PolynomialError, NotImplementedError, TypeError):
        return expand(n)


def _exp_split(k: Expr):
    """Split an exponent into its rational part and (coefficient, monomial) pairs."""
    c0 = Fraction(0)
    pairs: dict[Expr, Fraction] = {}
    for t in expand_terms(k):
        if isinstance(t, Num):
            c0 += t.value
            continue
        c, m = E.split_coeff(t)
        pairs[m] = pairs.get(m, Fraction(0)) + c
    return c0, [(c, m) for m, c in pairs.items() if c != 0]


# ---------------------------------------------------------------- structural preparation


def _prep(e: Expr) -> Expr:
    """Rebuild ``e`` with every kernel argument normalized."""
    if isinstance(e, (Num, Sym, Par)):
        return e
    if isinstance(e, Add):
        return E.add(*(_prep(t) for t in e.terms))
    if isinstance(e, Mul):
        return E.mul(*(_prep(f) for f in e.factors))
    if isinstance(e, Pow):
        if E.is_integer(e.exp):
            return E.pow_(_prep(e.base), e.exp)
        ex = e.exp if isinstance(e.exp, Num) else canonical_exponent(normalize(e.exp))
        return E.pow_(normalize(e.base), ex)
    if isinstance(e, Elem):
        arg = normalize(e.arg)
        if e.name == "exp":
            return E.exp_(canonical_exponent(arg))
        return E.elem(e.name, arg)
    if isinstance(e, Fn):
        return Fn(e.name, normalize(e.arg), e.order)
    if isinstance(e, Int):
        return E.integral(normalize(e.integrand), e.var)
    if isinstance(e, IntTo):
        return E.integral_to(normalize(e.integrand), e.dummy, normalize(e.upper))
    raise TypeError(f"unknown node {type(e).__name__}")


# ---------------------------------------------------------------- kernel bookkeeping


class _Kernels:
    def __init__(self):
        self.den: dict[tuple, int] = {}
        self.order: dict[tuple, Expr] = {}

    def note(self, key: tuple, sort_expr: Expr, d: int):
        self.den[key] = lcm(self.den.get(key, 1), d)
        self.order[key] = sort_expr

    def visit(self, e: Expr):
        if isinstance(e, Num):
            return
        if _is_atom(e):
            self.note(("atom", e), e, 1)
            return
        if isinstance(e, (Add, Mul)):
            for c in E.children(e):
                self.visit(c)
            return
        if isinstance(e, Pow):
            b, k = e.base, e.exp
            if isinstance(k, Num):
                self.rational_power(b, k.value)
                return
            c0, pairs = _exp_split(k)
            if c0 != 0:
                self.rational_power(b, c0)
            for c, m in pairs:
                self.note(("spow", b, m), Pow(b, m), c.denominator)
            return
        if isinstance(e, Elem):  # exp
            c0, pairs = _exp_split(e.arg)
            if c0 != 0:
                self.note(("exp", E.ONE), Elem("exp", E.ONE), c0.denominator)
            for c, m in pairs:
                self.note(("exp", m), Elem("exp", m), c.denominator)
            return
        raise TypeError(f"unknown node {type(e).__name__}")

    def rational_power(self, b: Expr, r: Fraction):
        if r.denominator == 1:
            self.visit(b)
        elif _is_atom(b):
            self.note(("atom", b), b, r.denominator)
        else:
            self.note(("alg", b), Pow(b, E.ZERO), r.denominator)
            self.visit(b)


def _gen_expr(key: tuple, d: int) -> Expr:
    kind = key[0]
    frac = E.num(Fraction(1, d))
    if kind == "atom":
        return E.pow_(key[1], frac)
    if kind == "alg":
        return E.pow_(key[1], frac)
    if kind == "exp":
        return E.exp_(E.mul(key[1], frac))
    return E.pow_(key[1], E.mul(key[2], frac))


# ---------------------------------------------------------------- the normalizer


class _Converter:
    def __init__(self, kernels: _Kernels):
        keys = sorted(kernels.den, key=lambda k: kernels.order[k].key)
        self.keys = keys
        self.den = [kernels.den[k] for k in keys]
        self.index = {k: i for i, k in enumerate(keys)}
        if keys:
            self.F, *gens = field([f"g{i}" for i in range(len(keys))], QQ)
            self.gens = gens
        else:
            self.F, self.gens = field(["g0"], QQ)[0], []
        self.memo: dict = {}

    def frac(self, num, den):
        if den.is_ground:  # nothing to cancel
            return self.F.raw_new(num.quo_ground(den.LC), den.ring.one)
        return self.F.new(num, den)

    def const(self, v: Fraction):
        return self.F(QQ(v.numerator, v.denominator))

    def gpow(self, key: tuple, r: Fraction):
        i = self.index[key]
        n = r * self.den[i]
        assert n.denominator == 1, (key, r)
        return self.gens[i] ** int(n)

    def conv(self, e: Expr):
        hit = self.memo.get(e)
        if hit is not None:
            return hit
        out = self._conv(e)
        self.memo[e] = out
        return out

    def _conv(self, e: Expr):
        if isinstance(e, Num):
            return self.const(e.value)
        if _is_atom(e):
            return self.gpow(("atom", e), Fraction(1))
        if isinstance(e, Add):
            # sum numerators over shared denominators first: one gcd per group
            groups: dict = {}
            for t in e.terms:
                v = self.conv(t)
                groups[v.denom] = groups.get(v.denom, 0) + v.numer
            acc = self.F(0)
            for den, num in groups.items():
                acc += self.frac(num, den)
            return acc
        if isinstance(e, Mul):
            vals = [self.conv(f) for f in e.factors]
            num, den = vals[0].numer, vals[0].denom
            for v in vals[1:]:
                num, den = num * v.numer, den * v.denom
            return self.frac(num, den)
        if isinstance(e, Pow):
            b, k = e.base, e.exp
            if isinstance(k, Num):
                return self.rational_power(b, k.value)
            c0, pairs = _exp_split(k)
            acc = self.rational_power(b, c0) if c0 != 0 else self.F(1)
            for c, m in pairs:
                acc *= self.gpow(("spow", b, m), c)
            return acc
        if isinstance(e, Elem):  # exp
            c0, pairs = _exp_split(e.arg)
            acc = self.gpow(("exp", E.ONE), c0) if c0 != 0 else self.F(1)
            for c, m in pairs:
                acc *= self.gpow(("exp", m), c)
            return acc
        raise TypeError(f"unknown node {type(e).__name__}")

    def rational_power(self, b: Expr, r: Fraction):
        if r.denominator == 1:
            return self.conv(b) ** int(r)
        if _is_atom(b):
            return self.gpow(("atom", b), r)
        whole = r.numerator // r.denominator
        rest = r - whole
        return self.conv(b) ** whole * self.gpow(("alg", b), rest)

    # -- algebraic relations g^D = base

    def reduce(self, f):
        alg = [(i, k) for i, k in enumerate(self.keys) if k[0] == "alg" and self.den[i] > 1]
        if not alg:
            return f
        rel = {i: self.conv(k[1]) for i, k in alg}
        for _ in range(8):
            new_num, c1 = self._reduce_poly(f.numer, alg, rel)
            new_den, c2 = self._reduce_poly(f.denom, alg, rel)
            if not (c1 or c2):
                break
            f = new_num / new_den
        return f

    def _reduce_poly(self, poly, alg, rel):
        needs = any(m[i] >= self.den[i] for m in poly.monoms() for i, _ in alg)
        if not needs:
            return self.F.field_new(poly), False
        acc = self.F(0)
        ring = poly.ring
        for monom, coeff in poly.terms():
            m = list(monom)
            factor = self.F(1)
            for i, _ in alg:
                q, r = divmod(m[i], self.den[i])
                if q:
                    m[i] = r
                    factor *= rel[i] ** q
            acc += self.F.field_new(ring({tuple(m): coeff})) * factor
        return acc, True

    # -- back to expressions

    def monomial(self, exps) -> list:
        out = []
        for i, k in enumerate(exps):
            if k:
                out.append(_gen_pow(self.keys[i], self.den[i], k))
        return out

    def poly_expr(self, terms, content: Fraction, shift) -> Expr:
        parts = []
        for monom, coeff in terms:
            c = Fraction(int(coeff.numerator), int(coeff.denominator)) / content
            exps = [a - b for a, b in zip(monom, shift)]
            parts.append(E.mul(E.Num(c), *self.monomial(exps)))
        return E.add(*parts)

    def back(self, f) -> Expr:
        num, den = f.numer, f.denom
        if not num:
            return E.ZERO
        nt, dt = num.terms(), den.terms()
        nc, dc = _content(nt), _content(dt)
        lead = dt[0][1]
        if lead < 0:
            dc = -dc
        nmin = _min_exps(nt)
        dmin = _min_exps(dt)
        coeff = nc / dc
        mono = self.monomial([a - b for a, b in zip(nmin, dmin)])
        numer = self.poly_expr(nt, nc, nmin)
        denom = self.poly_expr(dt, dc, dmin)
        return E.mul(E.Num(coeff), *mono, numer, E.pow_(denom, E.NEG_ONE))


@lru_cache(maxsize=4096)
def _gen_pow(key: tuple, d: int, k: int) -> Expr:
    return E.pow_(_gen_expr(key, d), E.num(k))


def _content(terms) -> Fraction:
    L = 1
    for _, c in terms:
        L = lcm(L, int(c.denominator))
    g = 0
    for _, c in terms:
        g = gcd(g, int(c.numerator) * (L // int(c.denominator)))
    return Fraction(g, L)


def _min_exps(terms):
    it = iter(terms)
    mins = list(next(it)[0])
    for monom, _ in it:
        mins = [min(a, b) for a, b in zip(mins, monom)]
    return mins


@lru_cache(maxsize=50000)
def normalize(e: Expr) -> Expr:
    """Canonical rational normal form of ``e`` over its kernels."""
    if isinstance(e, (Num, Sym, Par)):
        return e
    p = _prep(e)
    kernels = _Kernels()
    kernels.visit(p)
    conv = _Converter(kernels)
    f = conv.reduce(conv.conv(p))
    return conv.back(f)


def numer_denom(e: Expr) -> tuple[Expr, Expr]:
    """Numerator and denominator of the normal form (denominator free of numeric content)."""
    n = normalize(e)
    factors = n.factors if isinstance(n, Mul) else (n,)
    num, den = [], []
    for f in factors:
        if isinstance(f, Pow) and isinstance(f.exp, Num) and f.exp.value < 0:
            den.append(E.pow_(f.base, E.num(-f.exp.value)))
        else:
            num.append(f)
    return E.mul(*num), E.mul(*den)


def together(*parts: Expr) -> Expr:
    return normalize(E.add(*parts))
