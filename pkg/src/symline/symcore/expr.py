"""Immutable expression nodes and the structural constructors that keep them canonical.

Every node carries a sort key that doubles as its identity: two nodes are equal
iff their keys are equal.  Node ranks fix the total order used to sort sums and
products: constants < symbols/parameters < powers < products < sums <
elementary applications < arbitrary-function applications < integrals.

The lower-case constructors (``add``, ``mul``, ``pow_``, ``exp_``, ...) are the
only supported way to build compound nodes.  They flatten, fold rational
constants, collect like terms and like bases, and sort, so the result is
structurally canonical.  Rational-function normalization lives in
``normal.py``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd

ELEMENTARY = ("exp", "ln", "sin", "cos", "tan", "arctan")

# Symbols assumed to range over positive reals (used when pulling factors out
# of fractional powers).  The probing domain honours this.
POSITIVE_SYMBOLS = frozenset({"x", "t"})


class Expr:
    __slots__ = ("key", "_hash")

    def __init__(self, key):
        self.key = key
        self._hash = hash(key)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (isinstance(other, Expr) and self._hash == other._hash and self.key == other.key)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        from .render import render

        return f"Expr({render(self)!r})"

    def __str__(self):
        from .render import render

        return render(self)

    # arithmetic sugar, used heavily by the ODE modules
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, other):
        return pow_(self, as_expr(other))


class Num(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Fraction):
        self.value = value
        super().__init__((0, value))


class Sym(Expr):
    """A variable such as x, y, u or an integration dummy z."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        super().__init__((1, name, 0))


class Par(Expr):
    """A symbolic constant (a, b, n, ...)."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        super().__init__((1, name, 1))


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: Expr):
        self.base = base
        self.exp = exp
        super().__init__((2, base.key, exp.key))


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: tuple):
        self.factors = factors
        super().__init__((3, tuple(f.key for f in factors)))


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: tuple):
        self.terms = terms
        super().__init__((4, tuple(t.key for t in terms)))


class Elem(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        self.name = name
        self.arg = arg
        super().__init__((5, name, arg.key))


class Fn(Expr):
    """Arbitrary one-argument function ``name`` differentiated ``order`` times."""

    __slots__ = ("name", "arg", "order")

    def __init__(self, name: str, arg: Expr, order: int = 0):
        self.name = name
        self.arg = arg
        self.order = order
        super().__init__((6, name, order, arg.key))


class Int(Expr):
    """Unevaluated antiderivative of ``integrand`` with respect to ``var``."""

    __slots__ = ("integrand", "var")

    def __init__(self, integrand: Expr, var: str):
        self.integrand = integrand
        self.var = var
        super().__init__((7, integrand.key, var))


class IntTo(Expr):
    """Unevaluated integral of ``integrand`` in ``dummy`` up to ``upper``."""

    __slots__ = ("integrand", "dummy", "upper")

    def __init__(self, integrand: Expr, dummy: str, upper: Expr):
        self.integrand = integrand
        self.dummy = dummy
        self.upper = upper
        super().__init__((8, integrand.key, dummy, upper.key))


ZERO = Num(Fraction(0))
ONE = Num(Fraction(1))
NEG_ONE = Num(Fraction(-1))
HALF = Num(Fraction(1, 2))


def num(value) -> Num:
    if isinstance(value, Num):
        return value
    return Num(Fraction(value))


def sym(name: str) -> Sym:
    return Sym(name)


def par(name: str) -> Par:
    return Par(name)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return num(value)
    raise TypeError(f"cannot convert {value!r} to Expr")


def is_num(e: Expr, value=None) -> bool:
    if not isinstance(e, Num):
        return False
    return value is None or e.value == value


def is_integer(e: Expr) -> bool:
    return isinstance(e, Num) and e.value.denominator == 1


def split_coeff(e: Expr) -> tuple[Fraction, Expr]:
    """Split ``e`` into rational coefficient and the remaining monomial."""
    if isinstance(e, Num):
        return e.value, ONE
    if isinstance(e, Mul) and isinstance(e.factors[0], Num):
        rest = e.factors[1:]
        return e.factors[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return Fraction(1), e


def _with_coeff(c: Fraction, rest: Expr) -> Expr:
    if c == 0:
        return ZERO
    if rest is ONE or rest == ONE:
        return Num(c)
    if c == 1:
        return rest
    if isinstance(rest, Mul):
        return Mul((Num(c),) + rest.factors)
    return Mul((Num(c), rest))


# ---------------------------------------------------------------- sums

def add(*args) -> Expr:
    const = Fraction(0)
    coeffs: dict[Expr, Fraction] = {}
    stack = [as_expr(a) for a in args]
    while stack:
        t = stack.pop()
        if isinstance(t, Add):
            stack.extend(t.terms)
            continue
        if isinstance(t, Num):
            const += t.value
            continue
        c, rest = split_coeff(t)
        coeffs[rest] = coeffs.get(rest, Fraction(0)) + c
    terms = [_with_coeff(c, r) for r, c in coeffs.items() if c != 0]
    terms.sort(key=lambda t: split_coeff(t)[1].key)
    if const != 0:
        terms.insert(0, Num(const))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Add(tuple(terms))


def neg(e: Expr) -> Expr:
    return mul(NEG_ONE, e)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


# ---------------------------------------------------------------- products

def _factor_int(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n and d < 100000:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _int_root_pow(n: int, e: Fraction) -> Expr:
    """Exact n**e for a positive integer n and rational e."""
    if n == 1:
        return ONE
    outside = Fraction(1)
    leftover: dict[int, int] = {}
    d = e.denominator
    for p, k in _factor_int(n).items():
        total = k * e.numerator
        q, r = divmod(total, d)
        outside *= Fraction(p) ** q
        if r:
            leftover[p] = r
    if not leftover:
        return Num(outside)
    g = reduce(gcd, leftover.values(), d)
    inner = 1
    for p, r in leftover.items():
        inner *= p ** (r // g)
    radical = Pow(Num(Fraction(inner)), Num(Fraction(g, d)))
    return _with_coeff(outside, radical)


def _num_pow(b: Fraction, e: Fraction) -> Expr:
    if e.denominator == 1:
        if b == 0 and e < 0:
            raise ZeroDivisionError("0 raised to a negative power")
        return Num(b ** e.numerator)
    if b == 0:
        return ZERO
    if b < 0:
        if e.denominator % 2 == 1:
            sign = -1 if e.numerator % 2 else 1
            return mul(Num(Fraction(sign)), _num_pow(-b, e))
        return Pow(Num(b), Num(e))
    return mul(_int_root_pow(b.numerator, e), _int_root_pow(b.denominator, -e))


def mul(*args) -> Expr:
    coeff = Fraction(1)
    bases: dict[Expr, list] = {}
    exp_args: list[Expr] = []
    stack = [as_expr(a) for a in args]
    while stack:
        f = stack.pop()
        if isinstance(f, Mul):
            stack.extend(f.factors)
        elif isinstance(f, Num):
            coeff *= f.value
        elif isinstance(f, Elem) and f.name == "exp":
            exp_args.append(f.arg)
        elif isinstance(f, Pow):
            bases.setdefault(f.base, []).append(f.exp)
        else:
            bases.setdefault(f, []).append(ONE)
    if coeff == 0:
        return ZERO
    out: list[Expr] = []
    redo: list[Expr] = []
    for b, exps in bases.items():
        if len(exps) == 1:
            e = exps[0]
            out.append(b if e is ONE else Pow(b, e))
            continue
        r = pow_(b, add(*exps))
        if isinstance(r, (Num, Mul)) or (isinstance(r, Elem) and r.name == "exp"):
            redo.append(r)
        elif isinstance(r, Pow) and r.base != b:
            redo.append(r)
        else:
            out.append(r)
    if len(exp_args) == 1:
        out.append(Elem("exp", exp_args[0]))
    elif exp_args:
        r = exp_(add(*exp_args))
        if isinstance(r, Elem) and r.name == "exp":
            out.append(r)
        else:
            redo.append(r)
    if redo:
        return mul(Num(coeff), *out, *redo)
    out.sort()
    if coeff != 1:
        out.insert(0, Num(coeff))
    if not out:
        return Num(coeff)
    if len(out) == 1:
        return out[0]
    return Mul(tuple(out))


def div(a: Expr, b: Expr) -> Expr:
    return mul(a, pow_(b, NEG_ONE))


# ---------------------------------------------------------------- powers

def is_positive(e: Expr) -> bool:
    """Cheap structural sufficient test for e > 0 on the probing domain."""
    if isinstance(e, Num):
        return e.value > 0
    if isinstance(e, Sym):
        return e.name in POSITIVE_SYMBOLS
    if isinstance(e, Elem):
        return e.name == "exp"
    if isinstance(e, Pow):
        return is_positive(e.base)
    if isinstance(e, Mul):
        return all(is_positive(f) for f in e.factors)
    return False


def pow_(b: Expr, e: Expr) -> Expr:
    b = as_expr(b)
    e = as_expr(e)
    if isinstance(e, Num):
        ev = e.value
        if ev == 0:
            return ONE
        if ev == 1:
            return b
        if isinstance(b, Num):
            return _num_pow(b.value, ev)
    if b == ONE:
        return ONE
    if isinstance(b, Elem) and b.name == "exp":
        return exp_(mul(b.arg, e))
    integral = is_integer(e)
    if isinstance(b, Pow):
        inner = b.exp
        if integral or is_positive(b.base) or is_num(inner, 1) or is_num(inner, -1):
            return pow_(b.base, mul(inner, e))
        if is_integer(inner) and inner.value % 2 and isinstance(e, Num) and (inner.value * e.value).denominator == 1:
            return pow_(b.base, mul(inner, e))
        return Pow(b, e)
    if isinstance(b, Mul):
        if integral:
            return mul(*(pow_(f, e) for f in b.factors))
        pos = [f for f in b.factors if is_positive(f)]
        if not pos:
            return Pow(b, e)
        rest = [f for f in b.factors if not is_positive(f)]
        parts = [pow_(f, e) for f in pos]
        if rest:
            parts.append(Pow(mul(*rest), e) if len(rest) > 1 else pow_(rest[0], e))
        return mul(*parts)
    if b == ZERO:
        if isinstance(e, Num) and e.value < 0:
            raise ZeroDivisionError("0 raised to a negative power")
        return ZERO
    return Pow(b, e)


def sqrt_(b: Expr) -> Expr:
    return pow_(b, HALF)


# ---------------------------------------------------------------- elementary functions

def _terms(e: Expr) -> tuple:
    return e.terms if isinstance(e, Add) else (e,)


def exp_(w: Expr) -> Expr:
    w = as_expr(w)
    if w == ZERO:
        return ONE
    if isinstance(w, Elem) and w.name == "ln":
        return w.arg
    powers = []
    rest = []
    for t in _terms(w):
        if isinstance(t, Elem) and t.name == "ln":
            powers.append(t.arg)
            continue
        if isinstance(t, Mul):
            logs = [f for f in t.factors if isinstance(f, Elem) and f.name == "ln"]
            if len(logs) == 1:
                others = [f for f in t.factors if f is not logs[0]]
                powers.append(pow_(logs[0].arg, mul(*others)))
                continue
        rest.append(t)
    if not powers:
        return Elem("exp", w)
    tail = [Elem("exp", add(*rest))] if rest else []
    return mul(*powers, *tail)


def ln_(w: Expr) -> Expr:
    w = as_expr(w)
    if isinstance(w, Num):
        v = w.value
        if v == 1:
            return ZERO
        if v <= 0:
            return Elem("ln", w)
        parts = []
        for sign, n in ((1, v.numerator), (-1, v.denominator)):
            for p, k in _factor_int(n).items():
                parts.append(mul(Num(Fraction(sign * k)), Elem("ln", Num(Fraction(p)))))
        if len(parts) == 1 and parts[0] == Elem("ln", w):
            return parts[0]
        return add(*parts)
    if isinstance(w, Elem) and w.name == "exp":
        return w.arg
    if isinstance(w, Pow):
        return mul(w.exp, ln_(w.base))
    if isinstance(w, Mul):
        if isinstance(w.factors[0], Num) and w.factors[0].value < 0:
            return Elem("ln", w)
        return add(*(ln_(f) for f in w.factors))
    return Elem("ln", w)


def sin_(w: Expr) -> Expr:
    return ZERO if as_expr(w) == ZERO else Elem("sin", as_expr(w))


def cos_(w: Expr) -> Expr:
    return ONE if as_expr(w) == ZERO else Elem("cos", as_expr(w))


def tan_(w: Expr) -> Expr:
    return ZERO if as_expr(w) == ZERO else Elem("tan", as_expr(w))


def arctan_(w: Expr) -> Expr:
    return ZERO if as_expr(w) == ZERO else Elem("arctan", as_expr(w))


ELEMENTARY_CTORS = {
    "exp": exp_,
    "ln": ln_,
    "sin": sin_,
    "cos": cos_,
    "tan": tan_,
    "arctan": arctan_,
    "sqrt": sqrt_,
}


def elem(name: str, arg: Expr) -> Expr:
    return ELEMENTARY_CTORS[name](arg)


def fn(name: str, arg: Expr, order: int = 0) -> Fn:
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    return Fn(name, as_expr(arg), order)


def integral(integrand: Expr, var: str) -> Expr:
    integrand = as_expr(integrand)
    if integrand == ZERO:
        return ZERO
    return Int(integrand, var)


def integral_to(integrand: Expr, dummy: str, upper: Expr) -> Expr:
    integrand = as_expr(integrand)
    if integrand == ZERO:
        return ZERO
    return IntTo(integrand, dummy, as_expr(upper))


# ---------------------------------------------------------------- structural queries

def children(e: Expr) -> tuple:
    if isinstance(e, Add):
        return e.terms
    if isinstance(e, Mul):
        return e.factors
    if isinstance(e, Pow):
        return (e.base, e.exp)
    if isinstance(e, (Elem, Fn)):
        return (e.arg,)
    if isinstance(e, Int):
        return (e.integrand,)
    if isinstance(e, IntTo):
        return (e.integrand, e.upper)
    return ()


_free_cache: dict = {}


def free_names(e: Expr) -> frozenset:
    """Names of free symbols and parameters occurring in ``e``."""
    hit = _free_cache.get(e)
    if hit is not None:
        return hit
    if isinstance(e, (Sym, Par)):
        out = frozenset((e.name,))
    elif isinstance(e, Num):
        out = frozenset()
    elif isinstance(e, IntTo):
        out = (free_names(e.integrand) - {e.dummy}) | free_names(e.upper)
    elif isinstance(e, Int):
        out = free_names(e.integrand) | {e.var}
    else:
        out = frozenset().union(*(free_names(c) for c in children(e)))
    if len(_free_cache) > 200000:
        _free_cache.clear()
    _free_cache[e] = out
    return out


def func_names(e: Expr) -> frozenset:
    out = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Fn):
            out.add(n.name)
        stack.extend(children(n))
    return frozenset(out)


def has(e: Expr, name: str) -> bool:
    return name in free_names(e)


def contains_integral(e: Expr) -> bool:
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, (Int, IntTo)):
            return True
        stack.extend(children(n))
    return False


def subexpressions(e: Expr):
    seen = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        yield n
        stack.extend(children(n))
