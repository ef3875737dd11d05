"""Text rendering in the same grammar the parser accepts."""
from __future__ import annotations

from fractions import Fraction

from .expr import Add, Elem, Expr, Fn, Int, IntTo, Mul, Num, Par, Pow, Sym

PREC_ADD = 10
PREC_MUL = 20
PREC_NEG = 25
PREC_POW = 30
PREC_ATOM = 40


def _frac(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _wrap(text: str, prec: int, ctx: int) -> str:
    return f"({text})" if prec < ctx else text


def _split_den(e: Expr):
    """Split a product into (coefficient, numerator factors, denominator factors)."""
    factors = e.factors if isinstance(e, Mul) else (e,)
    coeff = Fraction(1)
    nums, dens = [], []
    for f in factors:
        if isinstance(f, Num):
            coeff *= f.value
        elif isinstance(f, Pow) and isinstance(f.exp, Num) and f.exp.value < 0:
            dens.append(f.base if f.exp.value == -1 else Pow(f.base, Num(-f.exp.value)))
        else:
            nums.append(f)
    return coeff, nums, dens


def _product(coeff: Fraction, nums, dens) -> tuple[str, int]:
    """Render a positive-coefficient product; returns (text, precedence)."""
    parts = []
    if coeff.numerator != 1 or not nums:
        parts.append(str(coeff.numerator))
    parts.extend(_r(f, PREC_MUL + 1) for f in nums)
    text = "*".join(parts)
    den_parts = []
    if coeff.denominator != 1:
        den_parts.append(str(coeff.denominator))
    den_parts.extend(_r(f, PREC_MUL + 1) for f in dens)
    if not den_parts:
        return text, (PREC_MUL if len(parts) > 1 else _atom_prec(nums, coeff))
    den = den_parts[0] if len(den_parts) == 1 else "(" + "*".join(den_parts) + ")"
    return f"{text}/{den}", PREC_MUL


def _atom_prec(nums, coeff) -> int:
    if nums and _prec(nums[0]) > PREC_MUL:
        return _prec(nums[0])
    return PREC_ATOM  # a lone factor of lower precedence was parenthesized above


def _prec(e: Expr) -> int:
    if isinstance(e, Add):
        return PREC_ADD
    if isinstance(e, Mul):
        return PREC_MUL
    if isinstance(e, Pow):
        return PREC_POW
    if isinstance(e, Num):
        return PREC_ATOM if e.value >= 0 and e.value.denominator == 1 else PREC_MUL
    return PREC_ATOM


def _term(e: Expr) -> tuple[bool, str, int]:
    """Render a term as (negative?, magnitude text, precedence)."""
    if isinstance(e, Num):
        v = e.value
        return v < 0, _frac(abs(v)), PREC_ATOM if abs(v).denominator == 1 else PREC_MUL
    if isinstance(e, (Mul, Pow)):
        coeff, nums, dens = _split_den(e)
        if dens or coeff != 1:
            text, prec = _product(abs(coeff), nums, dens)
            return coeff < 0, text, prec
    return False, _r(e, 0), _prec(e)


def _r(e: Expr, ctx: int) -> str:
    if isinstance(e, (Sym, Par)):
        return e.name
    if isinstance(e, Num):
        negative, text, prec = _term(e)
        if negative:
            return _wrap("-" + text, PREC_NEG, ctx)
        return _wrap(text, prec, ctx)
    if isinstance(e, Add):
        out = []
        for i, t in enumerate(e.terms):
            negative, text, prec = _term(t)
            if prec < PREC_MUL:
                text = f"({text})"
            if i == 0:
                out.append("-" + text if negative else text)
            else:
                out.append((" - " if negative else " + ") + text)
        return _wrap("".join(out), PREC_ADD, ctx)
    if isinstance(e, (Mul, Pow)):
        coeff, nums, dens = _split_den(e)
        if isinstance(e, Pow) and not dens:
            base = _r(e.base, PREC_POW + 1)
            ex = _r(e.exp, PREC_POW + 1)
            return _wrap(f"{base}^{ex}", PREC_POW, ctx)
        text, prec = _product(abs(coeff), nums, dens)
        if coeff < 0:
            return _wrap("-" + _wrap(text, PREC_NEG + 1, PREC_NEG + 1), PREC_NEG, ctx)
        return _wrap(text, prec, ctx)
    if isinstance(e, Elem):
        return f"{e.name}({_r(e.arg, 0)})"
    if isinstance(e, Fn):
        return f"{e.name}{chr(39) * e.order}({_r(e.arg, 0)})"
    if isinstance(e, Int):
        return f"Int({_r(e.integrand, 0)}, {e.var})"
    if isinstance(e, IntTo):
        return f"IntTo({_r(e.integrand, 0)}, {e.dummy}, {_r(e.upper, 0)})"
    raise TypeError(f"unknown node {type(e).__name__}")


def render(e: Expr) -> str:
    return _r(e, 0)
