"""Numeric probing and the hybrid zero test.

A zero test first normalizes; a zero numerator settles the question
symbolically.  Otherwise the expression is evaluated at random real points.
A single clearly nonzero value is a witness (the expression is not identically
zero); agreement with zero at every one of ``probes`` points is a
probabilistic verdict and is flagged as such.
"""
from __future__ import annotations

import contextvars
import math
import random
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field, replace

from . import expr as E
from .expr import Add, Elem, Expr, Fn, Int, IntTo, Mul, Num, Par, Pow, Sym
from .normal import normalize

SINGULAR = 1e-8
INT_BASE = 1.0


class ProbeFailure(RuntimeError):
    """Not enough valid probe points could be found."""


class InvalidPoint(ArithmeticError):
    pass


@dataclass(frozen=True)
class ProbeConfig:
    probes: int = 8
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    seed: int = 0
    attempts: int = 12  # per requested probe


_config: contextvars.ContextVar[ProbeConfig] = contextvars.ContextVar("probe_config", default=ProbeConfig())


def current_config() -> ProbeConfig:
    return _config.get()


@contextmanager
def probe_settings(config: ProbeConfig | None = None, **changes):
    cfg = replace(config or _config.get(), **changes)
    token = _config.set(cfg)
    try:
        yield cfg
    finally:
        _config.reset(token)


# ---------------------------------------------------------------- verdict log


@dataclass
class VerdictLog:
    symbolic: int = 0
    witness: int = 0
    probabilistic: int = 0
    zero_exprs: list = field(default_factory=list)  # symbolically decided zeros
    nonzero_exprs: list = field(default_factory=list)  # symbolically decided nonzeros
    keep: int = 2000

    def note(self, method: str, e: Expr | None = None, zero: bool = True):
        setattr(self, method, getattr(self, method) + 1)
        if method == "symbolic" and e is not None:
            bucket = self.zero_exprs if zero else self.nonzero_exprs
            if len(bucket) < self.keep:
                bucket.append(e)

    def as_dict(self) -> dict:
        return {"symbolic": self.symbolic, "witness": self.witness, "probabilistic": self.probabilistic}


_log: contextvars.ContextVar[VerdictLog | None] = contextvars.ContextVar("verdict_log", default=None)


@contextmanager
def recording():
    """Collect every zero-test verdict issued inside the block."""
    log = VerdictLog()
    outer = _log.get()
    token = _log.set(log)
    try:
        yield log
    finally:
        _log.reset(token)
        if outer is not None:
            outer.symbolic += log.symbolic
            outer.witness += log.witness
            outer.probabilistic += log.probabilistic
            outer.zero_exprs.extend(log.zero_exprs[: max(0, outer.keep - len(outer.zero_exprs))])
            outer.nonzero_exprs.extend(log.nonzero_exprs[: max(0, outer.keep - len(outer.nonzero_exprs))])


def note_verdict(method: str, e: Expr | None = None, zero: bool = True):
    log = _log.get()
    if log is not None:
        log.note(method, e, zero)


# ---------------------------------------------------------------- assignments


@dataclass(frozen=True)
class FnInstance:
    """c0 + c1 z + c2 z^2 + c3 z^3 + c4 exp(c5 z)"""

    c: tuple

    def __call__(self, z: float, order: int = 0) -> float:
        c0, c1, c2, c3, c4, c5 = self.c
        poly = (c0, c1, c2, c3)
        for _ in range(order):
            poly = tuple(k * poly[k] for k in range(1, len(poly))) + (0.0,)
        val = poly[0] + z * (poly[1] + z * (poly[2] + z * poly[3]))
        return val + c4 * c5**order * math.exp(c5 * z)

    def magnitude(self, z: float, order: int = 0) -> float:
        """The same sum with every term taken in absolute value."""
        c0, c1, c2, c3, c4, c5 = self.c
        poly = (c0, c1, c2, c3)
        for _ in range(order):
            poly = tuple(k * poly[k] for k in range(1, len(poly))) + (0.0,)
        return sum(abs(c * z**k) for k, c in enumerate(poly)) + abs(c4 * c5**order * math.exp(c5 * z))


@dataclass(frozen=True)
class Assignment:
    values: dict
    funcs: dict
    seed: int


def _nonzero(rng: random.Random, lo: float, hi: float, gap: float) -> float:
    while True:
        v = rng.uniform(lo, hi)
        if abs(v) >= gap:
            return v


def leaves(e: Expr) -> tuple[set, set, set]:
    """(symbol names, parameter names, function names) occurring free in ``e``."""
    syms, pars, fns = set(), set(), set()
    bound: list = []

    def walk(n, bound_names):
        if isinstance(n, Sym):
            if n.name not in bound_names:
                syms.add(n.name)
        elif isinstance(n, Par):
            pars.add(n.name)
        elif isinstance(n, IntTo):
            walk(n.integrand, bound_names | {n.dummy})
            walk(n.upper, bound_names)
        elif isinstance(n, Int):
            syms.add(n.var)
            walk(n.integrand, bound_names)
        else:
            if isinstance(n, Fn):
                fns.add(n.name)
            for c in E.children(n):
                walk(c, bound_names)

    walk(e, frozenset(bound))
    return syms, pars, fns


def random_assignment(syms, pars, fns, seed: int) -> Assignment:
    rng = random.Random(seed)
    values = {}
    for s in sorted(syms):
        if s in E.POSITIVE_SYMBOLS:
            values[s] = rng.uniform(0.5, 2.5)
        else:
            values[s] = _nonzero(rng, -2.5, 2.5, 0.1)
    for p in sorted(pars):
        while True:
            v = _nonzero(rng, -3.0, 3.0, 0.1)
            if abs(v - round(v)) > 0.05:
                break
        values[p] = v
    funcs = {}
    for f in sorted(fns):
        c = [_nonzero(rng, -2.0, 2.0, 0.2) for _ in range(5)]
        c.append(_nonzero(rng, -1.0, 1.0, 0.1))
        funcs[f] = FnInstance(tuple(c))
    return Assignment(values, funcs, seed)


# ---------------------------------------------------------------- evaluation


class _Evaluator:
    """Value plus an error magnitude m: rounding error is about eps * m.

    m follows the usual running error analysis: absolute magnitudes add over
    sums, relative condition numbers add over products and powers, and kernels
    scale the magnitude of their argument by their derivative.
    """

    def __init__(self, assignment: Assignment):
        self.a = assignment
        self.memo: dict = {}

    def __call__(self, e: Expr) -> tuple[float, float]:
        hit = self.memo.get(e)
        if hit is not None:
            return hit
        v, m = self._eval(e)
        if isinstance(v, complex) or math.isnan(v) or math.isinf(v) or math.isinf(m):
            raise InvalidPoint("non-finite or complex value")
        self.memo[e] = v, m
        return v, m

    def _eval(self, e: Expr) -> tuple[float, float]:
        if isinstance(e, Num):
            v = float(e.value)
            return v, abs(v)
        if isinstance(e, (Sym, Par)):
            try:
                v = self.a.values[e.name]
            except KeyError:
                raise InvalidPoint(f"no value for {e.name}") from None
            return v, abs(v)
        if isinstance(e, Add):
            parts = [self(t) for t in e.terms]
            return math.fsum(v for v, _ in parts), math.fsum(m for _, m in parts)
        if isinstance(e, Mul):
            parts = [self(f) for f in e.factors]
            out = 1.0
            for v, _ in parts:
                out *= v
            if any(v == 0 for v, _ in parts):
                return out, math.prod(m for _, m in parts)
            return out, abs(out) * (1 + math.fsum(m / abs(v) for v, m in parts))
        if isinstance(e, Pow):
            (b, mb), (k, mk) = self(e.base), self(e.exp)
            if k < 0 and abs(b) < SINGULAR:
                raise InvalidPoint("division by a tiny value")
            if b < 0 and not float(k).is_integer():
                raise InvalidPoint("negative base with fractional exponent")
            try:
                v = b**k
            except (OverflowError, ZeroDivisionError) as exc:
                raise InvalidPoint(str(exc)) from None
            if b == 0:
                return v, abs(v)
            cond = 1 + abs(k) * mb / abs(b) + abs(math.log(abs(b))) * mk
            return v, abs(v) * cond
        if isinstance(e, Elem):
            w, mw = self(e.arg)
            try:
                if e.name == "exp":
                    v = math.exp(w)
                    return v, v * (1 + mw)
                if e.name == "ln":
                    if w < SINGULAR:
                        raise InvalidPoint("log of a non-positive value")
                    v = math.log(w)
                    return v, abs(v) + mw / w
                if e.name == "tan" and abs(math.cos(w)) < SINGULAR:
                    raise InvalidPoint("tan pole")
                v = getattr(math, {"arctan": "atan"}.get(e.name, e.name))(w)
            except (OverflowError, ValueError) as exc:
                raise InvalidPoint(str(exc)) from None
            return v, abs(v) + _slope(e.name, w, v) * mw
        if isinstance(e, Fn):
            inst = self.a.funcs.get(e.name)
            if inst is None:
                raise InvalidPoint(f"no instance for {e.name}")
            w, mw = self(e.arg)
            try:
                v = inst(w, e.order)
                return v, inst.magnitude(w, e.order) + abs(inst(w, e.order + 1)) * mw
            except OverflowError as exc:
                raise InvalidPoint(str(exc)) from None
        if isinstance(e, Int):
            upper = self.a.values[e.var]
            return self._quad(e.integrand, e.var, upper, abs(upper))
        if isinstance(e, IntTo):
            upper, mu = self(e.upper)
            return self._quad(e.integrand, e.dummy, upper, mu)
        raise TypeError(f"cannot evaluate {type(e).__name__}")

    def _quad(self, h: Expr, var: str, upper: float, mu: float) -> tuple[float, float]:
        from scipy.integrate import IntegrationWarning, quad

        def f(s):
            values = dict(self.a.values)
            values[var] = s
            return _Evaluator(Assignment(values, self.a.funcs, self.a.seed))(h)

        with warnings.catch_warnings():
            warnings.simplefilter("error", IntegrationWarning)
            try:
                val, err = quad(lambda s: f(s)[0], INT_BASE, upper, limit=200)
                mag, _ = quad(lambda s: f(s)[1], INT_BASE, upper, limit=200)
                edge = abs(f(upper)[0])
            except (IntegrationWarning, InvalidPoint) as exc:
                raise InvalidPoint(f"quadrature failed: {exc}") from None
        return val, abs(mag) + err / EPS + edge * mu


EPS = 2.0**-52


def _slope(name: str, w: float, v: float) -> float:
    """|d kernel / d w| at w."""
    if name == "sin":
        return abs(math.cos(w))
    if name == "cos":
        return abs(math.sin(w))
    if name == "tan":
        return 1 + v * v
    if name == "arctan":
        return 1 / (1 + w * w)
    if name == "sqrt":
        return 0.5 / v if v else 0.0
    return abs(v) + 1


def evaluate(e: Expr, assignment: Assignment) -> tuple[float, float]:
    """Value of ``e`` at the point and its rounding-error magnitude."""
    return _Evaluator(assignment)(e)


def probe_points(e: Expr, probes: int, seed: int, attempts: int = 12):
    """Yield (value, magnitude) at ``probes`` valid random points."""
    syms, pars, fns = leaves(e)
    found = 0
    for i in range(probes * attempts):
        a = random_assignment(syms, pars, fns, seed * 7919 + i)
        try:
            yield evaluate(e, a)
        except InvalidPoint:
            continue
        found += 1
        if found == probes:
            return
    raise ProbeFailure(f"only {found} of {probes} valid probe points for {e}")


def numeric_zero(e: Expr, config: ProbeConfig | None = None) -> bool:
    """Purely numeric verdict (no normalization)."""
    cfg = config or _config.get()
    for v, big in probe_points(e, cfg.probes, cfg.seed, cfg.attempts):
        if abs(v) > cfg.abs_tol + cfg.rel_tol * big:
            return False
    return True


# ---------------------------------------------------------------- zero test


@dataclass(frozen=True)
class ZeroVerdict:
    zero: bool
    method: str  # "symbolic", "witness" or "probabilistic"

    def __bool__(self):
        return self.zero


def _purely_rational(e: Expr) -> bool:
    return all(isinstance(n, (Num, Sym, Par, Add, Mul)) or (isinstance(n, Pow) and E.is_integer(n.exp))
               for n in E.subexpressions(e))


def _denominator_symbols(e: Expr) -> set:
    """Symbols under a negative power; exponents with at most one are canonical."""
    out = set()
    for n in E.subexpressions(e):
        if isinstance(n, Pow) and isinstance(n.exp, Num) and n.exp.value < 0:
            out |= {v.name for v in E.subexpressions(n.base) if isinstance(v, Sym)}
    return out


def _exp_rational(e: Expr) -> bool:
    """Rational in symbols and in exponentials of rational exponents.

    After normalization such kernels are algebraically independent over the
    rational functions, so a nonzero normal form is a nonzero function.
    """
    for n in E.subexpressions(e):
        if isinstance(n, Elem):
            if n.name != "exp" or not _purely_rational(n.arg) or len(_denominator_symbols(n.arg)) > 1:
                return False
        elif not (isinstance(n, (Num, Sym, Par, Add, Mul)) or (isinstance(n, Pow) and E.is_integer(n.exp))):
            return False
    return True


def zero_test(e: Expr) -> ZeroVerdict:
    cfg = _config.get()
    n = normalize(E.as_expr(e))
    if n == E.ZERO:
        note_verdict("symbolic", e)
        return ZeroVerdict(True, "symbolic")
    if _exp_rational(n):
        note_verdict("symbolic", e, zero=False)
        return ZeroVerdict(False, "symbolic")
    # only the numerator matters once normalized
    from .normal import numer_denom

    num, _ = numer_denom(n)
    if numeric_zero(num, cfg):
        note_verdict("probabilistic")
        return ZeroVerdict(True, "probabilistic")
    note_verdict("witness")
    return ZeroVerdict(False, "witness")


def is_zero(e: Expr) -> bool:
    return zero_test(e).zero
