"""Pratt parser for the expression grammar.

    expr    := expr ('+'|'-') expr | expr ('*'|'/') expr | expr '^' expr
             | '-' expr | '(' expr ')' | NUMBER | NAME | call
    call    := NAME "'"* '(' expr ')'              arbitrary function, primes = order
             | ELEM '(' expr ')'                   exp ln sqrt sin cos tan arctan
             | 'Int' '(' expr ',' NAME ')'
             | 'IntTo' '(' expr ',' NAME ',' expr ')'

``^`` is right associative; unary minus binds tighter than ``*`` and looser
than ``^``.  Juxtaposition is rejected.  ``y'`` is accepted only when the caller
parses an ODE statement.
"""
from __future__ import annotations

import re
from fractions import Fraction

from . import expr as E
from .expr import Expr

YPRIME = "y'"

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),']))")

_ELEM = {"exp", "ln", "sqrt", "sin", "cos", "tan", "arctan"}
_RESERVED = _ELEM | {"Int", "IntTo"}

_INFIX = {"+": (10, 11), "-": (10, 11), "*": (20, 21), "/": (20, 21), "^": (31, 30)}
_UNARY_BP = 25


class ParseError(ValueError):
    def __init__(self, message: str, position: int, expected=()):
        self.position = position
        self.expected = tuple(expected)
        hint = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at position {position}{hint}")


class UnknownIdentifier(ParseError):
    pass


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, params, funcs, symbols, allow_yprime):
        self.toks = _tokenize(text)
        self.i = 0
        self.params = frozenset(params)
        self.funcs = frozenset(funcs)
        self.symbols = set(symbols)
        self.allow_yprime = allow_yprime

    def peek(self):
        return self.toks[self.i]

    def advance(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.advance()
        if text != value:
            raise ParseError(f"unexpected {text or 'end of input'!r}", pos, [repr(value)])

    def parse(self) -> Expr:
        e = self.expr(0)
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", pos, ["operator", "end of input"])
        return e

    def expr(self, min_bp: int) -> Expr:
        lhs = self.prefix()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text in _INFIX:
                lbp, rbp = _INFIX[text]
                if lbp < min_bp:
                    break
                self.advance()
                rhs = self.expr(rbp)
                lhs = self.combine(text, lhs, rhs)
                continue
            if kind in ("num", "name") or text == "(":
                raise ParseError("juxtaposition is not allowed", pos, ["operator"])
            break
        return lhs

    @staticmethod
    def combine(op, a, b):
        if op == "+":
            return E.add(a, b)
        if op == "-":
            return E.sub(a, b)
        if op == "*":
            return E.mul(a, b)
        if op == "/":
            return E.div(a, b)
        return E.pow_(a, b)

    def prefix(self) -> Expr:
        kind, text, pos = self.advance()
        if kind == "num":
            return E.num(Fraction(text))
        if kind == "op" and text == "-":
            return E.neg(self.expr(_UNARY_BP))
        if kind == "op" and text == "+":
            return self.expr(_UNARY_BP)
        if kind == "op" and text == "(":
            e = self.expr(0)
            self.expect(")")
            return e
        if kind == "name":
            return self.name(text, pos)
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos, ["number", "name", "'('", "'-'"])

    def primes(self) -> int:
        n = 0
        while self.peek()[1] == "'":
            self.advance()
            n += 1
        return n

    def name(self, text: str, pos: int) -> Expr:
        if text in _RESERVED:
            self.expect("(")
            if text == "Int":
                integrand = self.expr(0)
                self.expect(",")
                var = self.bound_name()
                self.expect(")")
                return E.integral(integrand, var)
            if text == "IntTo":
                # the dummy is declared after the integrand; scan ahead for it
                dummy = self.lookahead_dummy()
                added = dummy not in self.symbols
                self.symbols.add(dummy)
                try:
                    integrand = self.expr(0)
                finally:
                    if added:
                        self.symbols.discard(dummy)
                self.expect(",")
                self.bound_name()
                self.expect(",")
                upper = self.expr(0)
                self.expect(")")
                return E.integral_to(integrand, dummy, upper)
            arg = self.expr(0)
            self.expect(")")
            return E.elem(text, arg)
        order = self.primes()
        if text in self.funcs:
            if self.peek()[1] != "(":
                raise ParseError(f"function {text} needs an argument", self.peek()[2], ["'('"])
            self.advance()
            arg = self.expr(0)
            self.expect(")")
            return E.fn(text, arg, order)
        if order:
            if text == "y" and order == 1 and self.allow_yprime:
                return E.sym(YPRIME)
            raise ParseError(f"derivative {text}{chr(39) * order} not allowed here", pos)
        if text in self.params:
            return E.par(text)
        if text in self.symbols:
            return E.sym(text)
        raise UnknownIdentifier(f"unknown identifier {text!r}", pos)

    def bound_name(self) -> str:
        kind, text, pos = self.advance()
        if kind != "name" or text in _RESERVED or text in self.params or text in self.funcs:
            raise ParseError(f"expected a variable name, got {text!r}", pos, ["variable"])
        return text

    def lookahead_dummy(self) -> str:
        depth = 0
        j = self.i
        while j < len(self.toks):
            kind, text, pos = self.toks[j]
            if text == "(":
                depth += 1
            elif text == ")":
                if depth == 0:
                    break
                depth -= 1
            elif text == "," and depth == 0:
                nk, nt, npos = self.toks[j + 1]
                if nk != "name":
                    raise ParseError("expected integration variable", npos, ["variable"])
                return nt
            j += 1
        raise ParseError("IntTo needs (integrand, dummy, upper)", self.toks[self.i][2], ["','"])


def parse(text: str, params=(), funcs=(), symbols=("x", "y"), allow_yprime: bool = False) -> Expr:
    """Parse ``text`` into a structurally canonical expression."""
    params = set(params)
    funcs = set(funcs)
    if params & funcs:
        raise ValueError(f"names declared as both parameter and function: {sorted(params & funcs)}")
    clash = (params | funcs) & (set(symbols) | _RESERVED)
    if clash:
        raise ValueError(f"reserved names cannot be declared: {sorted(clash)}")
    return _Parser(text, params, funcs, symbols, allow_yprime).parse()
