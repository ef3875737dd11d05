"""Problem files: declarations, one ODE statement, optional expectations.

    # general case
    param a
    func f, g
    ode: x*y' + a*y - f(x)*g(x^a*y) = 0
    expect.class: CaseGeneral
    expect.xi: x^(1-a)/f(x)
    expect.eta: -a*y/(x^a*f(x))
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .model import Ode
from .symcore import Expr, normalize, parse, poly_parts, render
from .symcore import expr as E
from .symcore.parser import YPRIME

EXPECT_KEYS = ("class", "xi", "eta", "solution")


class ProblemError(ValueError):
    pass


class NotAnODE(ProblemError):
    pass


class UnsupportedDegree(ProblemError):
    pass


@dataclass
class ProblemFile:
    statement: str
    params: tuple = ()
    funcs: tuple = ()
    expect: dict = field(default_factory=dict)
    name: str = ""

    @classmethod
    def parse_text(cls, text: str, name: str = "") -> "ProblemFile":
        params, funcs, expect, odes = [], [], {}, []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, _, rest = line.partition(" ")
            if head == "param":
                params += [p.strip() for p in rest.split(",") if p.strip()]
            elif head == "func":
                funcs += [f.strip() for f in rest.split(",") if f.strip()]
            elif line.startswith("ode:"):
                odes.append(line[4:].strip())
            elif line.startswith("expect."):
                key, _, value = line[7:].partition(":")
                if key.strip() not in EXPECT_KEYS:
                    raise ProblemError(f"line {lineno}: unknown expectation {key!r}")
                expect[key.strip()] = value.strip()
            else:
                raise ProblemError(f"line {lineno}: cannot read {line!r}")
        if len(odes) != 1:
            raise ProblemError(f"expected exactly one ode statement, found {len(odes)}")
        return cls(odes[0], tuple(params), tuple(funcs), expect, name)

    @classmethod
    def read(cls, path) -> "ProblemFile":
        path = Path(path)
        return cls.parse_text(path.read_text(encoding="utf-8"), path.name)

    def to_text(self, comment: str | None = None) -> str:
        lines = [f"# {comment}"] if comment else []
        if self.params:
            lines.append("param " + ", ".join(self.params))
        if self.funcs:
            lines.append("func " + ", ".join(self.funcs))
        lines.append(f"ode: {self.statement}")
        for key in EXPECT_KEYS:
            if key in self.expect:
                lines.append(f"expect.{key}: {self.expect[key]}")
        return "\n".join(lines) + "\n"

    def statement_expr(self) -> Expr:
        lhs, eq, rhs = self.statement.partition("=")
        if not eq:
            raise ProblemError("ode statement needs '='")
        kw = dict(params=self.params, funcs=self.funcs, allow_yprime=True)
        return E.sub(parse(lhs, **kw), parse(rhs, **kw))

    def branches(self) -> list[Ode]:
        return [Ode(phi, frozenset(self.params), frozenset(self.funcs)) for phi in solve_for_yprime(self.statement_expr())]

    def parse_expect(self, key: str) -> Expr:
        return parse(self.expect[key], self.params, self.funcs, symbols=("x", "y", "z"))


def solve_for_yprime(e: Expr) -> list[Expr]:
    """Solved forms y' = phi of a statement polynomial of degree 1 or 2 in y'."""
    if not E.has(e, YPRIME):
        raise NotAnODE("the statement does not contain y'")
    parts = poly_parts(e, YPRIME, 2)
    if parts is None:
        raise UnsupportedDegree("only statements of degree 1 or 2 in y' are supported")
    if len(parts) == 2:
        c0, c1 = parts
        return [normalize(E.neg(E.div(c0, c1)))]
    c0, c1, c2 = parts
    disc = normalize(E.sub(E.pow_(c1, 2), E.mul(4, c2, c0)))
    root = E.sqrt_(disc)
    two_c2 = E.mul(2, c2)
    return [normalize(E.div(E.add(E.neg(c1), sign * root), two_c2)) for sign in (1, -1)]


def render_ode(phi: Expr) -> str:
    return f"y' = {render(phi)}"
