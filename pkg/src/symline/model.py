"""Domain records shared by the pipeline stages."""
from __future__ import annotations

from dataclasses import dataclass, field

from .symcore import Expr, diff, is_zero, normalize, parse, poly_parts, render
from .symcore import expr as E

X, Y = "x", "y"


class PipelineError(Exception):
    """Base class for conditions that end one pipeline branch."""


class DegenerateThirdDerivative(PipelineError):
    """Psi_yyy vanishes: the ODE is linear or Riccati and takes the Riccati path."""


class DegenerateLinear(PipelineError):
    """Phi_yy vanishes: first-order linear ODE."""


class SingularTransform(PipelineError):
    pass


class PullbackNotLinear(PipelineError):
    pass


class DivisionDegenerate(PipelineError):
    pass


class NotRiccati(PipelineError):
    pass


class DegenerateBernoulli(PipelineError):
    pass


class ChiniDeferral(PipelineError):
    """Constant Chini invariant: the f=q formula has a vanishing denominator."""


class InvariantSolutionDegenerate(PipelineError):
    pass


class SolutionCheckFailed(PipelineError):
    pass


@dataclass(frozen=True)
class Ode:
    """y' = phi(x, y)."""

    phi: Expr
    params: frozenset = frozenset()
    funcs: frozenset = frozenset()

    @classmethod
    def parse(cls, rhs: str, params=(), funcs=()) -> "Ode":
        params, funcs = frozenset(params), frozenset(funcs)
        return cls(parse(rhs, params, funcs), params, funcs)

    def with_phi(self, phi: Expr) -> "Ode":
        return Ode(phi, self.params, self.funcs)

    def __str__(self):
        return f"y' = {render(self.phi)}"


@dataclass(frozen=True)
class LinearSymmetry:
    xi: Expr
    eta: Expr

    def __post_init__(self):
        if E.has(self.xi, Y):
            raise ValueError("xi must be free of y")

    @property
    def P(self) -> Expr:
        return normalize(diff(self.eta, Y))

    @property
    def Q(self) -> Expr:
        return normalize(E.sub(self.eta, E.mul(self.P, E.sym(Y))))

    def is_linear(self) -> bool:
        return poly_parts(self.eta, Y, 1) is not None

    def scaled(self, c: Expr) -> "LinearSymmetry":
        return LinearSymmetry(normalize(E.mul(c, self.xi)), normalize(E.mul(c, self.eta)))

    def as_dict(self) -> dict:
        return {"xi": render(self.xi), "eta": render(self.eta)}


def projectively_equal(s1: LinearSymmetry, s2: LinearSymmetry) -> bool:
    """Same generator up to a constant factor."""
    if not is_zero(E.sub(E.mul(s1.xi, s2.eta), E.mul(s2.xi, s1.eta))):
        return False
    ratio = s1.xi if not is_zero(s2.xi) else s1.eta
    den = s2.xi if not is_zero(s2.xi) else s2.eta
    r = E.div(ratio, den)
    return is_zero(diff(r, X)) and is_zero(diff(r, Y))


@dataclass(frozen=True)
class ImplicitSolution:
    """lhs(x, y) = C1"""

    lhs: Expr

    def __str__(self):
        return f"{render(self.lhs)} = C1"


@dataclass
class Classification:
    outcome: str
    ode: Ode
    case: str | None = None
    chain: list = field(default_factory=list)
    symmetry: LinearSymmetry | None = None
    solution: ImplicitSolution | None = None
    verified: dict = field(default_factory=dict)
    failed: str | None = None
    details: dict = field(default_factory=dict)
    riccati: dict | None = None
    verdicts: dict = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.symmetry is not None


OUTCOMES = (
    "FxQxDirect",
    "CaseAy0",
    "CaseAyy0",
    "CaseGeneral",
    "RiccatiStep1",
    "RiccatiStep2",
    "RiccatiStep3",
    "NotInClass",
    "DegenerateLinear",
    "DegenerateRiccatiPath",
    "Undecided",
    "Error",
)
