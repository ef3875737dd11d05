"""Membership in the class of ODEs with a linear symmetry, and the reduction to [F, Q] form.

For y' = Psi(x, y) with Psi_yyy != 0 let A = Psi_yy/Psi_yyy.  Members map to an
ODE with an [F(x), Q(x)] symmetry by

* y = A u            when A_y = 0,
* u = ln A           when A_yy = 0 (A must be linear in y),
* y = u/p            otherwise, with I = A_yx/A_yy linear in y and
                     p = exp(Int I_y dx).

The symmetry found for the reduced ODE is pulled back to the original
variables and verified on the original ODE.
"""
from __future__ import annotations

from . import transform
from .fxqx import FxQxSymmetry, find_fxqx
from .model import X, Y, Classification, DegenerateLinear, DegenerateThirdDerivative, Ode, PipelineError
from .riccati import riccati_strategy
from .solve import attach
from .symcore import Expr, diff, integrate, integration_audit, is_zero, normalize, poly_parts, recording, render
from .symcore import expr as E
from .symcore.probe import ProbeFailure
from .symcore.queries import drop_var


class NotInClass(PipelineError):
    def __init__(self, condition: str, e: Expr | None = None):
        self.condition = condition
        self.expr = e
        tail = f": {render(e)}" if e is not None else ""
        super().__init__(f"{condition}{tail}")


def compute_A(ode: Ode) -> Expr:
    psi_yy = diff(diff(ode.phi, Y), Y)
    psi_yyy = diff(psi_yy, Y)
    if is_zero(psi_yyy):
        raise DegenerateThirdDerivative("Psi_yyy vanishes")
    return normalize(E.div(psi_yy, psi_yyy))


def case_of(A: Expr):
    """("CaseAy0", None), ("CaseAyy0", [c0, c1]) or ("CaseGeneral", None)."""
    A_y = diff(A, Y)
    if is_zero(A_y):
        return "CaseAy0", None
    if is_zero(diff(A_y, Y)):
        parts = poly_parts(A, Y, 1)
        if parts is None or len(parts) < 2:
            raise NotInClass("A_yy = 0 but A is not linear in y", A)
        return "CaseAyy0", [drop_var(c, Y) for c in parts]
    return "CaseGeneral", None


def compute_I(A: Expr) -> Expr:
    A_y = diff(A, Y)
    return normalize(E.div(diff(A_y, X), diff(A_y, Y)))


def compute_p(I: Expr) -> Expr:
    parts = poly_parts(I, Y, 1)
    if parts is None:
        raise NotInClass("I = A_yx/A_yy is not linear in y", I)
    c1 = drop_var(parts[1], Y) if len(parts) > 1 else E.ZERO
    return normalize(E.exp_(integrate(c1, X, site="classify:p")))


def reduce(ode: Ode, case: str, payload=None, A: Expr | None = None):
    """(reduced ODE, transform) for the given case."""
    if case == "CaseAy0":
        tr = transform.scaling(drop_var(A, Y))
    elif case == "CaseAyy0":
        tr = transform.log_map(A, payload)
    else:
        tr = transform.linear(payload)
    return tr.apply(ode), tr


def pullback_symmetry(sym, tr: transform.Transform):
    return tr.pullback(sym)


def find_linear_symmetry(ode: Ode, with_solution: bool = True) -> Classification:
    """Run the full decision procedure; errors end up in the record, never raised."""
    with recording() as log, integration_audit() as sites:
        try:
            cls = _pipeline(ode, with_solution)
        except ProbeFailure as exc:
            cls = Classification("Undecided", ode, failed=f"ProbeFailure: {exc}")
        except PipelineError as exc:
            cls = Classification("Error", ode, failed=f"{type(exc).__name__}: {exc}")
    cls.verdicts = log.as_dict()
    cls.details["integrate_call_sites"] = list(sites)
    return cls


def _pipeline(ode: Ode, with_solution: bool) -> Classification:
    phi = ode.phi
    if is_zero(diff(diff(phi, Y), Y)):
        return Classification("DegenerateLinear", ode, failed="phi is linear in y")
    details = {}
    direct = find_fxqx(phi)
    if isinstance(direct, FxQxSymmetry):
        cls = Classification("FxQxDirect", ode, case="FxQxDirect", details={"fxqx_route": direct.route})
        return attach(cls, direct.as_symmetry(), with_solution)
    details["fxqx_direct"] = str(direct)

    try:
        A = compute_A(ode)
    except DegenerateThirdDerivative:
        cls = riccati_strategy(ode, with_solution)
        cls.details = {**details, **cls.details}
        return cls
    details["A"] = render(A)
    try:
        case, payload = case_of(A)
        if case == "CaseGeneral":
            I = compute_I(A)
            details["I"] = render(I)
            payload = compute_p(I)
            details["p"] = render(payload)
        reduced, tr = reduce(ode, case, payload, A)
    except NotInClass as exc:
        return Classification("NotInClass", ode, failed=str(exc), details=details)
    details["reduced"] = render(reduced.phi)
    try:
        r = find_fxqx(reduced.phi)
    except DegenerateLinear:
        return Classification("DegenerateLinear", ode, case=case, chain=[tr], details=details,
                              failed="reduced ODE is linear: only xi = 0 symmetries")
    if not isinstance(r, FxQxSymmetry):
        return Classification("NotInClass", ode, case=case, chain=[tr], details=details, failed=f"reduced ODE: {r}")
    details["reduced_symmetry"] = r.as_symmetry().as_dict()
    sym = pullback_symmetry(r.as_symmetry(), tr)
    cls = Classification(case, ode, case=case, chain=[tr], details=details)
    return attach(cls, sym, with_solution)
