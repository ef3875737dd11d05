"""Expression kernel: parsing, arithmetic, calculus, normalization and zero testing."""
from .calculus import diff, replace, substitute
from .expr import (
    ONE,
    ZERO,
    Add,
    Elem,
    Expr,
    Fn,
    Int,
    IntTo,
    Mul,
    Num,
    Par,
    Pow,
    Sym,
    add,
    div,
    exp_,
    fn,
    free_names,
    has,
    integral,
    integral_to,
    ln_,
    mul,
    neg,
    num,
    par,
    pow_,
    sqrt_,
    sub,
    sym,
)
from .integrate import integrate, integration_audit, is_closed
from .normal import expand, normalize, numer_denom
from .parser import ParseError, UnknownIdentifier, parse
from .probe import (
    Assignment,
    ProbeConfig,
    ProbeFailure,
    VerdictLog,
    ZeroVerdict,
    current_config,
    evaluate,
    is_zero,
    numeric_zero,
    probe_settings,
    random_assignment,
    recording,
    zero_test,
)
from .queries import is_free_of, poly_parts
from .render import render

X = sym("x")
Y = sym("y")
