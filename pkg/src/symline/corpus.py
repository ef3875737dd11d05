"""Seeded generators of class members (with ground truth) and negative controls.

Members come from the invariant family of a linear symmetry,

    y' = (f'/p) G(p y + q) - q'/p - (p'/p) y,

whose generator is xi = 1/f', eta = -(p' y + q')/(f' p) and whose solution is
f - Int^{p y + q} dz/G(z) = C.  Riccati members use G(u) = u^2 + a u + b with
f' = f/p, which gives y' = f y^2 + ... and the generator [p/f, -(p' y + q')/f].
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .model import X, Y, ImplicitSolution, LinearSymmetry, Ode
from .problem import ProblemFile
from .solve import verify_symmetry
from .symcore import Expr, diff, integrate, is_zero, normalize, render, substitute
from .symcore import expr as E

Z = "z"

# template -> case the pipeline should report when p is not constant
G_TEMPLATES = {
    "cubic": "CaseAyy0",
    "quartic": "CaseGeneral",
    "quintic": "CaseGeneral",
    "exp": "CaseAy0",
    "u+exp": "CaseAy0",
    "riccati": None,
}
RICCATI_FAMILIES = {"q'=0": "RiccatiStep1", "f=p": "RiccatiStep2", "q=p": "RiccatiStep2", "f=q": "RiccatiStep3"}


class DegenerateSpec(ValueError):
    pass


def _coef(rng: random.Random) -> int:
    return rng.choice([c for c in range(-5, 6) if c])


def rational_block(rng: random.Random, max_deg: int = 2, monomial_den: bool = False) -> Expr:
    """A small rational function of x with integer coefficients in [-5, 5] minus 0."""
    x = E.sym(X)
    degs = sorted(rng.sample(range(max_deg + 1), rng.randint(1, 2)))
    num = E.add(*(E.mul(_coef(rng), E.pow_(x, d)) for d in degs))
    kind = rng.random()
    if kind < 0.45:
        return normalize(num)
    if kind < 0.8 or monomial_den:
        return normalize(E.div(num, E.pow_(x, rng.randint(1, 2))))
    return normalize(E.div(num, E.add(x, rng.randint(1, 5))))


def _poly_G(rng: random.Random, deg: int) -> list[int]:
    coeffs = [rng.randint(-3, 3) for _ in range(deg)] + [_coef(rng)]
    coeffs[deg - 1] = coeffs[deg - 1] or 1
    return coeffs


def g_template(name: str, rng: random.Random, ab=None) -> Expr:
    """G as an expression in the variable z."""
    z = E.sym(Z)
    if name in ("cubic", "quartic", "quintic"):
        deg = {"cubic": 3, "quartic": 4, "quintic": 5}[name]
        return E.add(*(E.mul(c, E.pow_(z, k)) for k, c in enumerate(_poly_G(rng, deg))))
    if name == "exp":
        return E.mul(_coef(rng), E.exp_(z))
    if name == "u+exp":
        return E.add(z, E.exp_(z))
    if name == "riccati":
        a, b = ab if ab is not None else (rng.randint(-3, 3), rng.randint(-3, 3))
        return E.add(E.pow_(z, 2), E.mul(a, z), E.num(b))
    raise KeyError(name)


@dataclass
class GtsSpec:
    fprime: Expr
    p: Expr
    q: Expr
    G: Expr  # in the variable z
    template: str = "custom"
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def random(cls, seed: int, template: str | None = None, constant_p: bool = False) -> "GtsSpec":
        rng = random.Random(seed)
        template = template or rng.choice([t for t in G_TEMPLATES if t != "riccati"])
        fprime = rational_block(rng, 2, monomial_den=True)
        p = E.num(_coef(rng)) if constant_p else _nonconstant(rng)
        q = rational_block(rng, 2) if rng.random() < 0.8 else E.ZERO
        return cls(fprime, p, q, g_template(template, rng), template, seed)


def _nonconstant(rng: random.Random) -> Expr:
    while True:
        e = rational_block(rng, 2)
        if E.has(e, X):
            return e


@dataclass
class Member:
    ode: Ode
    symmetry: LinearSymmetry
    solution: ImplicitSolution
    expected: str | None
    spec: GtsSpec
    constants: tuple | None = None

    def problem(self, name: str = "") -> ProblemFile:
        expect = {"xi": render(self.symmetry.xi), "eta": render(self.symmetry.eta), "solution": render(self.solution.lhs)}
        if self.expected:
            expect["class"] = self.expected
        return ProblemFile(f"y' = {render(self.ode.phi)}", tuple(sorted(self.ode.params)),
                           tuple(sorted(self.ode.funcs)), expect, name)


def gts_phi(spec: GtsSpec) -> Expr:
    y = E.sym(Y)
    u = E.add(E.mul(spec.p, y), spec.q)
    G_u = substitute(spec.G, Z, u)
    return normalize(E.sub(E.div(E.mul(spec.fprime, G_u), spec.p),
                           E.div(E.add(diff(spec.q, X), E.mul(diff(spec.p, X), y)), spec.p)))


def gen_gts(spec: GtsSpec) -> Member:
    """ODE of the invariant family plus its known symmetry and solution."""
    if is_zero(spec.fprime) or is_zero(spec.p):
        raise DegenerateSpec("f' and p must be nonzero")
    phi = gts_phi(spec)
    psi_yyy = diff(diff(diff(phi, Y), Y), Y)
    riccati = spec.template == "riccati"
    if riccati != is_zero(psi_yyy):
        raise DegenerateSpec("Psi_yyy check failed for template " + spec.template)
    y = E.sym(Y)
    xi = normalize(E.pow_(spec.fprime, E.NEG_ONE))
    eta = normalize(E.neg(E.div(E.add(E.mul(diff(spec.p, X), y), diff(spec.q, X)), E.mul(spec.fprime, spec.p))))
    f = integrate(spec.fprime, X)
    u = normalize(E.add(E.mul(spec.p, y), spec.q))
    inner = integrate(E.pow_(spec.G, E.NEG_ONE), Z)
    if E.contains_integral(inner):
        tail = E.integral_to(E.pow_(spec.G, E.NEG_ONE), Z, u)
    else:
        tail = substitute(inner, Z, u)
    lhs = E.sub(f, tail)
    expected = G_TEMPLATES.get(spec.template)
    if not riccati and is_zero(diff(spec.p, X)):
        expected = "FxQxDirect"
    params = frozenset(E.free_names(phi) - {X, Y})
    return Member(Ode(phi, params), LinearSymmetry(xi, eta), ImplicitSolution(lhs), expected, spec)


def gts_member(seed: int, template: str | None = None, constant_p: bool = False) -> Member:
    """Retries nearby seeds until the spec is nondegenerate."""
    for k in range(50):
        try:
            return gen_gts(GtsSpec.random(seed * 1000 + k, template, constant_p))
        except DegenerateSpec:
            continue
    raise DegenerateSpec(f"no nondegenerate spec near seed {seed}")


def gen_riccati(family: str, seed: int) -> Member:
    """Member of one of the four Riccati families, with constants (a, b)."""
    if family not in RICCATI_FAMILIES:
        raise KeyError(family)
    for k in range(50):
        rng = random.Random(f"{family}:{seed}:{k}")
        f = rational_block(rng, 2)
        p = _nonconstant(rng)
        q = E.num(rng.randint(-4, 4)) if family == "q'=0" else _nonconstant(rng)
        if family == "f=p":
            f = p
        elif family == "q=p":
            q = p
        elif family == "f=q":
            f = q
        a, b = rng.randint(-3, 3), _coef(rng)
        if not E.has(p, X):
            continue
        spec = GtsSpec(normalize(E.div(f, p)), p, q, g_template("riccati", rng, (a, b)), "riccati", seed,
                       {"family": family, "f": f})
        try:
            m = gen_gts(spec)
        except DegenerateSpec:
            continue
        if is_zero(_f0(m.ode.phi)) or _overlaps(family, f, p, m.ode):
            continue
        m.expected = RICCATI_FAMILIES[family]
        m.constants = (a, b)
        return m
    raise DegenerateSpec(f"no nondegenerate {family} member for seed {seed}")


def _overlaps(family: str, f: Expr, p: Expr, ode: Ode) -> bool:
    """True when the instance also belongs to a family resolved at an earlier step."""
    if family == "q'=0":
        return False
    if family != "f=p" and not E.has(normalize(E.div(p, f)), X):
        return True
    from .riccati import extract_coeffs, invariants

    return is_zero(diff(invariants(extract_coeffs(ode)).chini, X))


def _f0(phi: Expr) -> Expr:
    return substitute(phi, Y, E.ZERO)


NONMEMBER_KINDS = ("abel", "riccati", "exp-square", "sine", "log-cubic")


def nonmember_kind(seed: int) -> str:
    return NONMEMBER_KINDS[seed % len(NONMEMBER_KINDS)]


def nonmember_expected(seed: int) -> str:
    return "DegenerateRiccatiPath" if nonmember_kind(seed) == "riccati" else "NotInClass"


def gen_nonmember(seed: int) -> Ode:
    """Negative control: an ODE built to have no linear symmetry."""
    rng = random.Random(f"nonmember:{seed}")
    kind = nonmember_kind(seed)
    x, y = E.sym(X), E.sym(Y)
    k, c = _coef(rng), _coef(rng)
    m, j = rng.randint(1, 3), rng.randint(1, 3)
    if kind == "abel":
        phi = E.add(E.pow_(y, 3), E.mul(k, E.pow_(x, m), y), E.mul(c, E.pow_(x, j)))
    elif kind == "riccati":
        phi = E.add(E.pow_(y, 2), E.mul(abs(k), E.pow_(x, m)))
    elif kind == "exp-square":
        phi = E.add(E.exp_(E.pow_(y, 2)), E.mul(k, E.pow_(x, m)))
    elif kind == "sine":
        phi = E.add(E.sin_(E.mul(k, x, y)), E.mul(c, E.pow_(x, m)))
    else:
        phi = E.add(E.mul(E.pow_(y, 3), E.add(1, E.mul(k, E.pow_(x, m), E.ln_(y)))), E.mul(c, E.pow_(x, j)))
    return Ode(normalize(phi))


def ground_truth_ok(m: Member) -> bool:
    return verify_symmetry(m.ode, m.symmetry.xi, m.symmetry.eta)
