import pytest

from symline.corpus import (
    G_TEMPLATES,
    NONMEMBER_KINDS,
    GtsSpec,
    gen_gts,
    gen_nonmember,
    gen_riccati,
    ground_truth_ok,
    gts_member,
    nonmember_expected,
)
from symline.problem import ProblemFile
from symline.solve import check_solution
from symline.symcore import render


@pytest.mark.parametrize("template", [t for t in G_TEMPLATES if t != "riccati"])
def test_members_carry_true_symmetry_and_solution(template):
    m = gts_member(3, template)
    assert ground_truth_ok(m)
    assert check_solution(m.ode, m.solution)
    assert m.expected == G_TEMPLATES[template]


def test_constant_p_is_fxqx():
    assert gts_member(4, "cubic", constant_p=True).expected == "FxQxDirect"


def test_generation_is_deterministic():
    assert render(gts_member(11).ode.phi) == render(gts_member(11).ode.phi)
    assert render(gen_riccati("f=q", 2).ode.phi) == render(gen_riccati("f=q", 2).ode.phi)


def test_member_problem_file_round_trip():
    m = gts_member(5, "quartic")
    pf = ProblemFile.parse_text(m.problem("m").to_text())
    assert pf.expect["class"] == "CaseGeneral"
    assert len(pf.branches()) == 1


@pytest.mark.parametrize("family", ["q'=0", "f=p", "q=p", "f=q"])
def test_riccati_members(family):
    m = gen_riccati(family, 1)
    assert ground_truth_ok(m) and m.constants is not None


def test_nonmember_kinds_cycle():
    kinds = {nonmember_expected(s) for s in range(len(NONMEMBER_KINDS))}
    assert kinds == {"NotInClass", "DegenerateRiccatiPath"}
    assert gen_nonmember(0) == gen_nonmember(0)


def test_riccati_template_needs_psi_yyy_zero():
    spec = GtsSpec.random(1, "cubic")
    spec.template = "riccati"
    from symline.corpus import DegenerateSpec

    with pytest.raises(DegenerateSpec):
        gen_gts(spec)
