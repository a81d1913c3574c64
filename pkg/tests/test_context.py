import pytest

from e2p.context import (
    ApConstraint,
    ConstConstraint,
    ContextError,
    DomainDecl,
    EvidenceContext,
    EvidenceStructure,
    HypDecl,
    IncompatiblePattern,
    STRATIFICATION,
    check_wellformed,
    fresh_domain_var,
    fresh_evidence_var,
    subst_in_structure,
)
from e2p.syntax import parse_formula as pf
from e2p.syntax import parse_term as pt

Ctx = EvidenceContext.of


def test_wellformed_examples():
    assert check_wellformed(Ctx()) is None
    assert check_wellformed(Ctx(DomainDecl("d0"), HypDecl("v0", pf("P(d0)")))) is None


def test_stratification_breach():
    ctx = Ctx(
        DomainDecl("d0"),
        HypDecl("v1", pf("all z. P(z)")),
        HypDecl("v0", pf("P(d0)")),
        ApConstraint("v1", "d0", pt("v0")),
    )
    v = check_wellformed(ctx)
    assert v is not None and v.kind == STRATIFICATION


def test_stratified_constraint_is_fine():
    ctx = Ctx(
        DomainDecl("d0"),
        HypDecl("v0", pf("all z. P(z)")),
        HypDecl("v1", pf("P(d0)")),
        ApConstraint("v0", "d0", pt("v1")),
    )
    assert check_wellformed(ctx) is None


@pytest.mark.parametrize(
    "entries, kind",
    [
        ((HypDecl("v0", pf("P(d0)")),), "UndeclaredVariable"),
        ((HypDecl("v0", pf("A")), HypDecl("v0", pf("B"))), "DuplicateDeclaration"),
        ((HypDecl("v0", pf("A => B")), HypDecl("v1", pf("A"))) + (ConstConstraint("v0", pt("v1")),), "PatternTypeMismatch"),
        ((HypDecl("v0", pf("A => B")), HypDecl("v1", pf("B")), ConstConstraint("v0", pt("v1")), ConstConstraint("v0", pt("v1"))), "DuplicateConstraint"),
        ((HypDecl("v0", pf("~A")),), "NonMinimalType"),
    ],
)
def test_violation_kinds(entries, kind):
    v = check_wellformed(Ctx(*entries))
    assert v is not None and v.kind == kind


def test_fresh_variables():
    assert fresh_evidence_var(Ctx())[0] == "v0"
    assert fresh_evidence_var(Ctx(HypDecl("v0", pf("A")), HypDecl("v3", pf("B"))))[0] == "v4"
    assert fresh_domain_var(Ctx(DomainDecl("d1")))[0] == "d2"


def test_fresh_counter_advances():
    ctx = Ctx()
    a, ctx = ctx.fresh_evidence_var()
    b, ctx = ctx.fresh_evidence_var()
    assert (a, b) == ("v0", "v1")


def test_subst_decide_slot():
    ctx = Ctx(HypDecl("w", pf("B")), HypDecl("c", pf("A \\/ B")), HypDecl("u", pf("A")))
    s = EvidenceStructure(ctx, pf("A"), pt("decide(c; x. x; y. y)"))
    out = subst_in_structure(s, "c", pt("inl x0"))
    assert [e.name for e in out.context.entries] == ["w", "x0", "u"]
    assert out.context.type_of("x0") == pf("A")
    assert out.evidence == pt("decide(inl x0; x. x; y. y)")


def test_subst_pair_splices_both():
    s = EvidenceStructure(Ctx(HypDecl("p", pf("A /\\ B"))), pf("A"), pt("spread(p; a, b. a)"))
    out = subst_in_structure(s, "p", pt("<x0, y0>"))
    assert out.context.hyps() == [HypDecl("x0", pf("A")), HypDecl("y0", pf("B"))]


def test_subst_exists_declares_witness():
    s = EvidenceStructure(Ctx(HypDecl("e", pf("ex x. P(x)"))), pf("A"), pt("e"))
    out = subst_in_structure(s, "e", pt("<d0, v0>"))
    assert out.context.entries == (DomainDecl("d0"), HypDecl("v0", pf("P(d0)")))


def test_subst_absent_variable():
    s = EvidenceStructure(Ctx(HypDecl("v", pf("A"))), pf("A"), pt("w"))
    out = subst_in_structure(s, "v", pt("v9"))
    assert out.evidence == pt("w")
    assert out.context.hyps() == [HypDecl("v9", pf("A"))]


def test_subst_rewrites_constraint_bodies():
    ctx = Ctx(HypDecl("f", pf("A => B \\/ C")), HypDecl("v1", pf("B \\/ C")), ConstConstraint("f", pt("v1")))
    out = subst_in_structure(EvidenceStructure(ctx, pf("B"), pt("v1")), "v1", pt("inl v2"))
    assert out.context.const_constraint("f").body == pt("inl v2")
    assert check_wellformed(out.context) is None


def test_incompatible_pattern():
    s = EvidenceStructure(Ctx(HypDecl("v", pf("A /\\ B"))), pf("A"), pt("v"))
    with pytest.raises(IncompatiblePattern):
        subst_in_structure(s, "v", pt("inl x"))
    with pytest.raises(ContextError):
        subst_in_structure(s, "nope", pt("x"))


def test_structure_printing():
    s = EvidenceStructure(Ctx(DomainDecl("d0")), pf("P(d0)"), pt("v"))
    assert str(s) == "d0:D |= P(d0), v"
    assert str(EvidenceStructure(Ctx(), pf("A"), pt("v"))) == "|= A, v"
