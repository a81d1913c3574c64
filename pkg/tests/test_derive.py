import pytest

from e2p.context import DomainDecl, EvidenceContext, EvidenceStructure, HypDecl, check_wellformed
from e2p.derive import (
    NoRuleMatches,
    RuleId,
    StuckEvidence,
    apply_rule,
    derive,
    format_step,
    match_rule,
    prf_driver,
)
from e2p.eval import FuelExhaustedError
from e2p.proof import check_proof, node
from e2p.syntax import parse_formula as pf
from e2p.syntax import parse_proof
from e2p.syntax import parse_term as pt
from e2p.term import Var

from corpus import CLI, cli_formula, cli_term

Ctx = EvidenceContext.of
NONEX = cli_formula("nonex")


def S(ctx, goal, evd):
    return EvidenceStructure(ctx, pf(goal), pt(evd))


def test_match_examples():
    assert match_rule(S(Ctx(), "A => A", "\\x. x")) == RuleId.ImpLam
    mid = S(
        Ctx(HypDecl("h", pf("(ex x. P(x)) => bot")), DomainDecl("d0"), HypDecl("p", pf("P(d0)"))),
        "bot",
        "h <d0, p>",
    )
    assert match_rule(mid) == RuleId.ImpApply
    with pytest.raises(NoRuleMatches):
        match_rule(S(Ctx(HypDecl("v", pf("A"))), "A /\\ B", "inl v"))


@pytest.mark.parametrize(
    "goal, evd, rule",
    [
        ("A /\\ B", "<a, b>", RuleId.AndPair),
        ("ex x. P(x)", "<d0, p>", RuleId.ExPair),
        ("ex x. P(x)", "cbvpair(d0; p)", RuleId.ExValPair),
        ("A \\/ B", "inl a", RuleId.OrInl),
        ("A \\/ B", "inr b", RuleId.OrInr),
        ("all x. P(x)", "\\x. f x", RuleId.AllLam),
        ("A", "a", RuleId.VarAx),
        ("A", "decide(c; x. a; y. a)", RuleId.DecideR),
        ("A", "spread(q; x, y. x)", RuleId.AndSpread),
        ("A", "spread(e; x, y. a)", RuleId.ExSpread),
        ("P(d0)", "f d0", RuleId.AllApply),
        ("P(d0)", "cbv(f; d0)", RuleId.AllCbv),
    ],
)
def test_match_table(goal, evd, rule):
    ctx = Ctx(
        DomainDecl("d0"),
        HypDecl("a", pf("A")),
        HypDecl("b", pf("B")),
        HypDecl("p", pf("P(d0)")),
        HypDecl("c", pf("A \\/ B")),
        HypDecl("q", pf("A /\\ B")),
        HypDecl("e", pf("ex x. P(x)")),
        HypDecl("f", pf("all z. P(z)")),
    )
    assert match_rule(S(ctx, goal, evd)) == rule


def test_apply_implam():
    st = apply_rule(S(Ctx(), "((ex x. P(x)) => bot) => all x. P(x) => bot", "\\h x p. h <x, p>"), RuleId.ImpLam)
    (child,) = st.children
    # the bound variable is replaced by a fresh indexed hypothesis
    assert child.context.type_of("v0") == pf("(ex x. P(x)) => bot")
    assert child.goal == pf("all x. P(x) => bot")
    assert child.evidence == pt("\\x p. v0 <x, p>")
    assert st.proof_action == ("RightImp", ("v0",))


def test_apply_expair():
    st = apply_rule(S(Ctx(DomainDecl("d0"), HypDecl("p", pf("P(d0)"))), "ex x. P(x)", "<d0, p>"), RuleId.ExPair)
    assert st.children[0].evidence == pt("cbvpair(d0; p)")
    assert st.proof_action is None


def test_apply_allcbv():
    s = S(Ctx(HypDecl("f", pf("all z. P(z)")), DomainDecl("d0")), "P(d0)", "cbv(f; d0)")
    (child,) = apply_rule(s, RuleId.AllCbv).children
    assert isinstance(child.evidence, Var)
    w = child.evidence.name
    assert child.context.type_of(w) == pf("P(d0)")
    assert child.context.ap_constraint("f", "d0").body == Var(w)
    assert check_wellformed(child.context) is None


def test_identity_proof():
    res = prf_driver(pf("A => A"), pt("\\x. x"))
    assert res.proof.rules() == ["RightImp", "Axiom"]


def test_nonex_exact_tree():
    res = prf_driver(NONEX, cli_term("nonex"))
    expected = node(
        "RightImp", "v0",
        node("RightAll", "d0",
             node("RightImp", "v1",
                  node("LeftImp", "v0", "v2",
                       node("RightEx", "d0", node("Axiom", "v1")),
                       node("Axiom", "v2")))))
    assert res.proof == expected
    check_proof(NONEX, res.proof)


def test_nonex_trace_matches_golden():
    lines = []
    prf_driver(NONEX, cli_term("nonex"), on_step=lambda n, st: lines.append(format_step(n, st)))
    assert lines == (CLI / "nonex.trace").read_text().splitlines()


def test_maximal_element_theorem():
    goal = cli_formula("maximal")
    res = prf_driver(goal, cli_term("maximal"), fuel=100_000)
    check_proof(goal, res.proof)


@pytest.mark.parametrize("evd", ["\\x. x", "inl stuck", "inr stuck"])
def test_excluded_middle_fails(evd):
    with pytest.raises((NoRuleMatches, StuckEvidence)):
        prf_driver(pf("P \\/ (P => bot)"), pt(evd))


def test_stuck_evidence():
    with pytest.raises(StuckEvidence):
        prf_driver(pf("A"), pt("stuck"))


def test_diverging_evidence_exhausts_fuel():
    with pytest.raises(FuelExhaustedError):
        prf_driver(pf("A => A"), pt("(\\x. x x) (\\x. x x)"), fuel=1000)


def test_driver_rejects_bad_input():
    with pytest.raises(ValueError):
        prf_driver(pf("~A"), pt("\\x. x"))
    with pytest.raises(ValueError):
        prf_driver(pf("P(x)"), pt("a"))
    with pytest.raises(ValueError):
        prf_driver(pf("A => A"), pt("y"))


def test_at_most_two_children():
    for name in ["nonex", "maximal"]:
        sizes = []
        prf_driver(cli_formula(name), cli_term(name), on_step=lambda n, st: sizes.append(len(st.children)))
        assert sizes and max(sizes) <= 2


def test_invariant_checking_mode():
    res = derive(S(Ctx(), "((ex x. P(x)) => bot) => all x. P(x) => bot", "\\h x p. h <x, p>"), check_invariants=True)
    assert res.proof.size() == 7


def test_pre_normalize_mode():
    # a beta-redex under a lambda is removed before the driver starts
    res = prf_driver(pf("A => A"), pt("\\x. (\\y. y) x"), pre_normalize=True)
    assert res.violations == []
    assert res.proof.rules() == ["RightImp", "Axiom"]


def test_proof_output_parses():
    goal, tree = parse_proof("goal: A => A\n(RightImp v0\n  (Axiom v0))\n")
    assert prf_driver(goal, pt("\\x. x")).proof == tree
