import itertools

import pytest

from e2p.context import ApConstraint, ConstConstraint, DomainDecl, EvidenceContext, HypDecl
from e2p.semantics import (
    AtomToken,
    Elem,
    FinitaryStructure,
    Membership,
    VPair,
    VStar,
    Verdict,
    build_context_model,
    cardinality,
    check_membership,
    check_uniform_validity_sample,
    eval_formula,
    m_triv,
    structure_from_spec,
    structures,
)
from e2p.syntax import parse_formula as pf
from e2p.syntax import parse_structure
from e2p.syntax import parse_term as pt

from corpus import cli_formula, cli_term


def tokens(n):
    return tuple(AtomToken(i) for i in range(n))


def test_product_of_singletons():
    m = FinitaryStructure(1, {("P", ()): (VStar(),)})
    assert eval_formula(m, pf("P /\\ P")) == [VPair(VStar(), VStar())]


def test_forall_single_table():
    m = FinitaryStructure(2)
    assert len(eval_formula(m, pf("all x. P(x)"))) == 1


def test_sum_of_empties():
    m = FinitaryStructure(1, {("A", ()): ()})
    assert eval_formula(m, pf("False \\/ A")) == []


def test_function_space_brute_force():
    m = FinitaryStructure(1, {("A", ()): tokens(2), ("B", ()): tokens(3)})
    tables = eval_formula(m, pf("A => B"))
    # every assignment of a B-token to each A-token, enumerated independently
    expected = {tuple(zip(tokens(2), img)) for img in itertools.product(tokens(3), repeat=2)}
    assert {t.graph for t in tables} == expected
    assert len(tables) == cardinality(m, pf("A => B")) == 9


def test_cardinality_cap_saturates():
    m = FinitaryStructure(2, {}, tokens(2))
    phi = pf("((A => A) => A) => A")
    assert cardinality(m, phi) == 2 ** (2 ** (2**2))
    assert cardinality(m, phi, cap=1000) == 1000


def test_identity_member_everywhere():
    for m in structures({"A": 0}, 2, 2):
        assert check_membership(m, pt("\\x. x"), pf("A => A")) is Membership.MEMBER


def test_shape_clash_not_member():
    m = FinitaryStructure(1)
    assert check_membership(m, pt("inl (\\x. x)"), pf("A /\\ B")) is Membership.NOT_MEMBER


def test_nonex_realizer_member():
    phi, t = cli_formula("nonex"), cli_term("nonex")
    for m in structures({"P": 1, "bot": 0}, 2, 2):
        assert check_membership(m, t, phi) is Membership.MEMBER


def test_diverging_term_is_inconclusive_or_rejected():
    m = FinitaryStructure(1)
    res = check_membership(m, pt("(\\x. x x) (\\x. x x)"), pf("A => A"), fuel=500)
    assert res is Membership.INCONCLUSIVE


def test_m_triv_environment():
    m = m_triv(["d0", "d1"], 2)
    assert m.environment == {"d0": Elem(0), "d1": Elem(1)}
    assert eval_formula(m_triv([], 1), pf("P => (Q => bot) => bot"))


def test_m_triv_empty_with_false():
    assert eval_formula(m_triv([], 1), pf("P => False")) == []


def test_empty_context_model():
    m = build_context_model(EvidenceContext(), 1)
    assert m.domain_size == 1 and dict(m.environment) == {}


def test_context_model_ap_constraint():
    ctx = EvidenceContext.of(
        DomainDecl("d0"),
        HypDecl("f", pf("all z. P(z)")),
        HypDecl("w", pf("P(d0)")),
        ApConstraint("f", "d0", pt("w")),
    )
    m = build_context_model(ctx)
    env = m.environment
    assert env["f"].lookup(env["d0"]) == env["w"]


def test_context_model_const_constraint():
    ctx = EvidenceContext.of(
        HypDecl("v0", pf("A => B")),
        HypDecl("v1", pf("B")),
        ConstConstraint("v0", pt("v1")),
    )
    env = build_context_model(ctx).environment
    assert all(b == env["v1"] for _, b in env["v0"].graph)


def test_sampling_identity():
    assert check_uniform_validity_sample(pf("A => A"), pt("\\x. x"), 2, 2, 1000).verdict is Verdict.ALL_MEMBER


def test_sampling_refutes_inl():
    res = check_uniform_validity_sample(pf("P \\/ (P => bot)"), pt("inl (\\x. x)"), 1, 2, 1000)
    assert res.verdict is Verdict.COUNTEREXAMPLE
    assert res.structure.atom("P", ()) == ()


def test_sampling_refutes_diagonal_witness():
    res = check_uniform_validity_sample(pf("all x. ex y. R(x, y)"), pt("\\d. cbvpair(d; \\z. z)"), 2, 2, 1000)
    assert res.verdict is Verdict.COUNTEREXAMPLE
    m = res.structure
    assert any(m.atom("R", (d, d)) == () for d in range(m.domain_size))


def test_structure_from_spec_defaults():
    m = structure_from_spec(parse_structure("domain=2; P=[0,2]"), {"P": 1, "Q": 0})
    assert len(m.atom("P", (0,))) == 0 and len(m.atom("P", (1,))) == 2
    assert len(m.atom("Q", ())) == 1


def test_structure_from_spec_checks_table_length():
    with pytest.raises(ValueError):
        structure_from_spec(parse_structure("domain=2; P=[0]"), {"P": 1})
