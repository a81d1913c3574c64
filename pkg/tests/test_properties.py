"""Property-based checks over generated terms, formulas and driver runs."""

import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from e2p import formula as F
from e2p import term as T
from e2p.context import check_wellformed
from e2p.derive import prf_driver
from e2p.eval import Budget, FuelExhaustedError, classify, is_normal, normalize, step
from e2p.friedman import false_instantiation_equivalence
from e2p.proof import INTUITIONISTIC, check_proof, extract
from e2p.semantics import FinitaryStructure, AtomToken, TooLarge, build_context_model, cardinality, eval_formula
from e2p.syntax import format_formula, format_term, parse_formula, parse_term

from corpus import corpus, random_formula, random_signature

NAMES = st.sampled_from(["a", "b", "f", "x", "y"])


def _terms(children):
    return st.one_of(
        st.builds(T.Pair, children, children),
        st.builds(T.Inl, children),
        st.builds(T.Inr, children),
        st.builds(T.Lam, NAMES, children),
        st.builds(T.Ap, children, children),
        st.builds(T.Spread, children, NAMES, NAMES, children),
        st.builds(T.Decide, children, NAMES, children, NAMES, children),
        st.builds(T.CbvAp, children, children),
        st.builds(T.CbvPair, children, children),
    )


terms = st.recursive(st.one_of(st.builds(T.Var, NAMES), st.just(T.Stuck())), _terms, max_leaves=12)

patterns = st.recursive(
    st.builds(T.Var, st.sampled_from(["p0", "p1", "p2"])),
    lambda c: st.one_of(st.builds(T.Pair, c, c), st.builds(T.Inl, c), st.builds(T.Inr, c)),
    max_leaves=4,
)

ATOMS = st.sampled_from([F.Atom("A"), F.Atom("B"), F.Atom("R", ("x",))])


def _formulas(children):
    return st.one_of(
        st.builds(F.And, children, children),
        st.builds(F.Or, children, children),
        st.builds(F.Imp, children, children),
        st.builds(F.All, st.just("x"), children),
        st.builds(F.Ex, st.just("x"), children),
    )


formulas = st.recursive(st.one_of(ATOMS, st.just(F.FalseC())), _formulas, max_leaves=6)


@given(terms, NAMES)
def test_subst_var_for_itself(t, v):
    assert T.alpha_equal(T.subst_term(t, v, T.Var(v)), t)


@given(terms)
def test_principal_hole_reassembles(t):
    sub, hole = T.principal_subterm(t)
    assert hole.plug(t, sub) == t
    assert T.principal_index(sub) is None


@given(terms)
def test_progress(t):
    # a term either steps, is a value, is blocked on a variable, or is stuck
    if step(t) is None:
        classify(t)
    else:
        assert step(t) == step(t)


@given(terms)
def test_normalize_idempotent(t):
    try:
        n = normalize(t, 500)
    except FuelExhaustedError:
        assume(False)
    assert is_normal(n)
    assert normalize(n, 1) == n


@given(terms, st.sampled_from(["a", "b", "f"]), patterns)
def test_pattern_substitution_is_cheap(t, v, p):
    try:
        n = normalize(t, 500)
    except FuelExhaustedError:
        assume(False)
    assume(not set(T.free_vars(p)) & T.all_names(n))
    normalize(T.subst_term(n, v, p), Budget(T.size(n) * T.size(p) + T.size(n)))


@given(terms)
def test_term_roundtrip(t):
    assert parse_term(format_term(t)) == t


@given(formulas)
def test_formula_roundtrip(phi):
    assert parse_formula(format_formula(phi)) == phi


@given(formulas, st.integers(1, 2), st.lists(st.integers(0, 2), min_size=4, max_size=4))
def test_cardinality_matches_enumeration(phi, k, cards):
    phi = F.All("x", phi) if "x" in F.free_vars(phi) else phi
    atoms = {("A", ()): cards[0], ("B", ()): cards[1]}
    for i in range(k):
        atoms[("R", (i,))] = cards[2 + i]
    m = FinitaryStructure(k, {key: tuple(AtomToken(j) for j in range(c)) for key, c in atoms.items()}, ())
    try:
        got = eval_formula(m, phi)
    except TooLarge:
        assume(False)
    assert len(got) == cardinality(m, phi)
    assert len(set(got)) == len(got)


def test_false_instantiation_random(seed):
    rng = random.Random(seed)
    for _ in range(60):
        phi = random_formula(rng, 5, random_signature(rng), with_false=True)
        back, forth = false_instantiation_equivalence(phi)
        t = F.replace_atom(F.a_translate(phi, F.Atom("A")), "A", F.FalseC())
        check_proof(F.Imp(t, phi), back, INTUITIONISTIC)
        check_proof(F.Imp(phi, t), forth, INTUITIONISTIC)


@pytest.mark.parametrize("name, goal, proof", corpus(), ids=lambda x: x if isinstance(x, str) else "")
def test_driver_contexts_wellformed_and_modelled(name, goal, proof):
    seen = []
    res = prf_driver(goal, extract(proof, goal), check_invariants=True,
                     on_step=lambda n, s: seen.extend(c.context for c in s.children))
    check_proof(goal, res.proof)
    for ctx in seen:
        assert check_wellformed(ctx) is None
        build_context_model(ctx)
