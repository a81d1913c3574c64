"""Turning evidence into proofs: the sixteen derivation rules and the driver.

Each step looks at an evidence structure ``H |= G, evd`` whose evidence has
been computed to a canonical form or to a term with a principal variable,
picks the one rule that fits, and produces one or two smaller structures.
Most rules also emit one sequent-calculus inference; the proof is assembled
from those on the way back up.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

from . import formula as F
from .context import (
    ApConstraint,
    ConstConstraint,
    DomainDecl,
    EvidenceContext,
    EvidenceStructure,
    HypDecl,
    assert_wellformed,
    subst_in_structure,
)
from .eval import DEFAULT_FUEL, Budget, FuelExhaustedError, normalize, step
from .formula import Formula
from .proof import ProofTree
from .term import (
    Ap,
    CbvAp,
    CbvPair,
    Decide,
    Hole,
    Inl,
    Inr,
    Lam,
    Measure,
    Pair,
    Spread,
    Stuck,
    Term,
    Var,
    free_vars,
    is_canonical,
    measure,
    principal_subterm,
    subst_many,
    subst_term,
    subterm_at,
)


class RuleId(str, Enum):
    # canonical evidence
    AndPair = "AndPair"
    ExPair = "ExPair"
    ExValPair = "ExValPair"
    OrInl = "OrInl"
    OrInr = "OrInr"
    ImpLam = "ImpLam"
    AllLam = "AllLam"
    # principal variable
    VarAx = "VarAx"
    DecideR = "DecideR"
    AndSpread = "AndSpread"
    ExSpread = "ExSpread"
    ApplyConst = "ApplyConst"
    ImpApply = "ImpApply"
    AllApply = "AllApply"
    ApplyModel = "ApplyModel"
    AllCbv = "AllCbv"

    def __str__(self):
        return self.value


CANONICAL_RULES = frozenset(
    {RuleId.AndPair, RuleId.ExPair, RuleId.ExValPair, RuleId.OrInl, RuleId.OrInr, RuleId.ImpLam, RuleId.AllLam}
)


class DerivationError(Exception):
    def __init__(self, structure: EvidenceStructure, reason: str):
        super().__init__(f"{reason}\n  in {structure}")
        self.structure = structure
        self.reason = reason


class NoRuleMatches(DerivationError):
    """The evidence does not fit the goal; it is not uniform evidence."""


class StuckEvidence(DerivationError):
    """The evidence computes to a term that is neither a value nor blocked on a variable."""


@dataclass(frozen=True)
class DerivationStep:
    rule: RuleId
    parent: EvidenceStructure
    children: tuple[EvidenceStructure, ...]
    proof_action: tuple[str, tuple] | None  # (proof rule, parameters)
    params: dict = field(default_factory=dict)

    def build(self, premises: list[ProofTree]) -> ProofTree:
        if self.proof_action is None:
            return premises[0]
        rule, params = self.proof_action
        return ProofTree(rule, params, tuple(premises))


@dataclass
class MeasureViolation:
    step: int
    rule: RuleId
    parent: Measure
    child: Measure

    def __str__(self):
        return f"step {self.step} ({self.rule}): {tuple(self.parent)} -> {tuple(self.child)}"


@dataclass
class DerivationResult:
    proof: ProofTree
    steps: list[DerivationStep]
    violations: list[MeasureViolation]
    fuel_used: int


# -- matching ------------------------------------------------------------------


def _redex(evd: Term) -> tuple[Term, Hole, Term]:
    """(principal subterm, context of its parent, parent)."""
    sub, hole = principal_subterm(evd)
    if not hole.path:
        return sub, hole, sub
    outer = hole.parent()
    return sub, outer, subterm_at(evd, outer.path)


def match_rule(s: EvidenceStructure) -> RuleId:
    """The rule that applies to ``s``; its evidence must already be head-computed."""
    ctx, g, evd = s.context, s.goal, s.evidence

    def no(reason):
        raise NoRuleMatches(s, reason)

    match evd:
        case Var(v):
            ty = ctx.type_of(v)
            if ty is None:
                no(f"{v} is not a declared hypothesis")
            if not F.alpha_equal(ty, g):
                no(f"{v} has type {ty}, not the goal")
            return RuleId.VarAx
        case Pair(e1, _):
            if isinstance(g, F.And):
                return RuleId.AndPair
            if isinstance(g, F.Ex):
                if is_canonical(e1):
                    no("the witness of an existential must be a domain element")
                return RuleId.ExPair
            no("a pair proves a conjunction or an existential")
        case Inl():
            if isinstance(g, F.Or):
                return RuleId.OrInl
            no("an injection proves a disjunction")
        case Inr():
            if isinstance(g, F.Or):
                return RuleId.OrInr
            no("an injection proves a disjunction")
        case Lam():
            if isinstance(g, F.Imp):
                return RuleId.ImpLam
            if isinstance(g, F.All):
                return RuleId.AllLam
            no("a lambda proves an implication or a universal")

    sub, _, red = _redex(evd)
    if isinstance(sub, Stuck):
        raise StuckEvidence(s, "evidence contains stuck at the principal position")
    if not isinstance(sub, Var):
        raise StuckEvidence(s, f"evidence is stuck at {sub}")
    v = sub.name
    ty = ctx.type_of(v)
    match red:
        case Decide():
            if isinstance(ty, F.Or):
                return RuleId.DecideR
            no(f"decide on {v}, which is not a disjunction")
        case Spread():
            if isinstance(ty, F.And):
                return RuleId.AndSpread
            if isinstance(ty, F.Ex):
                return RuleId.ExSpread
            no(f"spread on {v}, which is neither a conjunction nor an existential")
        case Ap(_, arg):
            if isinstance(ty, F.Imp):
                if ctx.const_constraint(v) is not None:
                    return RuleId.ApplyConst
                return RuleId.ImpApply
            if isinstance(ty, F.All):
                if is_canonical(arg):
                    no(f"{v} is applied to {arg}, which is not a domain element")
                return RuleId.AllApply
            no(f"{v} is applied but is not a function")
        case CbvAp(Var(f), _):
            fty = ctx.type_of(f)
            if isinstance(fty, F.All) and ctx.is_domain(v):
                if ctx.ap_constraint(f, v) is not None:
                    return RuleId.ApplyModel
                return RuleId.AllCbv
            no(f"cbv({f}; {v}) does not instantiate a universal at a domain element")
        case CbvPair(Var(d), _) if red is evd:
            if isinstance(g, F.Ex) and ctx.is_domain(d):
                return RuleId.ExValPair
            no(f"{d} is not a domain element witnessing an existential")
    no(f"no rule for principal variable {v} in {red}")


# -- rule application ----------------------------------------------------------


def _fresh_v(ctx: EvidenceContext, n: int):
    names = []
    for _ in range(n):
        name, ctx = ctx.fresh_evidence_var()
        names.append(name)
    return names, ctx


def _open2(x: str, y: str, body: Term, a: Term, b: Term) -> Term:
    if x == y:
        return subst_term(body, y, b)
    return subst_many(body, {x: a, y: b})


def apply_rule(s: EvidenceStructure, rule: RuleId) -> DerivationStep:
    ctx, g, evd = s.context, s.goal, s.evidence

    def out(children, action=None, **params):
        return DerivationStep(rule, s, tuple(children), action, params)

    match rule:
        case RuleId.VarAx:
            return out([], ("Axiom", (evd.name,)))
        case RuleId.AndPair:
            return out([EvidenceStructure(ctx, g.l, evd.l), EvidenceStructure(ctx, g.r, evd.r)], ("RightAnd", ()))
        case RuleId.ExPair:
            return out([EvidenceStructure(ctx, g, CbvPair(evd.l, evd.r))])
        case RuleId.ExValPair:
            d = evd.first.name
            child = EvidenceStructure(ctx, F.subst_domain_var(g.body, g.var, d), evd.second)
            return out([child], ("RightEx", (d,)), witness=d)
        case RuleId.OrInl:
            return out([EvidenceStructure(ctx, g.l, evd.t)], ("RightOrL", ()))
        case RuleId.OrInr:
            return out([EvidenceStructure(ctx, g.r, evd.t)], ("RightOrR", ()))
        case RuleId.ImpLam:
            v, ctx2 = ctx.fresh_evidence_var()
            child = EvidenceStructure(ctx2.extend(HypDecl(v, g.l)), g.r, subst_term(evd.body, evd.var, Var(v)))
            return out([child], ("RightImp", (v,)), hyp=v)
        case RuleId.AllLam:
            d, ctx2 = ctx.fresh_domain_var()
            child = EvidenceStructure(
                ctx2.extend(DomainDecl(d)),
                F.subst_domain_var(g.body, g.var, d),
                subst_term(evd.body, evd.var, Var(d)),
            )
            return out([child], ("RightAll", (d,)), eigenvar=d)

    sub, hole, red = _redex(evd)
    v = sub.name

    match rule:
        case RuleId.DecideR:
            (x, y), ctx2 = _fresh_v(ctx, 2)
            base = replace(s, context=ctx2)
            left = replace(base, evidence=hole.plug(evd, subst_term(red.left, red.x, Var(x))))
            right = replace(base, evidence=hole.plug(evd, subst_term(red.right, red.y, Var(y))))
            children = [subst_in_structure(left, v, Inl(Var(x))), subst_in_structure(right, v, Inr(Var(y)))]
            return out(children, ("LeftOr", (v, x, y)), hyp=v, left=x, right=y)
        case RuleId.AndSpread:
            (x, y), ctx2 = _fresh_v(ctx, 2)
            body = _open2(red.x, red.y, red.body, Var(x), Var(y))
            child = EvidenceStructure(ctx2, g, hole.plug(evd, body))
            return out([subst_in_structure(child, v, Pair(Var(x), Var(y)))], ("LeftAnd", (v, x, y)), hyp=v)
        case RuleId.ExSpread:
            d, ctx2 = ctx.fresh_domain_var()
            y, ctx2 = ctx2.fresh_evidence_var()
            body = _open2(red.x, red.y, red.body, Var(d), Var(y))
            child = EvidenceStructure(ctx2, g, hole.plug(evd, body))
            return out([subst_in_structure(child, v, Pair(Var(d), Var(y)))], ("LeftEx", (v, d, y)), hyp=v, eigenvar=d)
        case RuleId.ApplyConst:
            c = ctx.const_constraint(v)
            return out([replace(s, evidence=hole.plug(evd, c.body))])
        case RuleId.ImpApply:
            w, ctx2 = ctx.fresh_evidence_var()
            ty = ctx.type_of(v)
            arg_child = EvidenceStructure(ctx2, ty.l, red.arg)
            cont = EvidenceStructure(
                ctx2.extend(HypDecl(w, ty.r), ConstConstraint(v, Var(w))), g, hole.plug(evd, Var(w))
            )
            return out([arg_child, cont], ("LeftImp", (v, w)), hyp=v, result=w)
        case RuleId.AllApply:
            return out([replace(s, evidence=hole.plug(evd, CbvAp(red.fun, red.arg)))])
        case RuleId.ApplyModel:
            c = ctx.ap_constraint(red.fun.name, v)
            return out([replace(s, evidence=hole.plug(evd, c.body))])
        case RuleId.AllCbv:
            f = red.fun.name
            ty = ctx.type_of(f)
            w, ctx2 = ctx.fresh_evidence_var()
            ctx2 = ctx2.extend(HypDecl(w, F.subst_domain_var(ty.body, ty.var, v)), ApConstraint(f, v, Var(w)))
            child = EvidenceStructure(ctx2, g, hole.plug(evd, Var(w)))
            return out([child], ("LeftAll", (f, v, w)), hyp=f, instance=v, result=w)
    raise ValueError(f"rule {rule} does not apply")


# -- the driver ----------------------------------------------------------------


def _value_step(evd: Term, ctx: EvidenceContext) -> Term | None:
    """Treat a variable as a value in a call-by-value position.

    Covers ``cbv(F; x)`` where F is not a universally quantified hypothesis,
    and ``cbvpair(d; e)`` below the top of the evidence.
    """
    sub, hole, red = _redex(evd)
    if not isinstance(sub, Var) or not hole.path and red is sub:
        return None
    match red:
        case CbvAp(fun, arg) if arg is sub:
            if isinstance(fun, Var) and isinstance(ctx.type_of(fun.name), F.All):
                return None
            return hole.plug(evd, Ap(fun, arg))
        case CbvPair(first, second) if first is sub and red is not evd:
            return hole.plug(evd, Pair(first, second))
    return None


class _Driver:
    def __init__(self, budget: Budget, pre_normalize: bool, check_invariants: bool, on_step):
        self.budget = budget
        self.pre_normalize = pre_normalize
        self.check_invariants = check_invariants
        self.on_step = on_step
        self.steps: list[DerivationStep] = []
        self.violations: list[MeasureViolation] = []
        self.counters = (0, 0)

    def head(self, s: EvidenceStructure) -> EvidenceStructure:
        evd = s.evidence
        while True:
            nxt = step(evd)
            if nxt is None:
                nxt = _value_step(evd, s.context)
                if nxt is None:
                    break
            self.budget.spend(1, evd)
            evd = nxt
        return replace(s, evidence=evd)

    def prove(self, s: EvidenceStructure) -> ProofTree:
        # iterate through single-child evidence-only rules, recurse otherwise
        pending: list[DerivationStep] = []
        while True:
            s = self.head(_bump_counters(s, self.counters))
            rule = match_rule(s)
            self.budget.spend(1, s.evidence)
            st = apply_rule(s, rule)
            children = list(st.children)
            for c in children:
                self.counters = (
                    max(self.counters[0], c.context.next_evidence),
                    max(self.counters[1], c.context.next_domain),
                )
            if self.pre_normalize:
                children = [replace(c, evidence=normalize(c.evidence, self.budget)) for c in children]
                before = measure(s.evidence)
                for c in children:
                    after = measure(c.evidence)
                    if not after < before:
                        self.violations.append(MeasureViolation(len(self.steps) + 1, rule, before, after))
            if self.check_invariants:
                for c in children:
                    assert_wellformed(c.context)
            st = replace(st, children=tuple(children))
            self.steps.append(st)
            if self.on_step:
                self.on_step(len(self.steps), st)
            if len(children) == 1:
                pending.append(st)
                s = children[0]
                continue
            premises = [self.prove(c) for c in children]
            pt = st.build(premises)
            for st in reversed(pending):
                pt = st.build([pt])
            return pt


def _bump_counters(s: EvidenceStructure, counters: tuple[int, int]) -> EvidenceStructure:
    return replace(s, context=s.context.with_counters(*counters))


def derive(
    s: EvidenceStructure,
    fuel: int | Budget = DEFAULT_FUEL,
    pre_normalize: bool = False,
    check_invariants: bool = False,
    on_step: Callable[[int, DerivationStep], None] | None = None,
) -> DerivationResult:
    """Run the procedure from an arbitrary evidence structure."""
    budget = fuel if isinstance(fuel, Budget) else Budget(fuel)
    drv = _Driver(budget, pre_normalize, check_invariants, on_step)
    if pre_normalize:
        s = replace(s, evidence=normalize(s.evidence, budget))
    pt = drv.prove(s)
    return DerivationResult(pt, drv.steps, drv.violations, budget.used)


def prf_driver(
    goal: Formula,
    evd: Term,
    fuel: int = DEFAULT_FUEL,
    pre_normalize: bool = False,
    check_invariants: bool = False,
    on_step=None,
) -> DerivationResult:
    """Build a minimal-logic proof of ``goal`` from evidence ``evd``.

    Raises NoRuleMatches or StuckEvidence when the evidence does not fit,
    FuelExhaustedError when the budget (evaluation steps plus rule
    applications) runs out.
    """
    if not F.is_minimal(goal):
        raise ValueError("goal must be a minimal-logic formula")
    if not F.is_closed(goal):
        raise ValueError("goal must be closed")
    if free_vars(evd):
        raise ValueError(f"evidence has free variables: {', '.join(sorted(free_vars(evd)))}")
    s = EvidenceStructure(EvidenceContext(), goal, evd)
    return derive(s, fuel, pre_normalize, check_invariants, on_step)


def format_step(n: int, st: DerivationStep) -> str:
    head = type(st.parent.evidence).__name__
    return f"STEP {n} rule={st.rule} goal={st.parent.goal} evd-head={head}"


__all__ = [
    "RuleId",
    "DerivationStep",
    "DerivationResult",
    "MeasureViolation",
    "NoRuleMatches",
    "StuckEvidence",
    "FuelExhaustedError",
    "match_rule",
    "apply_rule",
    "derive",
    "prf_driver",
    "format_step",
]
