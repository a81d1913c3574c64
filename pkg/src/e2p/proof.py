"""Sequent-calculus proof trees, an independent checker and BHK extraction."""

from __future__ import annotations

from dataclasses import dataclass

from . import formula as F
from .formula import Formula
from .term import Ap, Decide, Inl, Inr, Lam, Pair, Spread, Term, Var, subst_term

MINIMAL = "minimal"
INTUITIONISTIC = "intuitionistic"

# rule -> (parameter kinds, premise count); "f" marks a formula parameter
PREMISES: dict[str, tuple[str, int]] = {
    "Axiom": ("h", 0),
    "RightAnd": ("", 2),
    "RightOrL": ("", 1),
    "RightOrR": ("", 1),
    "RightImp": ("h", 1),
    "RightAll": ("d", 1),
    "RightEx": ("d", 1),
    "LeftAnd": ("hxy", 1),
    "LeftOr": ("hxy", 2),
    "LeftImp": ("hv", 2),
    "LeftAll": ("hdw", 1),
    "LeftEx": ("hdy", 1),
    "FalseElim": ("h", 0),
    "Cut": ("fh", 2),
}


@dataclass(frozen=True)
class ProofTree:
    rule: str
    params: tuple = ()
    premises: tuple[ProofTree, ...] = ()

    def __post_init__(self):
        if self.rule not in PREMISES:
            raise ValueError(f"unknown rule {self.rule}")
        kinds, n = PREMISES[self.rule]
        if len(self.params) != len(kinds):
            raise ValueError(f"{self.rule} takes {len(kinds)} parameters, got {len(self.params)}")
        if len(self.premises) != n:
            raise ValueError(f"{self.rule} takes {n} premises, got {len(self.premises)}")
        for k, p in zip(kinds, self.params):
            if (k == "f") == isinstance(p, str):
                raise ValueError(f"bad parameter {p!r} for {self.rule}")

    def nodes(self):
        yield self
        for p in self.premises:
            yield from p.nodes()

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def rules(self) -> list[str]:
        return [n.rule for n in self.nodes()]

    def __str__(self):
        from .syntax import format_proof_tree

        return format_proof_tree(self)


def node(rule: str, *args) -> ProofTree:
    """``node("LeftImp", "f", "v", p1, p2)``: parameters then premises."""
    params = tuple(a for a in args if not isinstance(a, ProofTree))
    premises = tuple(a for a in args if isinstance(a, ProofTree))
    return ProofTree(rule, params, premises)


@dataclass(frozen=True)
class Sequent:
    """Ordered hypotheses; a domain declaration is stored with type None."""

    hyps: tuple[tuple[str, Formula | None], ...]
    goal: Formula

    def lookup(self, label: str) -> Formula | None:
        for name, ty in self.hyps:
            if name == label:
                return ty
        return None

    def names(self) -> set[str]:
        return {name for name, _ in self.hyps}

    def is_domain(self, name: str) -> bool:
        return any(n == name and ty is None for n, ty in self.hyps)

    def add(self, *entries) -> tuple:
        return self.hyps + tuple(entries)

    def swap(self, label: str, *entries) -> tuple:
        out = []
        for name, ty in self.hyps:
            out.extend(entries if name == label else [(name, ty)])
        return tuple(out)

    def __str__(self):
        hs = ", ".join(f"{n}:D" if ty is None else f"{n}:{ty}" for n, ty in self.hyps)
        return f"{hs} |- {self.goal}"


class ProofCheckError(Exception):
    def __init__(self, path: tuple[int, ...], reason: str):
        where = "root" if not path else "root." + ".".join(map(str, path))
        super().__init__(f"at {where}: {reason}")
        self.path = path
        self.reason = reason


def check_proof(goal: Formula, pt: ProofTree, mode: str = MINIMAL) -> None:
    """Raise ProofCheckError unless ``pt`` proves ``goal`` from no hypotheses."""
    if mode not in (MINIMAL, INTUITIONISTIC):
        raise ValueError(f"unknown logic {mode}")
    if not F.is_closed(goal):
        raise ProofCheckError((), "goal is not closed")
    if mode == MINIMAL and not F.is_minimal(goal):
        raise ProofCheckError((), "goal mentions False in minimal mode")
    _check(Sequent((), goal), pt, mode, ())


def is_valid(goal: Formula, pt: ProofTree, mode: str = MINIMAL) -> bool:
    try:
        check_proof(goal, pt, mode)
    except ProofCheckError:
        return False
    return True


def _check(seq: Sequent, pt: ProofTree, mode: str, path: tuple[int, ...]):
    def fail(msg):
        raise ProofCheckError(path, f"{pt.rule}: {msg} in {seq}")

    def hyp(label, shape=None):
        ty = seq.lookup(label)
        if ty is None:
            fail(f"no hypothesis {label}")
        if shape is not None and not isinstance(ty, shape):
            fail(f"{label} is not of the right form")
        return ty

    def fresh(*names):
        taken = seq.names()
        for n in names:
            if n in taken:
                fail(f"{n} is not fresh")
            taken.add(n)

    def domain(d):
        if not seq.is_domain(d):
            fail(f"{d} is not a declared domain variable")

    def goal_is(shape):
        if not isinstance(seq.goal, shape):
            fail("goal is not of the right form")
        return seq.goal

    def sub(i, hyps, goal):
        _check(Sequent(hyps, goal), pt.premises[i], mode, path + (i,))

    g = seq.goal
    match pt.rule, pt.params:
        case "Axiom", (h,):
            if not F.alpha_equal(hyp(h), g):
                fail(f"{h} does not match the goal")
        case "FalseElim", (h,):
            if mode != INTUITIONISTIC:
                fail("False elimination is not a minimal-logic rule")
            hyp(h, F.FalseC)
        case "RightAnd", ():
            g = goal_is(F.And)
            sub(0, seq.hyps, g.l)
            sub(1, seq.hyps, g.r)
        case "RightOrL", ():
            sub(0, seq.hyps, goal_is(F.Or).l)
        case "RightOrR", ():
            sub(0, seq.hyps, goal_is(F.Or).r)
        case "RightImp", (h,):
            g = goal_is(F.Imp)
            fresh(h)
            sub(0, seq.add((h, g.l)), g.r)
        case "RightAll", (d,):
            g = goal_is(F.All)
            fresh(d)
            sub(0, seq.add((d, None)), F.subst_domain_var(g.body, g.var, d))
        case "RightEx", (d,):
            g = goal_is(F.Ex)
            domain(d)
            sub(0, seq.hyps, F.subst_domain_var(g.body, g.var, d))
        case "LeftAnd", (h, x, y):
            ty = hyp(h, F.And)
            fresh(x, y)
            sub(0, seq.swap(h, (x, ty.l), (y, ty.r)), g)
        case "LeftOr", (h, x, y):
            ty = hyp(h, F.Or)
            fresh(x)
            fresh(y)
            sub(0, seq.swap(h, (x, ty.l)), g)
            sub(1, seq.swap(h, (y, ty.r)), g)
        case "LeftImp", (h, v):
            ty = hyp(h, F.Imp)
            fresh(v)
            sub(0, seq.hyps, ty.l)
            sub(1, seq.add((v, ty.r)), g)
        case "LeftAll", (h, d, w):
            ty = hyp(h, F.All)
            domain(d)
            fresh(w)
            sub(0, seq.add((w, F.subst_domain_var(ty.body, ty.var, d))), g)
        case "LeftEx", (h, d, y):
            ty = hyp(h, F.Ex)
            fresh(d, y)
            sub(0, seq.swap(h, (d, None), (y, F.subst_domain_var(ty.body, ty.var, d))), g)
        case "Cut", (phi, h):
            for x in F.free_vars(phi):
                domain(x)
            if mode == MINIMAL and not F.is_minimal(phi):
                fail("cut formula mentions False in minimal mode")
            fresh(h)
            sub(0, seq.hyps, phi)
            sub(1, seq.add((h, phi)), g)
        case _:
            fail("malformed node")


def extract(pt: ProofTree, goal: Formula | None = None) -> Term:
    """BHK reading of a proof as an evidence term.

    ``goal`` is only used to check the proof first when given.
    """
    if goal is not None:
        check_proof(goal, pt, INTUITIONISTIC)
    return _extract(pt)


def _extract(pt: ProofTree) -> Term:
    ps = [_extract(p) for p in pt.premises]
    match pt.rule, pt.params:
        case ("Axiom" | "FalseElim"), (h,):
            return Var(h)
        case "RightAnd", ():
            return Pair(ps[0], ps[1])
        case "RightOrL", ():
            return Inl(ps[0])
        case "RightOrR", ():
            return Inr(ps[0])
        case ("RightImp" | "RightAll"), (x,):
            return Lam(x, ps[0])
        case "RightEx", (d,):
            return Pair(Var(d), ps[0])
        case ("LeftAnd" | "LeftEx"), (h, x, y):
            return Spread(Var(h), x, y, ps[0])
        case "LeftOr", (h, x, y):
            return Decide(Var(h), x, ps[0], y, ps[1])
        case "LeftImp", (h, v):
            return subst_term(ps[1], v, Ap(Var(h), ps[0]))
        case "LeftAll", (h, d, w):
            return subst_term(ps[0], w, Ap(Var(h), Var(d)))
        case "Cut", (_, h):
            return Ap(Lam(h, ps[1]), ps[0])
    raise ValueError(f"malformed node {pt.rule}")


def compose_cut(evd1: Term, evd2: Term) -> Term:
    """Evidence for psi from evidence for psi1 and for psi1 => psi."""
    return Ap(evd2, evd1)


def has_cut(pt: ProofTree) -> bool:
    return any(n.rule == "Cut" for n in pt.nodes())

