"""Small-step reduction of evidence terms at the principal position."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .term import (
    Ap,
    CbvAp,
    CbvPair,
    Decide,
    Hole,
    Inl,
    Inr,
    Lam,
    Pair,
    Spread,
    Stuck,
    Term,
    Var,
    children,
    is_canonical,
    principal_subterm,
    rebuild,
    subst_many,
    subst_term,
)

DEFAULT_FUEL = 100_000


class FuelExhaustedError(Exception):
    """The step budget ran out; the term may diverge."""

    def __init__(self, partial: Term, steps: int):
        super().__init__(f"fuel exhausted after {steps} steps")
        self.partial = partial
        self.steps = steps


def contract(t: Term) -> Term | None:
    """Reduce ``t`` itself if it is a redex."""
    match t:
        case Spread(Pair(a, b), x, y, body):
            return subst_many(body, {x: a, y: b}) if x != y else subst_term(body, y, b)
        case Decide(Inl(a), x, left, _, _):
            return subst_term(left, x, a)
        case Decide(Inr(b), _, _, y, right):
            return subst_term(right, y, b)
        case Ap(Lam(x, body), arg):
            return subst_term(body, x, arg)
        case CbvAp(f, arg) if is_canonical(arg):
            return Ap(f, arg)
        case CbvPair(a, b) if is_canonical(a):
            return Pair(a, b)
    return None


def step(t: Term) -> Term | None:
    """One reduction at the principal position, or None when there is no redex.

    None covers canonical terms, ``stuck``, terms whose principal subterm is a
    variable, and terms stuck on a shape mismatch (e.g. ``spread`` of ``inl``).
    """
    path = []
    u = t
    while True:
        r = contract(u)
        if r is not None:
            return Hole(tuple(path)).plug(t, r)
        match u:
            case Spread(s) | Decide(s) | Ap(s):
                nxt, i = s, 0
            case CbvAp(_, arg):
                nxt, i = arg, 1
            case CbvPair(first):
                nxt, i = first, 0
            case _:
                return None
        if isinstance(nxt, (Var, Stuck)) or is_canonical(nxt):
            return None
        path.append(i)
        u = nxt


@dataclass(frozen=True)
class CanonicalForm:
    t: Term


@dataclass(frozen=True)
class PrincipalVariable:
    t: Term
    var: str
    hole: Hole


@dataclass(frozen=True)
class StuckTerm:
    t: Term


@dataclass(frozen=True)
class FuelExhausted:
    partial: Term
    steps: int


EvalOutcome = Union[CanonicalForm, PrincipalVariable, StuckTerm, FuelExhausted]


def classify(t: Term) -> EvalOutcome:
    """Classify a term on which ``step`` makes no progress."""
    if is_canonical(t):
        return CanonicalForm(t)
    sub, hole = principal_subterm(t)
    if isinstance(sub, Var):
        return PrincipalVariable(t, sub.name, hole)
    return StuckTerm(t)


def compute_to_head(t: Term, fuel: int = DEFAULT_FUEL) -> tuple[EvalOutcome, int]:
    """Step ``t`` until it is canonical, blocked, or out of fuel.

    Returns the outcome and the number of steps spent.
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    steps = 0
    while True:
        nxt = step(t)
        if nxt is None:
            return classify(t), steps
        if steps == fuel:
            return FuelExhausted(t, steps), steps
        t = nxt
        steps += 1


class Budget:
    """Shared step counter."""

    def __init__(self, fuel: int):
        if fuel <= 0:
            raise ValueError("fuel must be positive")
        self.fuel = fuel
        self.used = 0

    @property
    def remaining(self) -> int:
        return self.fuel - self.used

    def spend(self, n: int = 1, partial: Term | None = None):
        self.used += n
        if self.used > self.fuel:
            raise FuelExhaustedError(partial if partial is not None else Stuck(), self.fuel)


def normalize(t: Term, fuel: int | Budget = DEFAULT_FUEL) -> Term:
    """Reduce every redex, outermost first, including under binders.

    Raises FuelExhaustedError when the budget runs out.
    """
    budget = fuel if isinstance(fuel, Budget) else Budget(fuel)
    return _normalize(t, budget)


def _normalize(t: Term, budget: Budget) -> Term:
    while True:
        nxt = step(t)
        if nxt is None:
            break
        budget.spend(1, t)
        t = nxt
    kids = children(t)
    if not kids:
        return t
    new = tuple(_normalize(k, budget) for k in kids)
    if all(a is b for a, b in zip(new, kids)):
        return t
    t = rebuild(t, new)
    # a value may now sit in a call-by-value position
    if step(t) is not None:
        return _normalize(t, budget)
    return t


def is_normal(t: Term) -> bool:
    if step(t) is not None:
        return False
    return all(is_normal(k) for k in children(t))
