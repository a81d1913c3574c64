"""First-order formulas over a single domain with relation symbols only.

Minimal logic is the fragment without ``FalseC``; its ``bot`` is an ordinary
nullary relation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

BOT = "bot"


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class FalseC:
    pass


@dataclass(frozen=True)
class And:
    l: Formula
    r: Formula


@dataclass(frozen=True)
class Or:
    l: Formula
    r: Formula


@dataclass(frozen=True)
class Imp:
    l: Formula
    r: Formula


@dataclass(frozen=True)
class All:
    var: str
    body: Formula


@dataclass(frozen=True)
class Ex:
    var: str
    body: Formula


Formula = Union[Atom, FalseC, And, Or, Imp, All, Ex]

BINARY = (And, Or, Imp)
QUANTIFIERS = (All, Ex)


def neg(phi: Formula) -> Imp:
    """``~phi``, i.e. ``phi => False``."""
    return Imp(phi, FalseC())


@dataclass(frozen=True)
class Language:
    """Finite relation signature, symbol -> arity."""

    relations: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for name, arity in self.relations.items():
            if arity < 0:
                raise ValueError(f"negative arity for {name}")

    @classmethod
    def of(cls, *formulas: Formula) -> Language:
        rels: dict[str, int] = {}
        for phi in formulas:
            for name, arity in relations(phi).items():
                if rels.setdefault(name, arity) != arity:
                    raise ValueError(f"relation {name} used with arities {rels[name]} and {arity}")
        return cls(rels)


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Pre-order walk over all subformulas, ``phi`` included."""
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        if isinstance(f, BINARY):
            stack.append(f.r)
            stack.append(f.l)
        elif isinstance(f, QUANTIFIERS):
            stack.append(f.body)


def relations(phi: Formula) -> dict[str, int]:
    """Relation symbols of ``phi`` with their arities.

    Raises ValueError when a symbol occurs with two different arities.
    """
    out: dict[str, int] = {}
    for f in subformulas(phi):
        if isinstance(f, Atom):
            if out.setdefault(f.rel, len(f.args)) != len(f.args):
                raise ValueError(f"relation {f.rel} used with arities {out[f.rel]} and {len(f.args)}")
    return out


def size(phi: Formula) -> int:
    return sum(1 for _ in subformulas(phi))


def is_minimal(phi: Formula) -> bool:
    return not any(isinstance(f, FalseC) for f in subformulas(phi))


def free_vars(phi: Formula) -> frozenset[str]:
    match phi:
        case Atom(_, args):
            return frozenset(args)
        case FalseC():
            return frozenset()
        case And(l, r) | Or(l, r) | Imp(l, r):
            return free_vars(l) | free_vars(r)
        case All(x, body) | Ex(x, body):
            return free_vars(body) - {x}
    raise TypeError(f"not a formula: {phi!r}")


def all_vars(phi: Formula) -> frozenset[str]:
    """Free and bound variable names."""
    names: set[str] = set()
    for f in subformulas(phi):
        if isinstance(f, Atom):
            names.update(f.args)
        elif isinstance(f, QUANTIFIERS):
            names.add(f.var)
    return frozenset(names)


def is_closed(phi: Formula) -> bool:
    return not free_vars(phi)


def fresh_name(base: str, avoid) -> str:
    name = base
    while name in avoid:
        name += "'"
    return name


def subst_domain_var(phi: Formula, x: str, d: str) -> Formula:
    """Replace free ``x`` by ``d``, renaming binders that would capture ``d``."""
    if x == d:
        return phi
    match phi:
        case Atom(rel, args):
            if x not in args:
                return phi
            return Atom(rel, tuple(d if a == x else a for a in args))
        case FalseC():
            return phi
        case And(l, r):
            return And(subst_domain_var(l, x, d), subst_domain_var(r, x, d))
        case Or(l, r):
            return Or(subst_domain_var(l, x, d), subst_domain_var(r, x, d))
        case Imp(l, r):
            return Imp(subst_domain_var(l, x, d), subst_domain_var(r, x, d))
        case All(y, body) | Ex(y, body):
            if y == x or x not in free_vars(body):
                return phi
            if y == d:
                y2 = fresh_name(y, all_vars(body) | {d, x})
                body = subst_domain_var(body, y, y2)
                y = y2
            return type(phi)(y, subst_domain_var(body, x, d))
    raise TypeError(f"not a formula: {phi!r}")


def _alpha_key(phi: Formula, bound: dict[str, int], depth: int):
    match phi:
        case Atom(rel, args):
            return ("A", rel, tuple(("b", depth - bound[a]) if a in bound else ("f", a) for a in args))
        case FalseC():
            return ("F",)
        case And(l, r) | Or(l, r) | Imp(l, r):
            return (type(phi).__name__, _alpha_key(l, bound, depth), _alpha_key(r, bound, depth))
        case All(x, body) | Ex(x, body):
            inner = dict(bound)
            inner[x] = depth + 1
            return (type(phi).__name__, _alpha_key(body, inner, depth + 1))
    raise TypeError(f"not a formula: {phi!r}")


def alpha_key(phi: Formula):
    """Hashable key identifying ``phi`` up to renaming of bound variables."""
    return _alpha_key(phi, {}, 0)


def alpha_equal(phi: Formula, psi: Formula) -> bool:
    return phi == psi or alpha_key(phi) == alpha_key(psi)


def a_translate(phi: Formula, a: Formula) -> Formula:
    """Friedman's A-translation: atoms ``R`` become ``R \\/ a``, ``False`` becomes ``a``.

    ``a`` must be closed; connectives and quantifiers are translated
    homomorphically.
    """
    if not is_closed(a):
        raise ValueError("the translation formula must be closed")
    return _translate(phi, a)


def _translate(phi: Formula, a: Formula) -> Formula:
    match phi:
        case Atom():
            return Or(phi, a)
        case FalseC():
            return a
        case And(l, r):
            return And(_translate(l, a), _translate(r, a))
        case Or(l, r):
            return Or(_translate(l, a), _translate(r, a))
        case Imp(l, r):
            return Imp(_translate(l, a), _translate(r, a))
        case All(x, body):
            return All(x, _translate(body, a))
        case Ex(x, body):
            return Ex(x, _translate(body, a))
    raise TypeError(f"not a formula: {phi!r}")


def replace_atom(phi: Formula, rel: str, by: Formula) -> Formula:
    """Replace every occurrence of the nullary atom ``rel`` with the closed formula ``by``."""
    match phi:
        case Atom(r, args):
            if r == rel:
                if args:
                    raise ValueError(f"{rel} is not nullary")
                return by
            return phi
        case FalseC():
            return phi
        case And(l, r):
            return And(replace_atom(l, rel, by), replace_atom(r, rel, by))
        case Or(l, r):
            return Or(replace_atom(l, rel, by), replace_atom(r, rel, by))
        case Imp(l, r):
            return Imp(replace_atom(l, rel, by), replace_atom(r, rel, by))
        case All(x, body):
            return All(x, replace_atom(body, rel, by))
        case Ex(x, body):
            return Ex(x, replace_atom(body, rel, by))
    raise TypeError(f"not a formula: {phi!r}")


def _str(self) -> str:
    from .syntax import format_formula

    return format_formula(self)


for _cls in (Atom, FalseC, And, Or, Imp, All, Ex):
    _cls.__str__ = _str
