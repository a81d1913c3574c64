"""Untyped evidence terms (realizers), patterns, principal subterms and the
termination measure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Union

from .formula import fresh_name


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Pair:
    l: Term
    r: Term


@dataclass(frozen=True)
class Inl:
    t: Term


@dataclass(frozen=True)
class Inr:
    t: Term


@dataclass(frozen=True)
class Lam:
    var: str
    body: Term


@dataclass(frozen=True)
class Ap:
    fun: Term
    arg: Term


@dataclass(frozen=True)
class Spread:
    scrut: Term
    x: str
    y: str
    body: Term


@dataclass(frozen=True)
class Decide:
    scrut: Term
    x: str
    left: Term
    y: str
    right: Term


@dataclass(frozen=True)
class CbvAp:
    """Call-by-value apply: the argument is computed to a value first."""

    fun: Term
    arg: Term


@dataclass(frozen=True)
class CbvPair:
    """Pair formed only once the first component is a value."""

    first: Term
    second: Term


@dataclass(frozen=True)
class Stuck:
    """No redex, not canonical; never converges."""


Term = Union[Var, Pair, Inl, Inr, Lam, Ap, Spread, Decide, CbvAp, CbvPair, Stuck]
EvidenceTerm = Term

# Patterns are the terms built from variables by Pair, Inl and Inr; their
# types come from the declarations of the surrounding context.
Pattern = Term

CANONICAL = (Pair, Inl, Inr, Lam)


def is_canonical(t: Term) -> bool:
    return isinstance(t, CANONICAL)


def is_pattern(t: Term) -> bool:
    match t:
        case Var():
            return True
        case Pair(l, r):
            return is_pattern(l) and is_pattern(r)
        case Inl(a) | Inr(a):
            return is_pattern(a)
    return False


def fst(t: Term) -> Spread:
    return Spread(t, "x", "y", Var("x"))


def snd(t: Term) -> Spread:
    return Spread(t, "x", "y", Var("y"))


def if_then_else(c: Term, a: Term, b: Term) -> Decide:
    avoid = free_vars(a) | free_vars(b)
    x = fresh_name("_", avoid)
    return Decide(c, x, a, x, b)


def lams(names: str, body: Term) -> Term:
    for name in reversed(names.split()):
        body = Lam(name, body)
    return body


def aps(f: Term, *args: Term) -> Term:
    for a in args:
        f = Ap(f, a)
    return f


def children(t: Term) -> tuple[Term, ...]:
    match t:
        case Var() | Stuck():
            return ()
        case Pair(l, r) | Ap(l, r) | CbvAp(l, r) | CbvPair(l, r):
            return (l, r)
        case Inl(a) | Inr(a):
            return (a,)
        case Lam(_, body):
            return (body,)
        case Spread(s, _, _, body):
            return (s, body)
        case Decide(s, _, a, _, b):
            return (s, a, b)
    raise TypeError(f"not a term: {t!r}")


def free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(name):
            return frozenset((name,))
        case Stuck():
            return frozenset()
        case Pair(l, r) | Ap(l, r) | CbvAp(l, r) | CbvPair(l, r):
            return free_vars(l) | free_vars(r)
        case Inl(a) | Inr(a):
            return free_vars(a)
        case Lam(x, body):
            return free_vars(body) - {x}
        case Spread(s, x, y, body):
            return free_vars(s) | (free_vars(body) - {x, y})
        case Decide(s, x, a, y, b):
            return free_vars(s) | (free_vars(a) - {x}) | (free_vars(b) - {y})
    raise TypeError(f"not a term: {t!r}")


def all_names(t: Term) -> set[str]:
    names: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        match u:
            case Var(name):
                names.add(name)
            case Lam(x, _):
                names.add(x)
            case Spread(_, x, y, _):
                names.update((x, y))
            case Decide(_, x, _, y, _):
                names.update((x, y))
        stack.extend(children(u))
    return names


def subst_term(t: Term, v: str, e: Term) -> Term:
    """``t{v := e}``, capture-avoiding."""
    return subst_many(t, {v: e})


def subst_many(t: Term, sub: Mapping[str, Term]) -> Term:
    """Simultaneous capture-avoiding substitution."""
    sub = {k: e for k, e in sub.items() if not (isinstance(e, Var) and e.name == k)}
    if not sub:
        return t
    fv_sub: set[str] = set()
    for e in sub.values():
        fv_sub |= free_vars(e)
    return _subst(t, sub, frozenset(fv_sub))


def _subst(t: Term, sub: dict, fv_sub: frozenset[str]) -> Term:
    if not sub:
        return t
    match t:
        case Var(name):
            return sub.get(name, t)
        case Stuck():
            return t
        case Pair(l, r):
            return Pair(_subst(l, sub, fv_sub), _subst(r, sub, fv_sub))
        case Ap(l, r):
            return Ap(_subst(l, sub, fv_sub), _subst(r, sub, fv_sub))
        case CbvAp(l, r):
            return CbvAp(_subst(l, sub, fv_sub), _subst(r, sub, fv_sub))
        case CbvPair(l, r):
            return CbvPair(_subst(l, sub, fv_sub), _subst(r, sub, fv_sub))
        case Inl(a):
            return Inl(_subst(a, sub, fv_sub))
        case Inr(a):
            return Inr(_subst(a, sub, fv_sub))
        case Lam(x, body):
            x, body = _under(x, body, sub, fv_sub)
            return Lam(x, body)
        case Spread(s, x, y, body):
            s = _subst(s, sub, fv_sub)
            x, y, body = _under2(x, y, body, sub, fv_sub)
            return Spread(s, x, y, body)
        case Decide(s, x, a, y, b):
            s = _subst(s, sub, fv_sub)
            x, a = _under(x, a, sub, fv_sub)
            y, b = _under(y, b, sub, fv_sub)
            return Decide(s, x, a, y, b)
    raise TypeError(f"not a term: {t!r}")


def _under(x: str, body: Term, sub: dict, fv_sub: frozenset[str]):
    body_fv = free_vars(body)
    inner = {k: e for k, e in sub.items() if k != x}
    if not any(k in body_fv for k in inner):
        return x, body
    if x in fv_sub:
        x2 = fresh_name(x, fv_sub | body_fv | set(inner) | {x})
        inner[x] = Var(x2)
        return x2, _subst(body, inner, fv_sub | {x2})
    return x, _subst(body, inner, fv_sub)


def _under2(x: str, y: str, body: Term, sub: dict, fv_sub: frozenset[str]):
    body_fv = free_vars(body)
    inner = {k: e for k, e in sub.items() if k not in (x, y)}
    if not any(k in body_fv for k in inner):
        return x, y, body
    avoid = set(fv_sub) | body_fv | set(inner) | {x, y}
    fresh = set()
    y2 = y
    if y in fv_sub:
        y2 = fresh_name(y, avoid)
        avoid.add(y2)
        inner[y] = Var(y2)
        fresh.add(y2)
    x2 = x
    if x in fv_sub:
        x2 = fresh_name(x, avoid)
        fresh.add(x2)
        if x != y:
            inner[x] = Var(x2)
    return x2, y2, _subst(body, inner, fv_sub | fresh)


def rename_apart(t: Term, avoid) -> Term:
    """Alpha-rename every binder of ``t`` whose name is in ``avoid``."""
    avoid = set(avoid)

    def go(u: Term) -> Term:
        match u:
            case Var() | Stuck():
                return u
            case Lam(x, body):
                if x in avoid:
                    x2 = fresh_name(x, avoid | all_names(body))
                    body = subst_term(body, x, Var(x2))
                    x = x2
                return Lam(x, go(body))
            case Spread(s, x, y, body):
                sub = {}
                names = all_names(body)
                if x in avoid:
                    x2 = fresh_name(x, avoid | names | {y})
                    sub[x] = Var(x2)
                    x = x2
                if y in avoid:
                    y2 = fresh_name(y, avoid | names | {x})
                    sub[y] = Var(y2)
                    y = y2
                return Spread(go(s), x, y, go(subst_many(body, sub)))
            case Decide(s, x, a, y, b):
                if x in avoid:
                    x2 = fresh_name(x, avoid | all_names(a))
                    a = subst_term(a, x, Var(x2))
                    x = x2
                if y in avoid:
                    y2 = fresh_name(y, avoid | all_names(b))
                    b = subst_term(b, y, Var(y2))
                    y = y2
                return Decide(go(s), x, go(a), y, go(b))
        return rebuild(u, tuple(go(c) for c in children(u)))

    return go(t)


def rebuild(t: Term, kids: tuple[Term, ...]) -> Term:
    """Same constructor and binder names, new immediate subterms."""
    match t:
        case Var() | Stuck():
            return t
        case Pair():
            return Pair(*kids)
        case Ap():
            return Ap(*kids)
        case CbvAp():
            return CbvAp(*kids)
        case CbvPair():
            return CbvPair(*kids)
        case Inl():
            return Inl(*kids)
        case Inr():
            return Inr(*kids)
        case Lam(x, _):
            return Lam(x, kids[0])
        case Spread(_, x, y, _):
            return Spread(kids[0], x, y, kids[1])
        case Decide(_, x, _, y, _):
            return Decide(kids[0], x, kids[1], y, kids[2])
    raise TypeError(f"not a term: {t!r}")


def _alpha_key(t: Term, bound: dict[str, int], depth: int):
    match t:
        case Var(name):
            return ("b", depth - bound[name]) if name in bound else ("f", name)
        case Stuck():
            return ("stuck",)
        case Lam(x, body):
            return ("Lam", _alpha_key(body, {**bound, x: depth + 1}, depth + 1))
        case Spread(s, x, y, body):
            inner = {**bound, x: depth + 1}
            inner[y] = depth + 2
            return ("Spread", _alpha_key(s, bound, depth), _alpha_key(body, inner, depth + 2))
        case Decide(s, x, a, y, b):
            return (
                "Decide",
                _alpha_key(s, bound, depth),
                _alpha_key(a, {**bound, x: depth + 1}, depth + 1),
                _alpha_key(b, {**bound, y: depth + 1}, depth + 1),
            )
    return (type(t).__name__,) + tuple(_alpha_key(c, bound, depth) for c in children(t))


def alpha_equal(s: Term, t: Term) -> bool:
    return s == t or _alpha_key(s, {}, 0) == _alpha_key(t, {}, 0)


@dataclass(frozen=True)
class Hole:
    """One-hole context: the path from the root to the hole.

    Each path element is the index into ``children`` of the node on the way.
    """

    path: tuple[int, ...] = ()

    def plug(self, root: Term, filler: Term) -> Term:
        return replace_at(root, self.path, filler)

    def parent(self) -> Hole:
        return Hole(self.path[:-1])


def subterm_at(t: Term, path: tuple[int, ...]) -> Term:
    for i in path:
        t = children(t)[i]
    return t


def replace_at(t: Term, path: tuple[int, ...], filler: Term) -> Term:
    if not path:
        return filler
    kids = list(children(t))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], filler)
    return rebuild(t, tuple(kids))


def principal_index(t: Term) -> int | None:
    """Which child holds the principal position of ``t``, or None if ``t`` itself does."""
    match t:
        case Decide() | Spread():
            return 0
        case Ap():
            return 0
        case CbvAp():
            return 1
        case CbvPair():
            return 0
    return None


def principal_subterm(t: Term) -> tuple[Term, Hole]:
    """The principal subterm of ``t`` together with the context around it."""
    path = []
    while (i := principal_index(t)) is not None:
        path.append(i)
        t = children(t)[i]
    return t, Hole(tuple(path))


class Measure(NamedTuple):
    """Operator counts compared lexicographically.

    ``nc`` counts decide/spread/apply, ``cbv`` call-by-value applies, ``npr``
    pairs, ``cn`` cbv pairs and injections; ``size`` is the node count, which
    makes the lambda-stripping rules decrease too.
    """

    nc: int
    cbv: int
    npr: int
    cn: int
    size: int


def measure(t: Term) -> Measure:
    nc = cbv = npr = cn = n = 0
    stack = [t]
    while stack:
        u = stack.pop()
        n += 1
        if isinstance(u, (Decide, Spread, Ap)):
            nc += 1
        elif isinstance(u, CbvAp):
            cbv += 1
        elif isinstance(u, Pair):
            npr += 1
        elif isinstance(u, (CbvPair, Inl, Inr)):
            cn += 1
        stack.extend(children(u))
    return Measure(nc, cbv, npr, cn, n)


def size(t: Term) -> int:
    return measure(t).size


def _str(self) -> str:
    from .syntax import format_term

    return format_term(self)


for _cls in (Var, Pair, Inl, Inr, Lam, Ap, Spread, Decide, CbvAp, CbvPair, Stuck):
    _cls.__str__ = _str
