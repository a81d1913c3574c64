"""Finitary structures: formulas denote finite sets of semantic values.

Membership of a term in ``M(phi)`` is decided by a lazy interpreter that is
independent of the small-step evaluator, followed by a readback at ``phi``:
functions are tabulated over the whole (finite) antecedent, which is the
finitary retraction.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from . import formula as F
from . import term as T
from .context import (
    ApConstraint,
    ConstConstraint,
    EvidenceContext,
    HypDecl,
    assert_wellformed,
    var_index,
)
from .formula import Formula
from .term import Term

# -- semantic values ----------------------------------------------------------


@dataclass(frozen=True)
class AtomToken:
    i: int

    def __str__(self):
        return f"t{self.i}"


@dataclass(frozen=True)
class VStar:
    def __str__(self):
        return "*"


@dataclass(frozen=True)
class Elem:
    """Element ``i`` of the domain ``{0, ..., k-1}``."""

    i: int

    def __str__(self):
        return str(self.i)


@dataclass(frozen=True)
class VPair:
    l: SemValue
    r: SemValue

    def __str__(self):
        return f"<{self.l}, {self.r}>"


@dataclass(frozen=True)
class VInl:
    v: SemValue

    def __str__(self):
        return f"inl {self.v}"


@dataclass(frozen=True)
class VInr:
    v: SemValue

    def __str__(self):
        return f"inr {self.v}"


@dataclass(frozen=True)
class VTable:
    graph: tuple[tuple[SemValue, SemValue], ...]

    def lookup(self, key: SemValue) -> SemValue:
        for a, b in self.graph:
            if a == key:
                return b
        raise KeyError(key)

    def __str__(self):
        return "{" + ", ".join(f"{a} -> {b}" for a, b in self.graph) + "}"


SemValue = Union[AtomToken, VStar, Elem, VPair, VInl, VInr, VTable]


# -- structures ---------------------------------------------------------------


@dataclass(frozen=True)
class FinitaryStructure:
    domain_size: int
    atoms: Mapping[tuple[str, tuple[int, ...]], tuple[SemValue, ...]] = field(default_factory=dict)
    default_atom: tuple[SemValue, ...] = (VStar(),)
    environment: Mapping[str, SemValue] = field(default_factory=dict)
    typing: Mapping[str, Formula | None] = field(default_factory=dict)

    def __post_init__(self):
        if self.domain_size < 1:
            raise ValueError("domain must be non-empty")

    def atom(self, rel: str, args: tuple[int, ...]) -> tuple[SemValue, ...]:
        return self.atoms.get((rel, args), self.default_atom)

    def domain(self) -> list[Elem]:
        return [Elem(i) for i in range(self.domain_size)]

    def bind(self, name: str, value: SemValue, ty: Formula | None = None) -> FinitaryStructure:
        env = dict(self.environment)
        env[name] = value
        typing = dict(self.typing)
        typing[name] = ty
        return FinitaryStructure(self.domain_size, self.atoms, self.default_atom, env, typing)

    def describe(self, relations: Mapping[str, int] | None = None) -> str:
        """Render in the structure file format (cardinalities only)."""
        parts = [f"domain={self.domain_size}"]
        rels = relations if relations is not None else _rels_of(self.atoms)
        for rel in sorted(rels):
            cards = [
                str(len(self.atom(rel, args))) for args in itertools.product(range(self.domain_size), repeat=rels[rel])
            ]
            parts.append(f"{rel}=[{','.join(cards)}]")
        return "; ".join(parts)


def _rels_of(atoms) -> dict[str, int]:
    return {rel: len(args) for rel, args in atoms}


def _arg_elems(phi: F.Atom, env: Mapping[str, SemValue]) -> tuple[int, ...]:
    out = []
    for a in phi.args:
        v = env.get(a)
        if not isinstance(v, Elem):
            raise ValueError(f"domain variable {a} is not bound to an element")
        out.append(v.i)
    return tuple(out)


ENUMERATION_LIMIT = 200_000


class TooLarge(ValueError):
    """A type has too many inhabitants to enumerate."""


def eval_formula(m: FinitaryStructure, phi: Formula, env: Mapping[str, SemValue] | None = None) -> list[SemValue]:
    """All canonical inhabitants of ``M(phi)`` in enumeration order."""
    return list(_eval(m, phi, dict(m.environment) if env is None else env))


def _eval(m: FinitaryStructure, phi: Formula, env) -> tuple[SemValue, ...]:
    match phi:
        case F.Atom(rel):
            return tuple(m.atom(rel, _arg_elems(phi, env)))
        case F.FalseC():
            return ()
        case F.And(a, b):
            bs = _eval(m, b, env)
            return tuple(VPair(x, y) for x in _eval(m, a, env) for y in bs)
        case F.Or(a, b):
            return tuple(VInl(x) for x in _eval(m, a, env)) + tuple(VInr(y) for y in _eval(m, b, env))
        case F.Imp(a, b):
            dom = _eval(m, a, env)
            cod = _eval(m, b, env)
            _guard(len(cod), len(dom))
            return tuple(VTable(tuple(zip(dom, img))) for img in itertools.product(cod, repeat=len(dom)))
        case F.All(z, body):
            dom = m.domain()
            fibres = [_eval(m, body, {**env, z: e}) for e in dom]
            n = 1
            for f in fibres:
                n *= len(f)
            _guard(n, 1)
            return tuple(VTable(tuple(zip(dom, img))) for img in itertools.product(*fibres))
        case F.Ex(z, body):
            return tuple(VPair(e, y) for e in m.domain() for y in _eval(m, body, {**env, z: e}))
    raise TypeError(f"not a formula: {phi!r}")


def _guard(base: int, exp: int):
    if base > 1 and (exp >= ENUMERATION_LIMIT.bit_length() or base**exp > ENUMERATION_LIMIT):
        raise TooLarge(f"more than {ENUMERATION_LIMIT} inhabitants")


def cardinality(m: FinitaryStructure, phi: Formula, env=None, cap: int | None = None) -> int:
    """``|M(phi)|`` computed arithmetically, without enumerating.

    With ``cap`` every intermediate count saturates at ``cap``, so the result
    is ``min(|M(phi)|, cap)`` even when the exact number is astronomically
    large.
    """
    env = dict(m.environment) if env is None else env

    def sat(n):
        return n if cap is None else min(n, cap)

    def card(phi, env):
        match phi:
            case F.Atom(rel):
                return sat(len(m.atom(rel, _arg_elems(phi, env))))
            case F.FalseC():
                return 0
            case F.And(a, b):
                return sat(card(a, env) * card(b, env))
            case F.Or(a, b):
                return sat(card(a, env) + card(b, env))
            case F.Imp(a, b):
                base, exp = card(b, env), card(a, env)
                if cap is not None and base > 1 and exp >= cap.bit_length():
                    return cap
                return sat(base**exp)
            case F.All(z, body):
                n = 1
                for e in m.domain():
                    n = sat(n * card(body, {**env, z: e}))
                return n
            case F.Ex(z, body):
                return sat(sum(card(body, {**env, z: e}) for e in m.domain()))
        raise TypeError(f"not a formula: {phi!r}")

    return card(phi, env)


def m_triv(vars: list[str] | tuple[str, ...] = (), k: int = 1) -> FinitaryStructure:
    """Every atom denotes the one-element type; ``vars`` go to distinct elements."""
    if k < len(vars):
        raise ValueError(f"{len(vars)} variables do not fit in a domain of size {k}")
    if len(set(vars)) != len(vars):
        raise ValueError("variables must be distinct")
    env = {d: Elem(i) for i, d in enumerate(vars)}
    return FinitaryStructure(max(k, 1), {}, (VStar(),), env, {d: None for d in vars})


# -- the lazy interpreter -----------------------------------------------------


class _Diverges(Exception):
    """The term has no value (stuck, shape clash, or a tight function refused its argument)."""


class _OutOfFuel(Exception):
    pass


@dataclass(frozen=True)
class _Atomic:
    v: SemValue


@dataclass(frozen=True)
class _Pair:
    l: _Thunk
    r: _Thunk


@dataclass(frozen=True)
class _Inj:
    left: bool
    v: _Thunk


@dataclass(frozen=True)
class _Closure:
    var: str
    body: Term
    env: dict


@dataclass(frozen=True)
class _Native:
    fn: object  # _Thunk -> value


class _Thunk:
    __slots__ = ("term", "env", "value")

    def __init__(self, term=None, env=None, value=None):
        self.term, self.env, self.value = term, env, value

    @classmethod
    def done(cls, value):
        return cls(value=value)


class _Machine:
    def __init__(self, m: FinitaryStructure, fuel: int):
        self.m = m
        self.fuel = fuel

    def tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise _OutOfFuel()

    def force(self, th: _Thunk):
        if th.value is None:
            th.value = self.whnf(th.term, th.env)
            th.term = th.env = None
        return th.value

    def apply(self, f, arg: _Thunk):
        if isinstance(f, _Closure):
            return self.whnf(f.body, {**f.env, f.var: arg})
        if isinstance(f, _Native):
            return f.fn(arg)
        raise _Diverges("application of a non-function")

    def whnf(self, t: Term, env: dict):
        while True:
            self.tick()
            match t:
                case T.Var(name):
                    if name not in env:
                        raise ValueError(f"unbound variable {name}")
                    return self.force(env[name])
                case T.Stuck():
                    raise _Diverges("stuck")
                case T.Lam(x, body):
                    return _Closure(x, body, env)
                case T.Pair(l, r):
                    return _Pair(_Thunk(l, env), _Thunk(r, env))
                case T.Inl(a):
                    return _Inj(True, _Thunk(a, env))
                case T.Inr(a):
                    return _Inj(False, _Thunk(a, env))
                case T.CbvPair(a, b):
                    return _Pair(_Thunk.done(self.whnf(a, env)), _Thunk(b, env))
                case T.Ap(f, a) | T.CbvAp(f, a):
                    arg = _Thunk(a, env)
                    if isinstance(t, T.CbvAp):
                        arg = _Thunk.done(self.whnf(a, env))
                    fv = self.whnf(f, env)
                    if isinstance(fv, _Closure):
                        t, env = fv.body, {**fv.env, fv.var: arg}
                        continue
                    return self.apply(fv, arg)
                case T.Spread(s, x, y, body):
                    sv = self.whnf(s, env)
                    if not isinstance(sv, _Pair):
                        raise _Diverges("spread of a non-pair")
                    env = {**env, x: sv.l}
                    env[y] = sv.r
                    t = body
                case T.Decide(s, x, a, y, b):
                    sv = self.whnf(s, env)
                    if not isinstance(sv, _Inj):
                        raise _Diverges("decide of a non-injection")
                    t, env = (a, {**env, x: sv.v}) if sv.left else (b, {**env, y: sv.v})
                case _:
                    raise TypeError(f"not a term: {t!r}")

    # semantic value -> runtime value; ``ty`` is needed to read back arguments of tables
    def embed(self, v: SemValue, ty: Formula | None, env: dict):
        match v:
            case AtomToken() | VStar() | Elem():
                return _Atomic(v)
            case VPair(l, r):
                if isinstance(ty, F.Ex):
                    return _Pair(_Thunk.done(_Atomic(l)), _Thunk.done(self.embed(r, ty.body, {**env, ty.var: l})))
                tl, tr = (ty.l, ty.r) if isinstance(ty, F.And) else (None, None)
                return _Pair(_Thunk.done(self.embed(l, tl, env)), _Thunk.done(self.embed(r, tr, env)))
            case VInl(a) | VInr(a):
                sub = None
                if isinstance(ty, F.Or):
                    sub = ty.l if isinstance(v, VInl) else ty.r
                return _Inj(isinstance(v, VInl), _Thunk.done(self.embed(a, sub, env)))
            case VTable(graph):
                return _Native(lambda arg: self._lookup(graph, arg, ty, env))
        raise TypeError(f"not a semantic value: {v!r}")

    def _lookup(self, graph, arg: _Thunk, ty, env):
        if isinstance(ty, F.Imp):
            key = self.readback(self.force(arg), ty.l, env)
            res_ty = ty.r
            res_env = env
        elif isinstance(ty, F.All):
            key = self.force(arg)
            if not isinstance(key, _Atomic) or not isinstance(key.v, Elem):
                raise _Diverges("universal applied to a non-element")
            key = key.v
            res_ty = ty.body
            res_env = {**env, ty.var: key}
        else:
            raise ValueError("cannot apply a table of unknown type")
        for a, b in graph:
            if a == key:
                return self.embed(b, res_ty, res_env)
        raise _Diverges("argument outside the table")

    def readback(self, v, phi: Formula, env: dict) -> SemValue:
        """The retraction: the semantic value of ``v`` at ``phi``, or _Diverges."""
        m = self.m
        match phi:
            case F.Atom(rel):
                if isinstance(v, _Atomic) and v.v in m.atom(rel, _arg_elems(phi, env)):
                    return v.v
                raise _Diverges(f"not an inhabitant of {phi}")
            case F.FalseC():
                raise _Diverges("False is empty")
            case F.And(a, b):
                if not isinstance(v, _Pair):
                    raise _Diverges("expected a pair")
                return VPair(self.readback(self.force(v.l), a, env), self.readback(self.force(v.r), b, env))
            case F.Or(a, b):
                if not isinstance(v, _Inj):
                    raise _Diverges("expected an injection")
                if v.left:
                    return VInl(self.readback(self.force(v.v), a, env))
                return VInr(self.readback(self.force(v.v), b, env))
            case F.Imp(a, b):
                if not isinstance(v, (_Closure, _Native)):
                    raise _Diverges("expected a function")
                graph = []
                for x in _eval(m, a, env):
                    r = self.apply(v, _Thunk.done(self.embed(x, a, env)))
                    graph.append((x, self.readback(r, b, env)))
                return VTable(tuple(graph))
            case F.All(z, body):
                if not isinstance(v, (_Closure, _Native)):
                    raise _Diverges("expected a function")
                graph = []
                for e in m.domain():
                    r = self.apply(v, _Thunk.done(_Atomic(e)))
                    graph.append((e, self.readback(r, body, {**env, z: e})))
                return VTable(tuple(graph))
            case F.Ex(z, body):
                if not isinstance(v, _Pair):
                    raise _Diverges("expected a pair")
                w = self.force(v.l)
                if not isinstance(w, _Atomic) or not isinstance(w.v, Elem) or w.v.i >= m.domain_size:
                    raise _Diverges("witness is not a domain element")
                return VPair(w.v, self.readback(self.force(v.r), body, {**env, z: w.v}))
        raise TypeError(f"not a formula: {phi!r}")


class Membership(enum.Enum):
    MEMBER = "member"
    NOT_MEMBER = "notMember"
    INCONCLUSIVE = "inconclusive"


def interpret(m: FinitaryStructure, t: Term, phi: Formula, fuel: int = 10_000) -> tuple[Membership, SemValue | None]:
    """Membership together with the semantic value read back from ``t``."""
    mach = _Machine(m, fuel)
    env = dict(m.environment)
    rt_env = {}
    for name, v in m.environment.items():
        rt_env[name] = _Thunk.done(mach.embed(v, m.typing.get(name), env))
    try:
        v = mach.whnf(t, rt_env)
        return Membership.MEMBER, mach.readback(v, phi, env)
    except _Diverges:
        return Membership.NOT_MEMBER, None
    except (_OutOfFuel, TooLarge):
        return Membership.INCONCLUSIVE, None
    except RecursionError:
        return Membership.INCONCLUSIVE, None


def check_membership(m: FinitaryStructure, t: Term, phi: Formula, fuel: int = 10_000) -> Membership:
    return interpret(m, t, phi, fuel)[0]


# -- models of evidence contexts ----------------------------------------------


class ModelError(Exception):
    pass


def pattern_value(p: Term, env: Mapping[str, SemValue]) -> SemValue:
    match p:
        case T.Var(name):
            return env[name]
        case T.Pair(l, r):
            return VPair(pattern_value(l, env), pattern_value(r, env))
        case T.Inl(a):
            return VInl(pattern_value(a, env))
        case T.Inr(a):
            return VInr(pattern_value(a, env))
    raise ModelError(f"{p} is not a pattern")


def build_context_model(ctx: EvidenceContext, k: int | None = None) -> FinitaryStructure:
    """A model of ``ctx`` over ``M_triv``: values chosen from the highest index down.

    Constrained functions become tables that honour their constraints; every
    other value is the first inhabitant in enumeration order.
    """
    assert_wellformed(ctx)
    doms = ctx.domain_vars()
    m = m_triv(doms, k if k is not None else max(1, len(doms)))
    env: dict[str, SemValue] = dict(m.environment)
    hyps = ctx.hyps()
    pos = {h.name: i for i, h in enumerate(hyps)}

    def rank(h: HypDecl):
        i = var_index(h.name)
        return (i if i is not None else -1, pos[h.name])

    for h in sorted(hyps, key=rank, reverse=True):
        const = ctx.const_constraint(h.name)
        aps = [c for c in ctx.constraints() if isinstance(c, ApConstraint) and c.fun == h.name]
        ty = h.type
        if const is not None:
            val = pattern_value(const.body, env)
            dom = _eval(m, ty.l, env)
            env[h.name] = VTable(tuple((a, val) for a in dom))
        elif aps:
            fixed = {env[c.dom]: pattern_value(c.body, env) for c in aps}
            graph = []
            for e in m.domain():
                if e in fixed:
                    graph.append((e, fixed[e]))
                else:
                    choices = _eval(m, ty.body, {**env, ty.var: e})
                    if not choices:
                        raise ModelError(f"no value for {h.name} at {e}")
                    graph.append((e, choices[0]))
            env[h.name] = VTable(tuple(graph))
        else:
            choices = _eval(m, ty, env)
            if not choices:
                raise ModelError(f"{ty} is empty in the trivial structure")
            env[h.name] = choices[0]
    typing = {d: None for d in doms}
    typing.update({h.name: h.type for h in hyps})
    model = FinitaryStructure(m.domain_size, m.atoms, m.default_atom, env, typing)
    violated = model_violations(ctx, model)
    if violated:
        raise ModelError("; ".join(violated))
    return model


def model_violations(ctx: EvidenceContext, model: FinitaryStructure) -> list[str]:
    """Constraints and typings of ``ctx`` that ``model`` fails, by re-evaluation."""
    env = model.environment
    bad = []
    for e in ctx.entries:
        match e:
            case HypDecl(name, ty):
                if env.get(name) not in _eval(model, ty, env):
                    bad.append(f"{name} is not in M({ty})")
            case ConstConstraint(fun, body):
                want = pattern_value(body, env)
                if any(b != want for _, b in env[fun].graph):
                    bad.append(f"{fun} is not constantly {want}")
            case ApConstraint(fun, dom, body):
                try:
                    got = env[fun].lookup(env[dom])
                except KeyError:
                    got = None
                if got != pattern_value(body, env):
                    bad.append(f"cbv({fun}; {dom}) is not {pattern_value(body, env)}")
    return bad


# -- sampling uniform validity ------------------------------------------------


def structures(
    relations: Mapping[str, int], k_max: int, atom_card_max: int
) -> Iterator[FinitaryStructure]:
    """Every structure with domain size 1..k_max and atom cardinalities 0..atom_card_max."""
    for k in range(1, k_max + 1):
        instances = [
            (rel, args) for rel in sorted(relations) for args in itertools.product(range(k), repeat=relations[rel])
        ]
        for cards in itertools.product(range(atom_card_max + 1), repeat=len(instances)):
            atoms = {inst: tuple(AtomToken(j) for j in range(c)) for inst, c in zip(instances, cards)}
            yield FinitaryStructure(k, atoms, ())


class Verdict(enum.Enum):
    ALL_MEMBER = "allMember"
    COUNTEREXAMPLE = "counterexample"
    INCONCLUSIVE = "inconclusive"


@dataclass
class SampleResult:
    verdict: Verdict
    structure: FinitaryStructure | None = None
    checked: int = 0


def check_uniform_validity_sample(
    phi: Formula, t: Term, k_max: int = 2, atom_card_max: int = 2, fuel: int = 10_000
) -> SampleResult:
    """Look for a finitary structure in which ``t`` is not evidence for ``phi``."""
    if not F.is_closed(phi):
        raise ValueError("formula must be closed")
    rels = F.relations(phi)
    inconclusive = None
    n = 0
    for m in structures(rels, k_max, atom_card_max):
        n += 1
        res = check_membership(m, t, phi, fuel)
        if res is Membership.NOT_MEMBER:
            return SampleResult(Verdict.COUNTEREXAMPLE, m, n)
        if res is Membership.INCONCLUSIVE and inconclusive is None:
            inconclusive = m
    if inconclusive is not None:
        return SampleResult(Verdict.INCONCLUSIVE, inconclusive, n)
    return SampleResult(Verdict.ALL_MEMBER, None, n)


def structure_from_spec(spec: dict, relations: Mapping[str, int]) -> FinitaryStructure:
    """Build a structure from a parsed structure description.

    Relation instances that the description does not mention get one token.
    """
    k = spec["domain"]
    atoms = {}
    for rel, arity in relations.items():
        tuples = list(itertools.product(range(k), repeat=arity))
        table = spec["tables"].get(rel)
        if table is not None and len(table) != len(tuples):
            raise ValueError(f"{rel} needs {len(tuples)} entries, got {len(table)}")
        for i, args in enumerate(tuples):
            card = spec["default"].get(rel, 1)
            if table is not None:
                card = table[i]
            card = spec["points"].get((rel, args), card)
            atoms[(rel, args)] = tuple(AtomToken(j) for j in range(card))
    for (rel, args) in spec["points"]:
        if rel not in relations or len(args) != relations[rel] or any(a >= k for a in args):
            raise ValueError(f"{rel}{args} does not fit the formula or the domain")
    return FinitaryStructure(k, atoms, ())
