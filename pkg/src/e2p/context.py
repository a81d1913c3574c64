"""Evidence contexts: ordered declarations plus unique, stratified constraints."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Union

from . import formula as F
from .formula import Formula
from .term import Inl, Inr, Pair, Term, Var, free_vars, is_pattern, subst_term

_INDEXED = re.compile(r"^[A-Za-z_]*?(\d+)$")


@dataclass(frozen=True)
class DomainDecl:
    name: str


@dataclass(frozen=True)
class HypDecl:
    name: str
    type: Formula


@dataclass(frozen=True)
class ConstConstraint:
    """``fun = const(body)`` for ``fun : A => B``."""

    fun: str
    body: Term


@dataclass(frozen=True)
class ApConstraint:
    """``cbv(fun; dom) = body`` for ``fun : all z. P``."""

    fun: str
    dom: str
    body: Term


ContextEntry = Union[DomainDecl, HypDecl, ConstConstraint, ApConstraint]


class ContextError(Exception):
    pass


class IncompatiblePattern(ContextError):
    pass


def var_index(name: str) -> int | None:
    m = _INDEXED.match(name)
    return int(m.group(1)) if m else None


def _next_index(names, prefix: str) -> int:
    best = -1
    for n in names:
        if n.startswith(prefix):
            i = var_index(n)
            if i is not None and n == f"{prefix}{i}":
                best = max(best, i)
    return best + 1


@dataclass(frozen=True)
class EvidenceContext:
    entries: tuple[ContextEntry, ...] = ()
    next_evidence: int = 0
    next_domain: int = 0

    @classmethod
    def of(cls, *entries: ContextEntry) -> EvidenceContext:
        ctx = cls(tuple(entries))
        return ctx._bump()

    def _bump(self) -> EvidenceContext:
        names = self.names()
        return replace(
            self,
            next_evidence=max(self.next_evidence, _next_index(names, "v")),
            next_domain=max(self.next_domain, _next_index(names, "d")),
        )

    def names(self) -> set[str]:
        out = set()
        for e in self.entries:
            if isinstance(e, (DomainDecl, HypDecl)):
                out.add(e.name)
        return out

    def domain_vars(self) -> list[str]:
        return [e.name for e in self.entries if isinstance(e, DomainDecl)]

    def hyps(self) -> list[HypDecl]:
        return [e for e in self.entries if isinstance(e, HypDecl)]

    def constraints(self) -> list[ConstConstraint | ApConstraint]:
        return [e for e in self.entries if isinstance(e, (ConstConstraint, ApConstraint))]

    def is_domain(self, name: str) -> bool:
        return any(isinstance(e, DomainDecl) and e.name == name for e in self.entries)

    def type_of(self, name: str) -> Formula | None:
        for e in self.entries:
            if isinstance(e, HypDecl) and e.name == name:
                return e.type
        return None

    def const_constraint(self, fun: str) -> ConstConstraint | None:
        for e in self.entries:
            if isinstance(e, ConstConstraint) and e.fun == fun:
                return e
        return None

    def ap_constraint(self, fun: str, dom: str) -> ApConstraint | None:
        for e in self.entries:
            if isinstance(e, ApConstraint) and e.fun == fun and e.dom == dom:
                return e
        return None

    def extend(self, *entries: ContextEntry) -> EvidenceContext:
        return replace(self, entries=self.entries + tuple(entries))._bump()

    def fresh_evidence_var(self) -> tuple[str, EvidenceContext]:
        name = f"v{self.next_evidence}"
        return name, replace(self, next_evidence=self.next_evidence + 1)

    def fresh_domain_var(self) -> tuple[str, EvidenceContext]:
        name = f"d{self.next_domain}"
        return name, replace(self, next_domain=self.next_domain + 1)

    def with_counters(self, next_evidence: int, next_domain: int) -> EvidenceContext:
        return replace(
            self,
            next_evidence=max(self.next_evidence, next_evidence),
            next_domain=max(self.next_domain, next_domain),
        )

    def __str__(self):
        return "; ".join(format_entry(e) for e in self.entries)


def fresh_evidence_var(ctx: EvidenceContext) -> tuple[str, EvidenceContext]:
    return ctx.fresh_evidence_var()


def fresh_domain_var(ctx: EvidenceContext) -> tuple[str, EvidenceContext]:
    return ctx.fresh_domain_var()


def format_entry(e: ContextEntry) -> str:
    match e:
        case DomainDecl(name):
            return f"{name}:D"
        case HypDecl(name, ty):
            return f"{name}:{ty}"
        case ConstConstraint(fun, body):
            return f"{fun} = const({body})"
        case ApConstraint(fun, dom, body):
            return f"cbv({fun}; {dom}) = {body}"
    raise TypeError(e)


@dataclass(frozen=True)
class EvidenceStructure:
    context: EvidenceContext
    goal: Formula
    evidence: Term

    def __str__(self):
        ctx = str(self.context)
        return f"{ctx + ' ' if ctx else ''}|= {self.goal}, {self.evidence}"


# -- well-formedness ---------------------------------------------------------

UNDECLARED = "UndeclaredVariable"
DUPLICATE_DECLARATION = "DuplicateDeclaration"
DUPLICATE_CONSTRAINT = "DuplicateConstraint"
STRATIFICATION = "StratificationBreach"
PATTERN_TYPE = "PatternTypeMismatch"
NOT_MINIMAL = "NonMinimalType"


@dataclass(frozen=True)
class Violation:
    kind: str
    entry: ContextEntry
    message: str = ""

    def __str__(self):
        return f"{self.kind} at {format_entry(self.entry)}: {self.message}"


def pattern_mismatch(ctx: EvidenceContext, p: Term, ty: Formula) -> str | None:
    """Why ``p`` is not a pattern of type ``ty`` over ``ctx`` (None if it is)."""
    match p, ty:
        case Var(name), _:
            declared = ctx.type_of(name)
            if declared is None:
                return f"{name} is not a declared hypothesis"
            if not F.alpha_equal(declared, ty):
                return f"{name} has type {declared}, expected {ty}"
            return None
        case Pair(l, r), F.And(a, b):
            return pattern_mismatch(ctx, l, a) or pattern_mismatch(ctx, r, b)
        case Pair(Var(d), r), F.Ex(z, body):
            if not ctx.is_domain(d):
                return f"{d} is not a declared domain variable"
            return pattern_mismatch(ctx, r, F.subst_domain_var(body, z, d))
        case Inl(a), F.Or(l, _):
            return pattern_mismatch(ctx, a, l)
        case Inr(b), F.Or(_, r):
            return pattern_mismatch(ctx, b, r)
    return f"{p} cannot have type {ty}"


def _evidence_vars(ctx: EvidenceContext, p: Term) -> list[str]:
    return [n for n in free_vars(p) if not ctx.is_domain(n)]


def _precedes(ctx: EvidenceContext, a: str, b: str) -> bool:
    ia, ib = var_index(a), var_index(b)
    if ia is not None and ib is not None:
        return ia < ib
    order = [e.name for e in ctx.entries if isinstance(e, HypDecl)]
    return order.index(a) < order.index(b)


def check_wellformed(ctx: EvidenceContext) -> Violation | None:
    """First violated well-formedness condition, or None."""
    seen: set[str] = set()
    consts: set[str] = set()
    aps: set[tuple[str, str]] = set()
    declared = ctx.names()
    for e in ctx.entries:
        match e:
            case DomainDecl(name):
                if name in seen:
                    return Violation(DUPLICATE_DECLARATION, e, f"{name} declared twice")
                seen.add(name)
            case HypDecl(name, ty):
                if name in seen:
                    return Violation(DUPLICATE_DECLARATION, e, f"{name} declared twice")
                for d in sorted(F.free_vars(ty)):
                    if not ctx.is_domain(d) or d not in seen:
                        return Violation(UNDECLARED, e, f"{d} not declared before use")
                if not F.is_minimal(ty):
                    return Violation(NOT_MINIMAL, e, "hypothesis types must be minimal")
                seen.add(name)
            case ConstConstraint(fun, body):
                for n in sorted({fun} | free_vars(body)):
                    if n not in declared:
                        return Violation(UNDECLARED, e, f"{n} not declared")
                if fun in consts:
                    return Violation(DUPLICATE_CONSTRAINT, e, f"second const constraint on {fun}")
                consts.add(fun)
                ty = ctx.type_of(fun)
                if not isinstance(ty, F.Imp):
                    return Violation(PATTERN_TYPE, e, f"{fun} is not of implication type")
                if not is_pattern(body):
                    return Violation(PATTERN_TYPE, e, f"{body} is not a pattern")
                why = pattern_mismatch(ctx, body, ty.r)
                if why:
                    return Violation(PATTERN_TYPE, e, why)
                for n in sorted(_evidence_vars(ctx, body)):
                    if not _precedes(ctx, fun, n):
                        return Violation(STRATIFICATION, e, f"{n} does not come after {fun}")
            case ApConstraint(fun, dom, body):
                for n in sorted({fun, dom} | free_vars(body)):
                    if n not in declared:
                        return Violation(UNDECLARED, e, f"{n} not declared")
                if (fun, dom) in aps:
                    return Violation(DUPLICATE_CONSTRAINT, e, f"second constraint on cbv({fun}; {dom})")
                aps.add((fun, dom))
                ty = ctx.type_of(fun)
                if not isinstance(ty, F.All):
                    return Violation(PATTERN_TYPE, e, f"{fun} is not universally quantified")
                if not ctx.is_domain(dom):
                    return Violation(UNDECLARED, e, f"{dom} is not a domain variable")
                if not is_pattern(body):
                    return Violation(PATTERN_TYPE, e, f"{body} is not a pattern")
                why = pattern_mismatch(ctx, body, F.subst_domain_var(ty.body, ty.var, dom))
                if why:
                    return Violation(PATTERN_TYPE, e, why)
                for n in sorted(_evidence_vars(ctx, body)):
                    if not _precedes(ctx, fun, n):
                        return Violation(STRATIFICATION, e, f"{n} does not come after {fun}")
    return None


def assert_wellformed(ctx: EvidenceContext):
    v = check_wellformed(ctx)
    if v is not None:
        raise ContextError(str(v))


# -- substitution ------------------------------------------------------------


def destructure(p: Term, ty: Formula, taken: set[str]) -> list[ContextEntry]:
    """Declarations for the variables of pattern ``p`` inhabiting ``ty``."""
    match p, ty:
        case Var(name), _:
            if name in taken:
                raise IncompatiblePattern(f"pattern variable {name} is not fresh")
            taken.add(name)
            return [HypDecl(name, ty)]
        case Pair(l, r), F.And(a, b):
            return destructure(l, a, taken) + destructure(r, b, taken)
        case Pair(Var(d), r), F.Ex(z, body):
            if d in taken:
                raise IncompatiblePattern(f"pattern variable {d} is not fresh")
            taken.add(d)
            return [DomainDecl(d)] + destructure(r, F.subst_domain_var(body, z, d), taken)
        case Inl(a), F.Or(l, _):
            return destructure(a, l, taken)
        case Inr(b), F.Or(_, r):
            return destructure(b, r, taken)
    raise IncompatiblePattern(f"{p} cannot inhabit {ty}")


def subst_in_structure(s: EvidenceStructure, v: str, p: Term) -> EvidenceStructure:
    """Replace hypothesis ``v`` by the pattern ``p`` everywhere.

    ``v``'s declaration is swapped for declarations of ``p``'s (fresh)
    variables at the same position; constraint bodies and the evidence are
    rewritten.
    """
    ctx = s.context
    ty = ctx.type_of(v)
    if ty is None:
        raise ContextError(f"{v} is not declared")
    new_decls = destructure(p, ty, ctx.names() - {v})
    entries: list[ContextEntry] = []
    for e in ctx.entries:
        match e:
            case HypDecl(name) if name == v:
                entries.extend(new_decls)
            case ConstConstraint(fun, body):
                entries.append(ConstConstraint(fun, subst_term(body, v, p)))
            case ApConstraint(fun, dom, body):
                entries.append(ApConstraint(fun, dom, subst_term(body, v, p)))
            case _:
                entries.append(e)
    new_ctx = replace(ctx, entries=tuple(entries))._bump()
    return EvidenceStructure(new_ctx, s.goal, subst_term(s.evidence, v, p))
