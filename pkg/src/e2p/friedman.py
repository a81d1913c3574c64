"""Intuitionistic proofs by way of the A-translation.

A minimal proof of ``phi^A`` for a fresh atom ``A`` stays valid when ``A`` is
read as ``False``; cutting it against a proof of ``phi^False => phi`` gives an
intuitionistic proof of ``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count

from . import formula as F
from .derive import DerivationResult, prf_driver
from .eval import DEFAULT_FUEL
from .formula import Formula
from .proof import INTUITIONISTIC, ProofTree, check_proof, node
from .term import Term


class _Names:
    def __init__(self, avoid=()):
        self.avoid = set(avoid)
        self.n = count()

    def __call__(self, prefix: str) -> str:
        while True:
            name = f"{prefix}{next(self.n)}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name


def _to_plain(phi: Formula, h: str, fresh: _Names) -> ProofTree:
    """Proof of ``h: phi^False |- phi``."""
    match phi:
        case F.Atom():
            x, y = fresh("h"), fresh("h")
            return node("LeftOr", h, x, y, node("Axiom", x), node("FalseElim", y))
        case F.FalseC():
            return node("FalseElim", h)
        case F.And(a, b):
            x, y = fresh("h"), fresh("h")
            return node("LeftAnd", h, x, y, node("RightAnd", _to_plain(a, x, fresh), _to_plain(b, y, fresh)))
        case F.Or(a, b):
            x, y = fresh("h"), fresh("h")
            return node(
                "LeftOr", h, x, y, node("RightOrL", _to_plain(a, x, fresh)), node("RightOrR", _to_plain(b, y, fresh))
            )
        case F.Imp(a, b):
            x, y = fresh("h"), fresh("h")
            return node("RightImp", x, node("LeftImp", h, y, _to_trans(a, x, fresh), _to_plain(b, y, fresh)))
        case F.All(z, body):
            d, w = fresh("e"), fresh("h")
            inner = _to_plain(F.subst_domain_var(body, z, d), w, fresh)
            return node("RightAll", d, node("LeftAll", h, d, w, inner))
        case F.Ex(z, body):
            d, w = fresh("e"), fresh("h")
            inner = _to_plain(F.subst_domain_var(body, z, d), w, fresh)
            return node("LeftEx", h, d, w, node("RightEx", d, inner))
    raise TypeError(f"not a formula: {phi!r}")


def _to_trans(phi: Formula, h: str, fresh: _Names) -> ProofTree:
    """Proof of ``h: phi |- phi^False``."""
    match phi:
        case F.Atom():
            return node("RightOrL", node("Axiom", h))
        case F.FalseC():
            return node("Axiom", h)
        case F.And(a, b):
            x, y = fresh("h"), fresh("h")
            return node("LeftAnd", h, x, y, node("RightAnd", _to_trans(a, x, fresh), _to_trans(b, y, fresh)))
        case F.Or(a, b):
            x, y = fresh("h"), fresh("h")
            return node(
                "LeftOr", h, x, y, node("RightOrL", _to_trans(a, x, fresh)), node("RightOrR", _to_trans(b, y, fresh))
            )
        case F.Imp(a, b):
            x, y = fresh("h"), fresh("h")
            return node("RightImp", x, node("LeftImp", h, y, _to_plain(a, x, fresh), _to_trans(b, y, fresh)))
        case F.All(z, body):
            d, w = fresh("e"), fresh("h")
            inner = _to_trans(F.subst_domain_var(body, z, d), w, fresh)
            return node("RightAll", d, node("LeftAll", h, d, w, inner))
        case F.Ex(z, body):
            d, w = fresh("e"), fresh("h")
            inner = _to_trans(F.subst_domain_var(body, z, d), w, fresh)
            return node("LeftEx", h, d, w, node("RightEx", d, inner))
    raise TypeError(f"not a formula: {phi!r}")


def false_instantiation_equivalence(phi: Formula) -> tuple[ProofTree, ProofTree]:
    """Intuitionistic proofs of ``phi^False => phi`` and ``phi => phi^False``."""
    if not F.is_closed(phi):
        raise ValueError("formula must be closed")
    fresh = _Names(F.all_vars(phi))
    h = fresh("h")
    back = node("RightImp", h, _to_plain(phi, h, fresh))
    h = fresh("h")
    forth = node("RightImp", h, _to_trans(phi, h, fresh))
    return back, forth


def replace_atom_in_proof(pt: ProofTree, rel: str, by: Formula) -> ProofTree:
    """Substitute for a nullary atom in the formulas a proof mentions (cut formulas)."""
    params = tuple(p if isinstance(p, str) else F.replace_atom(p, rel, by) for p in pt.params)
    return ProofTree(pt.rule, params, tuple(replace_atom_in_proof(p, rel, by) for p in pt.premises))


def _labels(pt: ProofTree) -> set[str]:
    return {p for n in pt.nodes() for p in n.params if isinstance(p, str)}


def placeholder_atom(goal: Formula) -> str:
    """A nullary relation name not used in ``goal``, ``bot`` when possible."""
    return F.fresh_name(F.BOT, F.relations(goal))


def translation_goal(goal: Formula, atom: str | None = None) -> tuple[Formula, str]:
    """``goal^A`` for a fresh nullary atom ``A``; the minimal-logic stand-in for ``goal^False``."""
    atom = atom or placeholder_atom(goal)
    return F.a_translate(goal, F.Atom(atom)), atom


def il_proof_from_translation(goal: Formula, ml_proof: ProofTree, atom: str | None = None) -> ProofTree:
    """Intuitionistic proof of ``goal`` from a minimal proof of ``goal^A``.

    ``atom`` names the placeholder ``A`` used in ``ml_proof``; every rule is
    insensitive to which formula an atom stands for, so reading ``A`` as
    ``False`` keeps the proof valid.
    """
    atom = atom or placeholder_atom(goal)
    ml = replace_atom_in_proof(ml_proof, atom, F.FalseC())
    fresh = _Names(_labels(ml) | F.all_vars(goal))
    h = fresh("h")
    pt = node("Cut", F.a_translate(goal, F.FalseC()), h, ml, _to_plain(goal, h, fresh))
    check_proof(goal, pt, INTUITIONISTIC)
    return pt


@dataclass
class IntuitionisticResult:
    proof: ProofTree
    translated_goal: Formula
    atom: str
    derivation: DerivationResult


def prove_intuitionistic(goal: Formula, evd: Term, fuel: int = DEFAULT_FUEL, **kw) -> IntuitionisticResult:
    """Full pipeline: ``evd`` must be evidence for ``goal^A`` with ``A`` the placeholder atom."""
    if not F.is_closed(goal):
        raise ValueError("goal must be closed")
    tgoal, atom = translation_goal(goal)
    res = prf_driver(tgoal, evd, fuel, **kw)
    return IntuitionisticResult(il_proof_from_translation(goal, res.proof, atom), tgoal, atom, res)
