"""``e2p``: command-line front end.

Exit codes: 0 success, 1 bad input, 2 the evidence/proof is rejected or a
counterexample exists, 3 fuel ran out (or the check was inconclusive).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import formula as F
from .derive import NoRuleMatches, StuckEvidence, format_step, prf_driver
from .eval import DEFAULT_FUEL, FuelExhaustedError, normalize
from .friedman import prove_intuitionistic
from .proof import INTUITIONISTIC, MINIMAL, ProofCheckError, check_proof, extract
from .semantics import (
    Membership,
    Verdict,
    cardinality,
    check_membership,
    check_uniform_validity_sample,
    structure_from_spec,
)
from .syntax import (
    ParseError,
    format_formula,
    format_proof,
    format_term,
    parse_formula,
    parse_proof,
    parse_structure,
    parse_term,
)

EXIT_OK, EXIT_INPUT, EXIT_REJECTED, EXIT_FUEL = 0, 1, 2, 3


class _Fail(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def _default_fuel() -> int:
    raw = os.environ.get("E2P_FUEL")
    if raw is None:
        return DEFAULT_FUEL
    try:
        return int(raw)
    except ValueError:
        raise _Fail(EXIT_INPUT, f"E2P_FUEL must be an integer, got {raw!r}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise _Fail(EXIT_INPUT, f"cannot read {path}: {e.strerror}") from None


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _closed_goal(path: str, logic: str = MINIMAL):
    goal = parse_formula(_read(path))
    if not F.is_closed(goal):
        raise _Fail(EXIT_INPUT, f"formula has free variables: {', '.join(sorted(F.free_vars(goal)))}")
    if logic == MINIMAL and not F.is_minimal(goal):
        raise _Fail(EXIT_INPUT, "formula mentions False; use --logic intuitionistic")
    return goal


def cmd_prove(args) -> int:
    goal = _closed_goal(args.formula, args.logic)
    evd = parse_term(_read(args.evidence))
    on_step = None
    if args.trace:
        on_step = lambda n, st: print(format_step(n, st), file=sys.stderr)
    kw = dict(pre_normalize=args.pre_normalize, on_step=on_step)
    if args.logic == MINIMAL:
        res = prf_driver(goal, evd, args.fuel, **kw)
        pt = res.proof
        if res.violations:
            for v in res.violations:
                print(f"measure did not decrease at {v}", file=sys.stderr)
            raise _Fail(EXIT_REJECTED, f"{len(res.violations)} measure violations")
    else:
        pt = prove_intuitionistic(goal, evd, args.fuel, **kw).proof
    _emit(format_proof(goal, pt), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    goal, pt = parse_proof(_read(args.proof))
    check_proof(goal, pt, args.logic)
    print("ok")
    return EXIT_OK


def cmd_extract(args) -> int:
    goal, pt = parse_proof(_read(args.proof))
    check_proof(goal, pt, INTUITIONISTIC)
    _emit(format_term(extract(pt)) + "\n", args.out)
    return EXIT_OK


def cmd_translate(args) -> int:
    phi = parse_formula(_read(args.formula))
    a = F.FalseC() if args.atom == "False" else F.Atom(args.atom)
    _emit(format_formula(F.a_translate(phi, a)) + "\n", args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    phi = _closed_goal(args.formula, INTUITIONISTIC)
    evd = parse_term(_read(args.evidence)) if args.evidence else None
    if args.structure:
        text = args.structure if "=" in args.structure else _read(args.structure)
        try:
            m = structure_from_spec(parse_structure(text), F.relations(phi))
        except ValueError as e:
            raise _Fail(EXIT_INPUT, str(e)) from None
        if evd is None:
            print(f"|M(phi)| = {cardinality(m, phi)}")
            return EXIT_OK
        res = check_membership(m, evd, phi, args.fuel)
        print(res.value)
        return {Membership.MEMBER: EXIT_OK, Membership.NOT_MEMBER: EXIT_REJECTED}.get(res, EXIT_FUEL)
    if evd is None:
        raise _Fail(EXIT_INPUT, "eval needs --evidence or --structure")
    res = check_uniform_validity_sample(phi, evd, args.kmax, args.atomcard, args.fuel)
    rels = F.relations(phi)
    if res.verdict is Verdict.ALL_MEMBER:
        print(f"allMember ({res.checked} structures)")
        return EXIT_OK
    if res.verdict is Verdict.COUNTEREXAMPLE:
        print(f"counterexample: {res.structure.describe(rels)}", file=sys.stderr)
        return EXIT_REJECTED
    print(f"inconclusive: fuel ran out in {res.structure.describe(rels)}", file=sys.stderr)
    return EXIT_FUEL


def cmd_normalize(args) -> int:
    t = parse_term(_read(args.evidence))
    print(format_term(normalize(t, args.fuel)))
    return EXIT_OK


def _positive(s: str) -> int:
    n = int(s)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser(fuel: int) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="e2p", description="Proofs from uniform evidence.")
    sub = ap.add_subparsers(dest="command", required=True)
    logic = dict(choices=[MINIMAL, INTUITIONISTIC], default=MINIMAL)

    p = sub.add_parser("prove", help="build a proof from evidence")
    p.add_argument("formula")
    p.add_argument("evidence")
    p.add_argument("--fuel", type=_positive, default=fuel)
    p.add_argument("--logic", **logic)
    p.add_argument("--pre-normalize", action="store_true")
    p.add_argument("--out")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check", help="check a proof file")
    p.add_argument("proof")
    p.add_argument("--logic", **logic)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("extract", help="evidence term of a proof")
    p.add_argument("proof")
    p.add_argument("--out")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("translate", help="A-translation of a formula")
    p.add_argument("formula")
    p.add_argument("--atom", default="False")
    p.add_argument("--out")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("eval", help="evaluate in finite structures")
    p.add_argument("formula")
    p.add_argument("--evidence")
    p.add_argument("--structure")
    p.add_argument("--kmax", type=_positive, default=2)
    p.add_argument("--atomcard", type=int, default=2)
    p.add_argument("--fuel", type=_positive, default=fuel)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("normalize", help="normal form of an evidence term")
    p.add_argument("evidence")
    p.add_argument("--fuel", type=_positive, default=fuel)
    p.set_defaults(func=cmd_normalize)
    return ap


def main(argv=None) -> int:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    try:
        args = build_parser(_default_fuel()).parse_args(argv)
        return args.func(args)
    except _Fail as e:
        print(f"e2p: {e}", file=sys.stderr)
        return e.code
    except (ParseError, ValueError) as e:
        print(f"e2p: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (NoRuleMatches, StuckEvidence) as e:
        print(f"e2p: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_REJECTED
    except ProofCheckError as e:
        print(f"e2p: proof rejected {e}", file=sys.stderr)
        return EXIT_REJECTED
    except FuelExhaustedError as e:
        print(f"e2p: fuel exhausted after {e.steps} steps", file=sys.stderr)
        return EXIT_FUEL


if __name__ == "__main__":
    sys.exit(main())
