"""Text formats: formulas, evidence terms, proof files and finite structures.

Printers emit the canonical form; ``parse_x(format_x(v)) == v`` holds for
every value built from the primitive constructors.
"""

from __future__ import annotations

import re

from . import formula as F
from . import term as T
from .formula import Formula
from .term import Term


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int | None = None, text: str | None = None):
        if pos is not None and text is not None:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            msg = f"{line}:{col}: {msg}"
        super().__init__(msg)


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<str>"[^"\n]*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*|\d+)
  | (?P<op>=>|/\\|\\/|[~().,;<>\\=\[\]:])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    keywords: frozenset[str] = frozenset()

    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> str:
        return self.toks[min(self.i + k, len(self.toks) - 1)][1]

    def kind(self) -> str:
        return self.toks[self.i][0]

    def fail(self, msg: str):
        raise ParseError(msg, self.toks[self.i][2], self.text)

    def next(self) -> str:
        tok = self.toks[self.i][1]
        self.i += 1
        return tok

    def accept(self, tok: str) -> bool:
        if self.peek() == tok and self.kind() != "str":
            self.i += 1
            return True
        return False

    def expect(self, tok: str):
        if not self.accept(tok):
            self.fail(f"expected {tok!r}, found {self.peek() or 'end of input'!r}")

    def ident(self) -> str:
        if self.kind() != "ident" or self.peek() in self.keywords or self.peek()[0].isdigit():
            self.fail(f"expected a name, found {self.peek() or 'end of input'!r}")
        return self.next()

    def done(self):
        if self.kind() != "eof":
            self.fail(f"unexpected {self.peek()!r}")


# -- formulas ----------------------------------------------------------------

FORMULA_KEYWORDS = frozenset({"all", "ex", "False"})


class _FormulaParser(_Parser):
    keywords = FORMULA_KEYWORDS

    def formula(self) -> Formula:
        if self.peek() in ("all", "ex"):
            return self.quant()
        left = self.disj()
        if self.accept("=>"):
            return F.Imp(left, self.formula())
        return left

    def quant(self) -> Formula:
        q = F.All if self.next() == "all" else F.Ex
        names = [self.ident()]
        while self.accept(","):
            names.append(self.ident())
        self.expect(".")
        body = self.formula()
        for x in reversed(names):
            body = q(x, body)
        return body

    def disj(self) -> Formula:
        f = self.conj()
        while self.accept("\\/"):
            f = F.Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.accept("/\\"):
            f = F.And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.accept("~"):
            return F.neg(self.unary())
        if self.peek() in ("all", "ex"):
            return self.quant()
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if self.accept("False"):
            return F.FalseC()
        rel = self.ident()
        args: list[str] = []
        if self.accept("("):
            args.append(self.ident())
            while self.accept(","):
                args.append(self.ident())
            self.expect(")")
        return F.Atom(rel, tuple(args))


def parse_formula(text: str) -> Formula:
    p = _FormulaParser(text)
    f = p.formula()
    p.done()
    F.relations(f)  # arity check
    return f


_PREC = {F.Imp: 1, F.Or: 2, F.And: 3}


def format_formula(phi: Formula) -> str:
    return _fmt_f(phi, 0)


def _fmt_f(phi: Formula, ctx: int) -> str:
    """``ctx`` is the binding strength the surrounding position demands."""
    match phi:
        case F.Atom(rel, args):
            return f"{rel}({','.join(args)})" if args else rel
        case F.FalseC():
            return "False"
        case F.Imp(l, F.FalseC()):
            return "~" + _fmt_f(l, 4)
        case F.All(x, body) | F.Ex(x, body):
            kw = "all" if isinstance(phi, F.All) else "ex"
            s = f"{kw} {x}. {_fmt_f(body, 0)}"
            return f"({s})" if ctx > 0 else s
        case F.And(l, r) | F.Or(l, r) | F.Imp(l, r):
            prec = _PREC[type(phi)]
            op = {F.And: "/\\", F.Or: "\\/", F.Imp: "=>"}[type(phi)]
            if isinstance(phi, F.Imp):
                s = f"{_fmt_f(l, prec + 1)} {op} {_fmt_f(r, prec)}"
            else:
                s = f"{_fmt_f(l, prec)} {op} {_fmt_f(r, prec + 1)}"
            return f"({s})" if ctx > prec else s
    raise TypeError(f"not a formula: {phi!r}")


# -- evidence terms ----------------------------------------------------------

TERM_KEYWORDS = frozenset(
    {"inl", "inr", "fst", "snd", "spread", "decide", "cbv", "cbvpair", "stuck", "let", "in", "if", "then", "else"}
)


class _TermParser(_Parser):
    keywords = TERM_KEYWORDS

    def term(self) -> Term:
        tok = self.peek()
        if tok == "\\":
            self.next()
            names = [self.ident()]
            while self.kind() == "ident" or self.peek() == ",":
                self.accept(",")
                names.append(self.ident())
            self.expect(".")
            return T.lams(" ".join(names), self.term())
        if tok == "let":
            self.next()
            x = self.ident()
            if self.accept(","):
                y = self.ident()
                self.expect("=")
                scrut = self.term()
                self.expect("in")
                return T.Spread(scrut, x, y, self.term())
            self.expect("=")
            bound = self.term()
            self.expect("in")
            return T.Ap(T.Lam(x, self.term()), bound)
        if tok == "if":
            self.next()
            c = self.term()
            self.expect("then")
            a = self.term()
            self.expect("else")
            return T.if_then_else(c, a, self.term())
        return self.app()

    def _starts_arg(self) -> bool:
        tok = self.peek()
        if self.kind() == "ident":
            return tok not in ("in", "then", "else", "let", "if")
        return tok in ("(", "<", "\\")

    def app(self) -> Term:
        t = self.arg()
        while self._starts_arg():
            if self.peek() == "\\":
                return T.Ap(t, self.term())
            t = T.Ap(t, self.arg())
        return t

    def arg(self) -> Term:
        tok = self.peek()
        if self.kind() == "ident" and tok in ("inl", "inr", "fst", "snd"):
            self.next()
            a = self.arg()
            return {"inl": T.Inl, "inr": T.Inr, "fst": T.fst, "snd": T.snd}[tok](a)
        if self.accept("stuck"):
            return T.Stuck()
        if self.accept("("):
            t = self.term()
            self.expect(")")
            return t
        if self.accept("<"):
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(">")
            return T.Pair(a, b)
        if self.accept("spread"):
            self.expect("(")
            s = self.term()
            self.expect(";")
            x = self.ident()
            self.expect(",")
            y = self.ident()
            self.expect(".")
            body = self.term()
            self.expect(")")
            return T.Spread(s, x, y, body)
        if self.accept("decide"):
            self.expect("(")
            s = self.term()
            self.expect(";")
            x = self.ident()
            self.expect(".")
            a = self.term()
            self.expect(";")
            y = self.ident()
            self.expect(".")
            b = self.term()
            self.expect(")")
            return T.Decide(s, x, a, y, b)
        if tok in ("cbv", "cbvpair") and self.kind() == "ident":
            self.next()
            self.expect("(")
            a = self.term()
            self.expect(";")
            b = self.term()
            self.expect(")")
            return T.CbvAp(a, b) if tok == "cbv" else T.CbvPair(a, b)
        return T.Var(self.ident())


def parse_term(text: str) -> Term:
    p = _TermParser(text)
    t = p.term()
    p.done()
    return t


def format_term(t: Term) -> str:
    return _fmt_t(t, 0)


# 0: anything, 1: function position, 2: argument position
def _fmt_t(t: Term, ctx: int) -> str:
    match t:
        case T.Var(name):
            return name
        case T.Stuck():
            return "stuck"
        case T.Pair(l, r):
            return f"<{_fmt_t(l, 0)}, {_fmt_t(r, 0)}>"
        case T.Inl(a) | T.Inr(a):
            s = ("inl " if isinstance(t, T.Inl) else "inr ") + _fmt_t(a, 2)
            return f"({s})" if ctx else s
        case T.Lam(x, body):
            s = f"\\{x}. {_fmt_t(body, 0)}"
            return f"({s})" if ctx else s
        case T.Ap(f, a):
            s = f"{_fmt_t(f, 1)} {_fmt_t(a, 2)}"
            return f"({s})" if ctx == 2 else s
        case T.Spread(s, x, y, body):
            return f"spread({_fmt_t(s, 0)}; {x},{y}. {_fmt_t(body, 0)})"
        case T.Decide(s, x, a, y, b):
            return f"decide({_fmt_t(s, 0)}; {x}. {_fmt_t(a, 0)}; {y}. {_fmt_t(b, 0)})"
        case T.CbvAp(f, a):
            return f"cbv({_fmt_t(f, 0)}; {_fmt_t(a, 0)})"
        case T.CbvPair(a, b):
            return f"cbvpair({_fmt_t(a, 0)}; {_fmt_t(b, 0)})"
    raise TypeError(f"not a term: {t!r}")


# -- proof files -------------------------------------------------------------


class _ProofParser(_Parser):
    def tree(self):
        from .proof import PREMISES, ProofTree

        self.expect("(")
        rule = self.next()
        if rule not in PREMISES:
            self.i -= 1
            self.fail(f"unknown rule {rule!r}")
        params: list = []
        while self.peek() not in ("(", ")", ""):
            if self.kind() == "str":
                src = self.next()[1:-1]
                try:
                    params.append(parse_formula(src))
                except ParseError as e:
                    self.i -= 1
                    self.fail(f"bad cut formula: {e}")
            else:
                params.append(self.ident())
        premises = []
        while self.peek() == "(":
            premises.append(self.tree())
        self.expect(")")
        try:
            return ProofTree(rule, tuple(params), tuple(premises))
        except ValueError as e:
            self.fail(str(e))


def parse_proof(text: str):
    """Parse a proof file; returns ``(goal, tree)``."""
    lines = text.split("\n", 1)
    head = lines[0].strip()
    if not head.startswith("goal:"):
        raise ParseError("proof file must start with 'goal: <formula>'")
    goal = parse_formula(head[len("goal:"):])
    p = _ProofParser(lines[1] if len(lines) > 1 else "")
    tree = p.tree()
    p.done()
    return goal, tree


def format_proof_tree(pt, indent: int = 0) -> str:
    params = []
    for x in pt.params:
        params.append(f'"{format_formula(x)}"' if not isinstance(x, str) else x)
    head = " ".join([pt.rule, *params])
    pad = "  " * indent
    if not pt.premises:
        return f"{pad}({head})"
    kids = "\n".join(format_proof_tree(c, indent + 1) for c in pt.premises)
    return f"{pad}({head}\n{kids})"


def format_proof(goal: Formula, pt) -> str:
    return f"goal: {format_formula(goal)}\n{format_proof_tree(pt)}\n"


# -- finite structures -------------------------------------------------------


def parse_structure(text: str) -> dict:
    """``domain=2; P=1; R=[1,0,0,2]; R(0,1)=2; bot=0``.

    Returns ``{"domain": k, "default": {rel: card}, "tables": {rel: [cards]},
    "points": {(rel, args): card}}``; the semantics module builds the
    structure from it.
    """
    spec = {"domain": 1, "default": {}, "tables": {}, "points": {}}
    for item in filter(None, (s.strip() for s in text.replace("\n", ";").split(";"))):
        if "=" not in item:
            raise ParseError(f"expected key=value, found {item!r}")
        key, val = (s.strip() for s in item.split("=", 1))
        try:
            if key == "domain":
                spec["domain"] = int(val)
                continue
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_']*)(?:\(([\d,\s]*)\))?", key)
            if not m:
                raise ParseError(f"bad relation {key!r}")
            rel, args = m.group(1), m.group(2)
            if args is not None:
                point = tuple(int(a) for a in args.split(",") if a.strip())
                spec["points"][(rel, point)] = int(val)
            elif val.startswith("["):
                spec["tables"][rel] = [int(c) for c in val.strip("[]").split(",") if c.strip()]
            else:
                spec["default"][rel] = int(val)
        except ValueError as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"bad value in {item!r}") from None
    if spec["domain"] < 1:
        raise ParseError("domain size must be at least 1")
    return spec
