"""Parser for the concrete syntax of both calculi.

Processes::

    P ::= S ('|' S)*
    S ::= 0 | (P) | (new x y[: T]) P | new x y[: T] P | if v then S else S
        | q x (B + ... + B)                      mixed choice
        | x!v[.S] | [q] x?y[.S] | x*?y[.S]        output, input
        | x select l[.S] | case x of {l -> P, ...}
    B ::= l!v[.S] | l?x[.S]

A ``new`` scopes over the rest of the enclosing group.  Types::

    T ::= end | unit | () | bool | int | a | rec a.T | (T)
        | q+{l!T.T, ...} | q&{...}                mixed choice
        | q!T.T | q?T.T | q+{l: T, ...} | q&{...} classical
        | *+{l, ...} | *&{...} | *!T | *?T        SePi abbreviations

A missing qualifier means ``lin``.  Files contain ``type N = T``
declarations followed by ``proc name [x: T, ...] = P`` declarations, or a
single bare process.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .context import Context
from .sessiontypes import (
    AMP, BOOL_T, END, INT_T, PLUS, UNIT_T, CChoice, Comm, MBranch, MChoice, Rec, TVar,
    free_tvars,
)
from .syntax import (
    FALSE, IN, LIN, OUT, TRUE, UN, UNIT, Branch, Case, Choice, If, Inact, IntV, Label, New,
    Par, Receive, Select, Send, Var, calculus_of,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


_TOKEN = re.compile(r"""
    (?P<ws>\s+|//[^\n]*|\#[^\n]*)
  | (?P<arrow>->)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_%][A-Za-z0-9_%']*)
  | (?P<punct>[(){}\[\],:.|+&!?=^*\-])
""", re.VERBOSE)

KEYWORDS = {"lin", "un", "new", "if", "then", "else", "case", "of", "select", "rec", "end",
            "unit", "bool", "int", "integer", "true", "false", "type", "proc"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            out.append(Token(kind, tok, line, pos - line_start + 1))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


@dataclass
class Decl:
    name: str
    context: Context
    process: object
    span: tuple[int, int] | None = None


@dataclass
class SourceFile:
    path: str | None
    calculus: str | None
    types: dict = field(default_factory=dict)
    decls: list[Decl] = field(default_factory=list)

    def get(self, name: str | None = None) -> Decl:
        if name is None:
            return self.decls[0]
        for d in self.decls:
            if d.name == name:
                return d
        raise KeyError(name)


class Parser:
    def __init__(self, text: str, *, sepi: bool = False, aliases: dict | None = None):
        self.toks = tokenize(text)
        self.i = 0
        self.sepi = sepi
        self.aliases = dict(aliases or {})

    # -- token helpers ---------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k) if k else self.tok
        return t.kind != "eof" and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        found = t.text or "end of input"
        return ParseError(f"{msg} (found {found!r})", t.line, t.col)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def name(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error("expected a name")
        self.advance()
        return t.text

    def span(self) -> tuple[int, int]:
        return (self.tok.line, self.tok.col)

    # -- values ------------------------------------------------------------------

    def value(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            return IntV(int(t.text))
        if t.text == "-" and self.peek().kind == "int":
            self.advance()
            return IntV(-int(self.advance().text))
        if t.text == "true":
            self.advance()
            return TRUE
        if t.text == "false":
            self.advance()
            return FALSE
        if t.text == "(" and self.at(")", 1):
            self.advance()
            self.advance()
            return UNIT
        return Var(self.name())

    def binder(self) -> str:
        if self.at("(") and self.at(")", 1):
            self.advance()
            self.advance()
            return "_"
        return self.name()

    def label(self) -> Label:
        t = self.tok
        if t.kind != "ident":
            raise self.error("expected a label")
        self.advance()
        base = t.text
        if self.at("^"):
            self.advance()
            mark = self.advance().text
            if mark not in (OUT, IN):
                raise self.error("expected ! or ? after ^", t)
            return Label(base, mark)
        if self.sepi:
            for suffix, mark in (("_out", OUT), ("_in", IN)):
                if base.endswith(suffix) and len(base) > len(suffix):
                    return Label(base[: -len(suffix)], mark)
        return Label(base)

    # -- processes -----------------------------------------------------------------

    def process(self):
        left = self.seq()
        while self.at("|"):
            sp = self.span()
            self.advance()
            left = Par(left, self.seq(), sp)
        return left

    def cont(self):
        if self.at("."):
            self.advance()
            return self.seq()
        return Inact()

    def new_rest(self, sp, closing: bool):
        x = self.name()
        y = self.name()
        t = None
        if self.at(":"):
            self.advance()
            t = self.type()
        if closing:
            if self.at(")"):
                self.advance()
                body = self.process()
            else:
                body = self.process()
                self.expect(")")
        else:
            body = self.process()
        try:
            return New(x, y, t, body, sp)
        except ValueError as e:
            raise ParseError(str(e), *sp) from None

    def seq(self):
        t = self.tok
        sp = (t.line, t.col)
        if t.kind == "int" and t.text == "0":
            self.advance()
            return Inact(sp)
        if t.text == "(":
            if self.at("new", 1):
                self.advance()
                self.advance()
                return self.new_rest(sp, closing=True)
            self.advance()
            p = self.process()
            self.expect(")")
            return p
        if t.text == "new":
            self.advance()
            return self.new_rest(sp, closing=False)
        if t.text == "if":
            self.advance()
            cond = self.value()
            self.expect("then")
            then = self.seq()
            self.expect("else")
            return If(cond, then, self.seq(), sp)
        if t.text == "case":
            self.advance()
            x = self.name()
            self.expect("of")
            self.expect("{")
            arms = []
            while True:
                lab = self.label()
                self.expect("->")
                arms.append((lab, self.process()))
                if self.at(","):
                    self.advance()
                    continue
                break
            self.expect("}")
            try:
                return Case(x, tuple(arms), sp)
            except ValueError as e:
                raise ParseError(str(e), *sp) from None
        if t.text in (LIN, UN):
            q = self.advance().text
            x = self.name()
            if self.at("("):
                return self.choice(q, x, sp)
            if self.at("?"):
                self.advance()
                z = self.binder()
                return Receive(q, x, z, self.cont(), sp)
            raise self.error("expected a choice or an input after the qualifier")
        if t.kind == "ident" and t.text not in KEYWORDS:
            x = self.name()
            if self.at("!"):
                self.advance()
                v = self.value()
                return Send(x, v, self.cont(), sp)
            if self.at("?"):
                self.advance()
                z = self.binder()
                return Receive(LIN, x, z, self.cont(), sp)
            if self.at("*") and self.at("?", 1):
                self.advance()
                self.advance()
                z = self.binder()
                return Receive(UN, x, z, self.cont(), sp)
            if self.at("select"):
                self.advance()
                lab = self.label()
                return Select(x, lab, self.cont(), sp)
            raise self.error(f"expected !, ?, *? or select after {x}")
        raise self.error("expected a process")

    def choice(self, q, x, sp):
        self.expect("(")
        branches = []
        while True:
            bsp = self.span()
            lab = self.name()
            if self.at("!"):
                self.advance()
                v = self.value()
                branches.append(Branch(lab, OUT, v, None, self.cont(), bsp))
            elif self.at("?"):
                self.advance()
                z = self.binder()
                branches.append(Branch(lab, IN, None, z, self.cont(), bsp))
            else:
                raise self.error("expected ! or ? in a choice branch")
            if self.at("+"):
                self.advance()
                continue
            break
        self.expect(")")
        return Choice(q, x, tuple(branches), sp)

    # -- types -------------------------------------------------------------------------

    def type(self):
        t = self.tok
        text = t.text
        if text in ("end",):
            self.advance()
            return END
        if text == "unit":
            self.advance()
            return UNIT_T
        if text == "bool":
            self.advance()
            return BOOL_T
        if text in ("int", "integer"):
            self.advance()
            return INT_T
        if text == "rec":
            self.advance()
            var = self.name()
            self.expect(".")
            return Rec(var, self.type())
        if text == "(":
            self.advance()
            if self.at(")"):
                self.advance()
                return UNIT_T
            inner = self.type()
            self.expect(")")
            return inner
        if text == "*":
            self.advance()
            return self.star_type()
        q = LIN
        if text in (LIN, UN):
            q = self.advance().text
        if self.tok.text in ("+", "&"):
            view = PLUS if self.advance().text == "+" else AMP
            return self.choice_type(q, view)
        if self.tok.text in ("!", "?"):
            pol = self.advance().text
            payload = self.type()
            self.expect(".")
            return Comm(q, pol, payload, self.type())
        if q != LIN or text == LIN:
            raise self.error("expected a choice or communication type after the qualifier")
        if t.kind == "ident" and text not in KEYWORDS:
            self.advance()
            if text in self.aliases:
                return self.aliases[text]
            return TVar(text)
        raise self.error("expected a type")

    def star_type(self):
        t = self.tok
        if t.text in ("+", "&"):
            view = PLUS if self.advance().text == "+" else AMP
            self.expect("{")
            labels = []
            while not self.at("}"):
                labels.append(self.label())
                if self.at(","):
                    self.advance()
            self.expect("}")
            return Rec("a", CChoice(UN, view, tuple((lab, TVar("a")) for lab in labels)))
        if t.text in ("!", "?"):
            pol = self.advance().text
            payload = self.type()
            var = "a"
            n = 0
            while var in free_tvars(payload):
                n += 1
                var = f"a{n}"
            return Rec(var, Comm(UN, pol, payload, TVar(var)))
        raise self.error("expected +, &, ! or ? after *")

    def choice_type(self, q, view):
        self.expect("{")
        mixed, classical = [], []
        while not self.at("}"):
            if self.tok.kind == "ident" and self.peek().text in ("!", "?"):
                lab = self.name()
                pol = self.advance().text
                payload = self.type()
                self.expect(".")
                mixed.append(MBranch(lab, pol, payload, self.type()))
            else:
                lab = self.label()
                self.expect(":")
                classical.append((lab, self.type()))
            if self.at(","):
                self.advance()
            elif not self.at("}"):
                raise self.error("expected , or }")
        self.expect("}")
        if mixed and classical:
            raise self.error("choice type mixes both calculi")
        try:
            if mixed:
                return MChoice(q, view, tuple(mixed))
            return CChoice(q, view, tuple(classical))
        except ValueError as e:
            raise self.error(str(e)) from None

    # -- files ----------------------------------------------------------------------------

    def source(self, path=None) -> SourceFile:
        sf = SourceFile(path, None, self.aliases)
        while self.at("type"):
            self.advance()
            name = self.name()
            self.expect("=")
            self.aliases[name] = self.type()
        if self.at("proc"):
            while self.at("proc"):
                sp = self.span()
                self.advance()
                name = self.name()
                ctx = Context()
                if self.at("["):
                    ctx = self.context_decl()
                self.expect("=")
                sf.decls.append(Decl(name, ctx, self.process(), sp))
        else:
            sp = self.span()
            ctx = Context()
            if self.at("["):
                ctx = self.context_decl()
            sf.decls.append(Decl("main", ctx, self.process(), sp))
        if self.tok.kind != "eof":
            raise self.error("unexpected trailing input")
        return sf

    def context_decl(self) -> Context:
        self.expect("[")
        entries = []
        while not self.at("]"):
            n = self.name()
            self.expect(":")
            entries.append((n, self.type()))
            if self.at(","):
                self.advance()
        self.expect("]")
        try:
            return Context(entries)
        except ValueError as e:
            raise self.error(str(e)) from None

    def finish(self):
        if self.tok.kind != "eof":
            raise self.error("unexpected trailing input")


def parse_process(text: str, *, sepi: bool = False, aliases: dict | None = None):
    p = Parser(text, sepi=sepi, aliases=aliases)
    out = p.process()
    p.finish()
    return out


def parse_mixed(text: str, **kw):
    p = parse_process(text, **kw)
    if calculus_of(p) == "classical":
        raise ParseError("expected a mixed process, found classical constructs")
    return p


def parse_classical(text: str, **kw):
    p = parse_process(text, **kw)
    if calculus_of(p) == "mixed":
        raise ParseError("expected a classical process, found a mixed choice")
    return p


def parse_type(text: str, *, sepi: bool = False, aliases: dict | None = None):
    p = Parser(text, sepi=sepi, aliases=aliases)
    t = p.type()
    p.finish()
    return t


def parse_context(text: str, **kw) -> Context:
    p = Parser(text, **kw)
    ctx = p.context_decl() if p.at("[") else Context()
    p.finish()
    return ctx


def parse_file(text: str, path: str | None = None, *, sepi: bool = False) -> SourceFile:
    sf = Parser(text, sepi=sepi).source(path)
    kinds = set()
    for d in sf.decls:
        try:
            k = calculus_of(d.process)
        except ValueError as e:
            raise ParseError(f"{d.name}: {e}") from None
        if k:
            kinds.add(k)
    if len(kinds) > 1:
        raise ParseError("file mixes mixed and classical declarations")
    if kinds:
        sf.calculus = kinds.pop()
    elif path and path.endswith(".cls"):
        sf.calculus = "classical"
    else:
        sf.calculus = "mixed"
    return sf


def read_file(path, *, sepi: bool = False) -> SourceFile:
    with open(path, encoding="utf-8") as fh:
        return parse_file(fh.read(), str(path), sepi=sepi)
