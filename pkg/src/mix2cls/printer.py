"""Concrete syntax for processes and types.

The output re-parses to the same AST.  ``sepi=True`` switches to the
SePi-flavoured dialect: ``*+{...}``/``*!T``/``*?T`` abbreviations, label
marks mangled to ``m_out``/``m_in``, generated names ``%s3`` shown as
``s_3`` and unparenthesized ``new``.
"""
from __future__ import annotations

import re

from .sessiontypes import (
    BoolT, CChoice, Comm, End, IntT, MChoice, Rec, TVar, UnitT, free_tvars,
)
from .syntax import (
    OUT, UN, BoolV, Case, Choice, If, Inact, IntV, Label, New, Par, Receive, Select,
    Send, UnitV, Var,
)

_GEN = re.compile(r"^%([a-z]+)(\d+)$")


def sepi_name(name: str) -> str:
    m = _GEN.match(name)
    if m:
        return f"{m.group(1)}_{m.group(2)}"
    return name.replace("%", "_")


def show_label(lab: Label, sepi: bool = False) -> str:
    if not lab.mark:
        return lab.base
    if sepi:
        return f"{lab.base}_{'out' if lab.mark == OUT else 'in'}"
    return f"{lab.base}^{lab.mark}"


# -- types ---------------------------------------------------------------------


def _abbrev(t: Rec):
    body = t.body
    if body.__class__ is CChoice and body.q == UN and body.arms and all(
            a == TVar(t.var) for _, a in body.arms):
        return "choice", body
    if body.__class__ is Comm and body.q == UN and body.cont == TVar(t.var) \
            and t.var not in free_tvars(body.payload):
        return "comm", body
    return None


def show_type(t, sepi: bool = False) -> str:
    match t:
        case End():
            return "end"
        case UnitT():
            return "()" if sepi else "unit"
        case BoolT():
            return "bool"
        case IntT():
            return "int"
        case TVar(name):
            return name
        case Rec(var, body):
            if sepi:
                ab = _abbrev(t)
                if ab and ab[0] == "choice":
                    labels = ", ".join(show_label(lab, True) for lab, _ in ab[1].arms)
                    return f"*{ab[1].view}{{{labels}}}"
                if ab:
                    return f"*{ab[1].polarity}{_payload(ab[1].payload, sepi)}"
            return f"rec {var}.{show_type(body, sepi)}"
        case MChoice(q, view, branches):
            inner = ", ".join(
                f"{b.label}{b.polarity}{_payload(b.payload, sepi)}.{show_type(b.cont, sepi)}"
                for b in branches)
            return f"{q}{view}{{{inner}}}"
        case Comm(q, pol, payload, cont):
            return f"{q}{pol}{_payload(payload, sepi)}.{show_type(cont, sepi)}"
        case CChoice(q, view, arms):
            inner = ", ".join(f"{show_label(lab, sepi)}: {show_type(a, sepi)}" for lab, a in arms)
            return f"{q}{view}{{{inner}}}"
    raise TypeError(f"not a type: {t!r}")


def _payload(t, sepi):
    s = show_type(t, sepi)
    if isinstance(t, (Rec, Comm)) and not s.startswith("*"):
        return f"({s})"
    return s


# -- processes -------------------------------------------------------------------


def show_value(v, sepi: bool = False) -> str:
    match v:
        case Var(name):
            return sepi_name(name) if sepi else name
        case BoolV(value):
            return "true" if value else "false"
        case UnitV():
            return "()"
        case IntV(value):
            return str(value)
    raise TypeError(f"not a value: {v!r}")


class _Printer:
    def __init__(self, sepi: bool, pretty: bool):
        self.sepi = sepi
        self.pretty = pretty

    def n(self, name: str) -> str:
        return sepi_name(name) if self.sepi else name

    def nl(self, ind: int) -> str:
        return "\n" + " " * ind if self.pretty else " "

    def par(self, p, tail: bool, ind: int) -> str:
        if isinstance(p, Par):
            sep = " |" + self.nl(ind)
            return self.par(p.left, False, ind) + sep + self.seq(p.right, tail, ind)
        return self.seq(p, tail, ind)

    def new_head(self, p: New) -> str:
        ann = "" if p.type is None else f": {show_type(p.type, self.sepi)}"
        return f"new {self.n(p.x)} {self.n(p.y)}{ann}"

    def seq(self, p, tail: bool, ind: int) -> str:
        match p:
            case Inact():
                return "0"
            case Par():
                return "(" + self.par(p, True, ind + 1) + ")"
            case New(_, _, _, body):
                if self.sepi:
                    if tail:
                        return self.new_head(p) + self.nl(ind) + self.par(body, True, ind)
                    return "(" + self.new_head(p) + self.nl(ind + 1) + self.par(body, True, ind + 1) + ")"
                text = f"({self.new_head(p)})" + self.nl(ind) + self.par(body, True, ind)
                return text if tail else f"({text})"
            case If(cond, then, orelse):
                return (f"if {show_value(cond, self.sepi)} then {self.seq(then, True, ind)}"
                        f" else {self.seq(orelse, tail, ind)}")
            case Choice(q, subject, branches):
                parts = []
                for b in branches:
                    arg = show_value(b.payload, self.sepi) if b.polarity == OUT else self.binder(b.binder)
                    parts.append(f"{b.label}{b.polarity}{arg}{self.cont(b.cont, True, ind + 4)}")
                return f"{q} {self.n(subject)} (" + " + ".join(parts) + ")"
            case Send(subject, payload, cont):
                return f"{self.n(subject)}!{show_value(payload, self.sepi)}{self.cont(cont, tail, ind)}"
            case Receive(q, subject, binder, cont):
                op = "*?" if q == UN else "?"
                return f"{self.n(subject)}{op}{self.binder(binder)}{self.cont(cont, tail, ind)}"
            case Select(subject, label, cont):
                return f"{self.n(subject)} select {show_label(label, self.sepi)}{self.cont(cont, tail, ind)}"
            case Case(subject, arms):
                inner = []
                for lab, body in arms:
                    inner.append(f"{show_label(lab, self.sepi)} -> {self.par(body, True, ind + 8)}")
                if self.pretty:
                    sep = "," + self.nl(ind + 4)
                    return f"case {self.n(subject)} of {{" + self.nl(ind + 4) + sep.join(inner) + self.nl(ind) + "}"
                return f"case {self.n(subject)} of {{" + ", ".join(inner) + "}"
        raise TypeError(f"not a process: {p!r}")

    def binder(self, name: str) -> str:
        if name == "_" and self.sepi:
            return "()"
        return self.n(name)

    def cont(self, p, tail, ind) -> str:
        if isinstance(p, Inact) and self.sepi:
            return ""
        body = self.seq(p, tail, ind)
        if self.pretty and isinstance(p, (New, Par)):
            return "." + self.nl(ind + 4) + self.seq(p, tail, ind + 4)
        return "." + body


def show_process(p, *, sepi: bool = False, pretty: bool = False) -> str:
    return _Printer(sepi, pretty).par(p, True, 0)


def emit_sepi(p) -> str:
    return show_process(p, sepi=True, pretty=True)


def show_context(ctx, sepi: bool = False) -> str:
    return ", ".join(f"{sepi_name(n) if sepi else n}: {show_type(t, sepi)}" for n, t in ctx.items())
