"""Type-directed translation of mixed sessions into classical sessions.

Label-polarity pairs become marked labels: internal choices keep the
polarity (``l!`` becomes ``l^!``), external choices flip it, so a selection
and the case it meets carry the same label.  Duplicated label-polarity
pairs and the choice between output and input on one label are resolved by
``build_ndchoice``, a race on a fresh un channel.  Unrestricted choices are
wrapped in a replicated-input loop re-armed by ``u!()``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .context import Context, Derivation
from .sessiontypes import (
    AMP, END, PLUS, UNIT_T, CChoice, Comm, MChoice, Rec, TVar, Type, free_tvars, subst_tvar,
    type_equiv, unfold,
)
from .syntax import (
    IN, LIN, OUT, UN, UNIT, Branch, Case, If, Inact, Label, New, Par, Receive, Select, Send,
    Var, all_names, dual_polarity, par,
)


class TranslationError(Exception):
    pass


class EmptyChoice(TranslationError):
    pass


class UnContinuationMismatch(TranslationError):
    pass


ND_LABEL = "ell"
LOOP_BINDER = "_"
# type of the loop trigger end u: un!unit forever
LOOP_T = Rec("a", Comm(UN, OUT, UNIT_T, TVar("a")))


class FreshNameSource:
    """Deterministic supply of generated channel names.

    ``pair("s")`` yields ``(%s1, %t1)``, then ``(%s2, %t2)``; likewise
    ``u``/``v`` and ``a``/``b``.  Names in ``avoid`` are skipped.
    """

    _PARTNER = {"s": "t", "u": "v", "a": "b"}

    def __init__(self, avoid=()):
        self.counters = {k: 0 for k in self._PARTNER}
        self.avoid = set(avoid)

    def _next(self, kind: str) -> int:
        while True:
            self.counters[kind] += 1
            n = self.counters[kind]
            names = (f"%{kind}{n}", f"%{self._PARTNER[kind]}{n}")
            if not (set(names) & self.avoid):
                return n

    def pair(self, kind: str) -> tuple[str, str]:
        n = self._next(kind)
        return f"%{kind}{n}", f"%{self._PARTNER[kind]}{n}"

    def single(self, kind: str) -> str:
        return f"%{kind}{self._next(kind)}"


@dataclass
class Fragment:
    label: str
    polarity: str
    branches: list  # (Branch, Derivation | None) pairs or bare branches


def fragment_choice(branches) -> list[Fragment]:
    """Group branches by (label, polarity), fragments in order of first occurrence."""
    if not branches:
        raise EmptyChoice("a choice needs at least one branch")
    frags: dict[tuple[str, str], Fragment] = {}
    for item in branches:
        b = item[0] if isinstance(item, tuple) else item
        key = (b.label, b.polarity)
        if key not in frags:
            frags[key] = Fragment(b.label, b.polarity, [])
        frags[key].branches.append(item)
    return list(frags.values())


def ndchoice_labels(n: int) -> list[Label]:
    if n == 1:
        return [Label(ND_LABEL)]
    return [Label(f"{ND_LABEL}_{i}") for i in range(1, n + 1)]


def ndchoice_type(n: int) -> Type:
    return Rec("a", CChoice(UN, PLUS, tuple((lab, TVar("a")) for lab in ndchoice_labels(n))))


def build_ndchoice(parts, fresh: FreshNameSource, names: tuple[str, str] | None = None):
    """``(new s t)(s select l_1 | ... | s select l_n | case t of {l_i -> parts[i]})``."""
    parts = list(parts)
    if not parts:
        raise EmptyChoice("NDChoice needs at least one part")
    s, t = names if names is not None else fresh.pair("s")
    labels = ndchoice_labels(len(parts))
    selects = [Select(s, lab, Inact()) for lab in labels]
    case = Case(t, tuple(zip(labels, parts)))
    return New(s, t, ndchoice_type(len(parts)), par(*selects, case))


# -- types ---------------------------------------------------------------------


def translate_type(t: Type) -> Type:
    return _tt(t, [])


def translate_context(ctx: Context) -> Context:
    return Context((n, translate_type(t)) for n, t in ctx.items())


def _close(t: Type, env) -> Type:
    for var, rec in reversed(env):
        t = subst_tvar(t, var, rec)
    return t


def _tvar_names(t: Type) -> set[str]:
    out = set(free_tvars(t))
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Rec):
            out.add(u.var)
            stack.append(u.body)
        elif isinstance(u, MChoice):
            for b in u.branches:
                stack.extend((b.payload, b.cont))
        elif isinstance(u, Comm):
            stack.extend((u.payload, u.cont))
        elif isinstance(u, CChoice):
            stack.extend(a for _, a in u.arms)
    return out


def _tt(t: Type, env) -> Type:
    match t:
        case Rec(var, body):
            inner_env = env + [(var, t)]
            if isinstance(body, MChoice) and body.q == UN:
                return _un_choice(body, var, _close(t, env), inner_env)
            return Rec(var, _tt(body, inner_env))
        case MChoice(q, view, branches):
            if q == UN:
                taken = _tvar_names(_close(t, env)) | {v for v, _ in env}
                var = "b"
                n = 0
                while var in taken:
                    n += 1
                    var = f"b{n}"
                return _un_choice(t, var, _close(t, env), env)
            arms = []
            for b in branches:
                mark = b.polarity if view == PLUS else dual_polarity(b.polarity)
                arms.append((Label(b.label, mark),
                             Comm(LIN, b.polarity, _tt(b.payload, env), _tt(b.cont, env))))
            return CChoice(LIN, view, tuple(arms))
        case Comm() | CChoice():
            raise TranslationError("translate_type expects a mixed type")
    return t


def _un_choice(ch: MChoice, var: str, whole: Type, env) -> Type:
    for b in ch.branches:
        if not type_equiv(_close(b.cont, env), whole):
            raise UnContinuationMismatch(
                f"continuation of branch {b.label}{b.polarity} differs from the un choice type itself")
    arms = []
    for b in ch.branches:
        if ch.view == PLUS:
            # the sender keeps the dual of what it sends, so the payload is the receiver's view
            arms.append((Label(b.label, b.polarity),
                         Comm(LIN, dual_polarity(b.polarity), _tt(b.payload, env), END)))
        else:
            arms.append((Label(b.label, dual_polarity(b.polarity)),
                         Comm(LIN, b.polarity, _tt(b.payload, env), END)))
    payload = CChoice(LIN, AMP, tuple(arms))
    direction = OUT if ch.view == PLUS else IN
    return Rec(var, Comm(UN, direction, payload, TVar(var)))


# -- processes -------------------------------------------------------------------


def translate_process(d: Derivation, fresh: FreshNameSource | None = None):
    """Translate a mixed derivation ``ctx |- P`` into a classical process."""
    if fresh is None:
        fresh = FreshNameSource(all_names(d.term))
    return _Translator(fresh).proc(d)


def translate(ctx: Context, p, *, m0: bool = True):
    """Check ``ctx |- p`` and translate; returns ``(translated_context, process)``."""
    from .typing_mixed import check_process

    d = check_process(ctx, p, m0=m0)
    return translate_context(ctx), translate_process(d)


class _Translator:
    def __init__(self, fresh: FreshNameSource):
        self.fresh = fresh

    def proc(self, d: Derivation):
        match d.rule:
            case "Inact":
                return Inact()
            case "Par":
                return Par(self.proc(d.premises[0]), self.proc(d.premises[1]))
            case "Res":
                p = d.term
                return New(p.x, p.y, translate_type(p.type), self.proc(d.premises[0]))
            case "If":
                return If(d.term.cond, self.proc(d.premises[1]), self.proc(d.premises[2]))
            case "Choice":
                return self.choice(d)
        raise TranslationError(f"cannot translate a {d.rule} node")

    def nd(self, thunks):
        names = self.fresh.pair("s")
        return build_ndchoice([f() for f in thunks], self.fresh, names)

    def leaf(self, branch: Branch, bd: Derivation, subject: str, rearm: str | None):
        if branch.polarity == OUT:
            return Send(subject, branch.payload, self.rearmed(bd.premises[1], rearm))
        return Receive(LIN, subject, branch.binder, self.rearmed(bd.premises[0], rearm))

    def rearmed(self, d: Derivation, rearm: str | None):
        cont = self.proc(d)
        if rearm is None:
            return cont
        call = Send(rearm, UNIT, Inact())
        # u!() | 0 is just u!()
        return call if isinstance(cont, Inact) else Par(call, cont)

    def leaves(self, frag: Fragment, subject: str, rearm: str | None):
        return [lambda b=b, bd=bd: self.leaf(b, bd, subject, rearm) for b, bd in frag.branches]

    def case_arms(self, frags, subject, rearm):
        arms = []
        for f in frags:
            label = Label(f.label, dual_polarity(f.polarity))
            arms.append((label, self.nd(self.leaves(f, subject, rearm))))
        return tuple(arms)

    def choice(self, d: Derivation):
        term = d.term
        x = term.subject
        declared: MChoice = d.info["declared"]
        frags = fragment_choice(list(zip(term.branches, d.premises[1:])))
        if declared.q == LIN and declared.view == AMP:
            return Case(x, self.case_arms(frags, x, None))
        if declared.q == LIN:
            def selector(f):
                return lambda: Select(x, Label(f.label, f.polarity), self.nd(self.leaves(f, x, None)))
            return self.nd([selector(f) for f in frags])
        u, v = self.fresh.pair("u")
        if declared.view == AMP:
            a = self.fresh.single("a")
            body = Receive(LIN, x, a, Case(a, self.case_arms(frags, a, u)))
        else:
            payload = unfold(translate_type(d.info["raw"])).payload

            def sender(f):
                def build():
                    a, b = self.fresh.pair("a")
                    inner = Select(b, Label(f.label, f.polarity), self.nd(self.leaves(f, b, u)))
                    return New(a, b, payload, Send(x, Var(a), inner))
                return build
            body = self.nd([sender(f) for f in frags])
        loop = Par(Send(u, UNIT, Inact()), Receive(UN, v, LOOP_BINDER, body))
        return New(u, v, LOOP_T, loop)


__all__ = [
    "FreshNameSource", "Fragment", "fragment_choice", "build_ndchoice", "ndchoice_labels",
    "ndchoice_type", "translate_type", "translate_context", "translate_process", "translate",
    "TranslationError", "EmptyChoice", "UnContinuationMismatch", "LOOP_T",
]
