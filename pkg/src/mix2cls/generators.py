"""Seeded random types and programs for property tests.

Every generator takes a ``random.Random`` so that runs are reproducible.
"""
from __future__ import annotations

import random

from .context import Context
from .sessiontypes import (
    AMP, BOOL_T, END, INT_T, PLUS, UNIT_T, BoolT, CChoice, Comm, IntT, MBranch, MChoice, Rec,
    TVar, UnitT, dual_of, free_tvars, unfold,
)
from .syntax import (
    FALSE, IN, LIN, OUT, TRUE, UN, UNIT, Branch, Case, Choice, If, Inact, IntV, Label, New, Par,
    Receive, Select, Send, Var, par,
)

LABELS = ("m", "n", "p")
BASE = (INT_T, BOOL_T, UNIT_T)


# -- types -------------------------------------------------------------------------


def _keys(rng: random.Random, k: int):
    pool = [(lab, pol) for lab in LABELS for pol in (OUT, IN)]
    return rng.sample(pool, k)


def random_payload(rng: random.Random, depth: int, rec_vars=()):
    r = rng.random()
    if depth > 0 and r < 0.2:
        return random_type(rng, depth - 1)
    if rec_vars and r < 0.25:
        return TVar(rng.choice(rec_vars))
    return rng.choice(BASE)


def random_type(rng: random.Random, depth: int = 3, rec_vars: tuple = (), fresh=None) -> object:
    """A contractive mixed session type, closed when ``rec_vars`` is empty."""
    fresh = fresh if fresh is not None else iter(range(10_000))
    r = rng.random()
    if depth <= 0 or r < 0.15:
        if rec_vars and rng.random() < 0.5:
            return TVar(rng.choice(rec_vars))
        return END
    view = rng.choice((PLUS, AMP))
    keys = _keys(rng, rng.randint(1, 3))
    if r < 0.35:
        var = f"a{next(fresh)}"
        branches = [MBranch(lab, pol, random_payload(rng, depth - 1, rec_vars + (var,)), TVar(var))
                    for lab, pol in keys]
        return Rec(var, MChoice(UN, view, tuple(branches)))
    if r < 0.55:
        var = f"a{next(fresh)}"
        body = _lin_choice(rng, view, keys, depth, rec_vars + (var,), fresh)
        return Rec(var, body)
    return _lin_choice(rng, view, keys, depth, rec_vars, fresh)


def _lin_choice(rng, view, keys, depth, rec_vars, fresh):
    branches = [MBranch(lab, pol, random_payload(rng, depth - 1, rec_vars),
                        random_type(rng, depth - 1, rec_vars, fresh))
                for lab, pol in keys]
    return MChoice(LIN, view, tuple(branches))


def widen(rng: random.Random, t, depth: int = 3):
    """A random supertype of ``t``: fewer internal branches, more external ones."""
    return _perturb(rng, t, depth, up=True)


def narrow(rng: random.Random, t, depth: int = 3):
    """A random subtype of ``t``."""
    return _perturb(rng, t, depth, up=False)


def _payload_vars(t) -> set[str]:
    match t:
        case Rec(_, body):
            return _payload_vars(body)
        case MChoice(_, _, branches):
            out = set()
            for b in branches:
                out |= free_tvars(b.payload) | _payload_vars(b.payload) | _payload_vars(b.cont)
            return out
    return set()


def _perturb(rng, t, depth, up):
    match t:
        case Rec(var, body):
            # a payload mentioning any recursion variable may see this one contravariantly
            if _payload_vars(body):
                return t
            return Rec(var, _perturb(rng, body, depth, up))
        case MChoice(q, view, branches):
            kept = list(branches)
            drop = (view == PLUS) == up
            if drop and len(kept) > 1 and rng.random() < 0.5:
                kept.pop(rng.randrange(len(kept)))
            elif not drop and rng.random() < 0.5:
                used = {b.key for b in kept}
                free = [k for k in _keys(rng, 6) if k not in used]
                if free:
                    lab, pol = free[0]
                    cont = branches[0].cont if q == UN else random_type(rng, max(depth - 1, 0))
                    kept.append(MBranch(lab, pol, rng.choice(BASE), cont))
            out = []
            for b in kept:
                cont = b.cont if q == UN else _perturb(rng, b.cont, depth - 1, up)
                out.append(MBranch(b.label, b.polarity, b.payload, cont))
            return MChoice(q, view, tuple(out))
    return t


# -- well-typed mixed programs -------------------------------------------------------------


class _Names:
    def __init__(self):
        self.n = 0

    def __call__(self, stem: str) -> str:
        self.n += 1
        return f"{stem}{self.n}"


def program_type(rng: random.Random, depth: int):
    """A closed session type with finite linear part, so that a finite process can inhabit it."""
    r = rng.random()
    if depth <= 0 or r < 0.15:
        return END
    view = rng.choice((PLUS, AMP))
    keys = _keys(rng, rng.randint(1, 3))
    if r < 0.35:
        branches = [MBranch(lab, pol, rng.choice(BASE), TVar("a")) for lab, pol in keys]
        return Rec("a", MChoice(UN, view, tuple(branches)))
    branches = [MBranch(lab, pol, rng.choice(BASE), program_type(rng, depth - 1)) for lab, pol in keys]
    return MChoice(LIN, view, tuple(branches))


def _literal(rng, t, scope):
    candidates = [z for z, s in scope if s == t]
    if candidates and rng.random() < 0.5:
        return Var(rng.choice(candidates))
    match t:
        case IntT():
            return IntV(rng.randint(0, 9))
        case BoolT():
            return rng.choice((TRUE, FALSE))
        case UnitT():
            return UNIT
    raise ValueError(t)


def _session(rng, depth, names, scope):
    """A closed process ``(new x y: T)(P | Q)`` with both ends fully used."""
    t = program_type(rng, min(depth, 3))
    x, y = names("x"), names("y")
    body = par(_use(rng, x, t, depth, names, scope), _use(rng, y, dual_of(t), depth, names, scope))
    return New(x, y, t, body)


def _idle(rng, depth, names, scope):
    """A closed process that holds no outer linear names."""
    if depth > 1 and rng.random() < 0.3:
        return _session(rng, depth - 1, names, scope)
    return Inact()


def _use(rng, x, t, depth, names, scope):
    u = unfold(t)
    if not isinstance(u, MChoice):
        return _idle(rng, depth, names, scope)
    if u.view == PLUS:
        picked = rng.sample(list(u.branches), rng.randint(1, len(u.branches)))
    else:
        picked = list(u.branches)
    if rng.random() < 0.3:
        picked.append(rng.choice(picked))  # a duplicated label-polarity pair
    rng.shuffle(picked)
    branches = []
    for b in picked:
        if b.polarity == OUT:
            value, binder, inner = _literal(rng, b.payload, scope), None, scope
        else:
            value, binder = None, names("z")
            inner = scope + [(binder, b.payload)]
        if u.q == UN:
            cont = _idle(rng, depth - 1, names, inner)
        else:
            cont = _use(rng, x, b.cont, depth - 1, names, inner)
            if depth > 1 and rng.random() < 0.2:
                cont = par(cont, _session(rng, depth - 2, names, inner))
        branches.append(Branch(b.label, b.polarity, value, binder, cont))
    p = Choice(u.q, x, tuple(branches))
    bools = [z for z, s in scope if s == BOOL_T]
    if u.q == UN and bools and rng.random() < 0.3:
        p = If(Var(rng.choice(bools)), p, p)
    return p


def random_program(rng: random.Random, depth: int = 4):
    """A closed, well-typed (under M0) mixed program of choice nesting at most ``depth``."""
    names = _Names()
    parts = [_session(rng, depth, names, [])]
    if rng.random() < 0.3:
        parts.append(_session(rng, depth, names, []))
    if rng.random() < 0.2:
        return Context(), If(rng.choice((TRUE, FALSE)), par(*parts), _session(rng, depth, names, []))
    return Context(), par(*parts)


# -- NDChoice instances -----------------------------------------------------------------------


def _classical_type(rng, depth):
    if depth <= 0 or rng.random() < 0.2:
        return END
    r = rng.random()
    if r < 0.5:
        return Comm(LIN, rng.choice((OUT, IN)), rng.choice(BASE), _classical_type(rng, depth - 1))
    labels = [Label(lab) for lab in rng.sample(LABELS, rng.randint(1, 2))]
    return CChoice(LIN, rng.choice((PLUS, AMP)), tuple((lab, _classical_type(rng, depth - 1)) for lab in labels))


def _classical_use(rng, x, t, tail, names):
    """Uses ``x`` at type ``t`` and then continues with ``tail``."""
    match t:
        case Comm(_, pol, payload, cont):
            if pol == OUT:
                return Send(x, _literal(rng, payload, []), _classical_use(rng, x, cont, tail, names))
            return Receive(LIN, x, names("w"), _classical_use(rng, x, cont, tail, names))
        case CChoice(_, view, arms):
            if view == PLUS:
                lab, a = rng.choice(arms)
                return Select(x, lab, _classical_use(rng, x, a, tail, names))
            return Case(x, tuple((lab, _classical_use(rng, x, a, tail, names)) for lab, a in arms))
    return tail


def random_ndchoice_instance(rng: random.Random, n_max: int = 3, ill_typed: float = 0.2):
    """``(ctx, parts)``: classical parts over shared linear channels; some parts may be ill typed."""
    names = _Names()
    ctx_entries = [(f"c{i}", _classical_type(rng, 2)) for i in range(rng.randint(0, 2))]
    if rng.random() < 0.3:
        ctx_entries.append(("r", Rec("a", Comm(UN, OUT, INT_T, TVar("a")))))
    ctx = Context(ctx_entries)
    parts = []
    for _ in range(rng.randint(1, n_max)):
        p = Inact()
        order = [e for e in ctx_entries if e[0] != "r"]
        rng.shuffle(order)
        for x, t in reversed(order):
            p = _classical_use(rng, x, t, p, names)
        if "r" in ctx and rng.random() < 0.5:
            p = Par(Send("r", IntV(rng.randint(0, 9)), Inact()), p)
        parts.append(p)
    if rng.random() < ill_typed:
        k = rng.randrange(len(parts))
        if rng.random() < 0.5:
            parts[k] = Inact()  # leaves any linear channel unused
        else:
            parts[k] = Par(parts[k], Send("nowhere", UNIT, Inact()))
    return ctx, parts


# -- untyped processes for syntax round trips --------------------------------------------------


def random_process(rng: random.Random, depth: int = 4, calculus: str = "mixed"):
    """A syntactically valid process; not necessarily typable."""
    names = _Names()
    return _any(rng, depth, calculus, ["x", "y"], names)


def _any_value(rng, scope):
    r = rng.random()
    if r < 0.3:
        return Var(rng.choice(scope))
    if r < 0.6:
        return IntV(rng.randint(0, 99))
    return rng.choice((TRUE, FALSE, UNIT))


def _any(rng, depth, calculus, scope, names):
    if depth <= 0:
        return Inact()
    r = rng.random()
    if r < 0.1:
        return Inact()
    if r < 0.3:
        return Par(_any(rng, depth - 1, calculus, scope, names), _any(rng, depth - 1, calculus, scope, names))
    if r < 0.45:
        x, y = names("a"), names("b")
        if rng.random() < 0.2:
            ann = None
        elif calculus == "mixed":
            ann = random_type(rng, 2)
        else:
            ann = _classical_type(rng, 2)
        return New(x, y, ann, _any(rng, depth - 1, calculus, scope + [x, y], names))
    if r < 0.55:
        return If(_any_value(rng, scope), _any(rng, depth - 1, calculus, scope, names),
                  _any(rng, depth - 1, calculus, scope, names))
    subject = rng.choice(scope)
    if calculus == "mixed":
        branches = []
        for _ in range(rng.randint(1, 3)):
            lab = rng.choice(LABELS)
            if rng.random() < 0.5:
                branches.append(Branch(lab, OUT, _any_value(rng, scope), None,
                                       _any(rng, depth - 1, calculus, scope, names)))
            else:
                z = names("z")
                branches.append(Branch(lab, IN, None, z, _any(rng, depth - 1, calculus, scope + [z], names)))
        return Choice(rng.choice((LIN, UN)), subject, tuple(branches))
    k = rng.random()
    if k < 0.3:
        return Send(subject, _any_value(rng, scope), _any(rng, depth - 1, calculus, scope, names))
    if k < 0.6:
        z = names("z")
        return Receive(rng.choice((LIN, UN)), subject, z, _any(rng, depth - 1, calculus, scope + [z], names))
    if k < 0.8:
        return Select(subject, _any_label(rng), _any(rng, depth - 1, calculus, scope, names))
    labels = list({_any_label(rng) for _ in range(rng.randint(1, 3))})
    return Case(subject, tuple((lab, _any(rng, depth - 1, calculus, scope, names)) for lab in labels))


def _any_label(rng):
    return Label(rng.choice(LABELS + ("ell", "ell_1")), rng.choice(("", OUT, IN)))
