"""Canonical forms for structural congruence.

``canonicalize`` picks a representative of a process's congruence class:

1. every binder is renamed apart, so scope extrusion never captures;
2. each parallel level is flattened, restrictions are hoisted to its top,
   inert parts (``0``, unused restrictions) are dropped and the components
   are sorted by a rendering that ignores bound names;
3. bound names are renumbered ``%0, %1, ...`` in traversal order.  When
   components tie on the name-blind ordering, every permutation of the tie
   is tried and the smallest rendering wins.

With ``gc=True`` closed garbage blocks ``(new a b)(a select l1.0 | ...)``
with ``b`` unused are also deleted at every level, which decides the
extended congruence used to compare encodings.

The procedure is sound by construction (every rewrite is an instance of the
congruence rules); it is complete on the shapes produced by the translation
and the reduction engine but not claimed complete in general.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

from .sessiontypes import alpha_normal as type_alpha_normal
from .sessiontypes import Type
from .syntax import (
    OUT, Branch, Case, Choice, If, Inact, New, Par, Process, Receive, Select, Send,
    Var, free_names, par,
)

_FRESH = "%_"
_CANON = "%"
_MAX_PERMUTATIONS = 5040


# -- rendering ---------------------------------------------------------------


@lru_cache(maxsize=8192)
def type_key(t: Type | None) -> str:
    if t is None:
        return "?"
    from .printer import show_type

    return show_type(type_alpha_normal(t))


def _v(v, nm) -> str:
    return nm(v.name) if isinstance(v, Var) else str(v)


def render(p: Process, nm=lambda n: n) -> str:
    """Compact unambiguous rendering; ``nm`` maps each name occurrence."""
    match p:
        case Inact():
            return "0"
        case Par(left, right):
            return f"({render(left, nm)}|{render(right, nm)})"
        case New(x, y, t, body):
            return f"(new {nm(x)} {nm(y)}:{type_key(t)}){render(body, nm)}"
        case If(cond, then, orelse):
            return f"if {_v(cond, nm)}[{render(then, nm)}][{render(orelse, nm)}]"
        case Choice(q, subject, branches):
            parts = []
            for b in branches:
                arg = _v(b.payload, nm) if b.polarity == OUT else nm(b.binder)
                parts.append(f"{b.label}{b.polarity}{arg}.{render(b.cont, nm)}")
            return f"{q} {nm(subject)}({'+'.join(parts)})"
        case Send(subject, payload, cont):
            return f"{nm(subject)}!{_v(payload, nm)}.{render(cont, nm)}"
        case Receive(q, subject, binder, cont):
            return f"{q} {nm(subject)}?{nm(binder)}.{render(cont, nm)}"
        case Select(subject, label, cont):
            return f"{nm(subject)}<{label}.{render(cont, nm)}"
        case Case(subject, arms):
            inner = ";".join(f"{lab}:{render(body, nm)}" for lab, body in arms)
            return f"{nm(subject)}>{{{inner}}}"
    raise TypeError(f"not a process: {p!r}")


def _blind(name: str) -> str:
    return "#" if name.startswith(_FRESH) else name


# -- binder renaming -----------------------------------------------------------


def _mapv(v, env):
    if isinstance(v, Var) and v.name in env:
        return Var(env[v.name])
    return v


def rebind(p: Process, env: dict[str, str], fresh) -> Process:
    """Rename every binder with ``fresh()`` (pre-order), mapping occurrences through ``env``."""
    m = lambda n: env.get(n, n)
    match p:
        case Inact():
            return p
        case Par(left, right, span):
            return Par(rebind(left, env, fresh), rebind(right, env, fresh), span)
        case New(x, y, t, body, span):
            nx, ny = fresh(), fresh()
            return New(nx, ny, t, rebind(body, {**env, x: nx, y: ny}, fresh), span)
        case If(cond, then, orelse, span):
            return If(_mapv(cond, env), rebind(then, env, fresh), rebind(orelse, env, fresh), span)
        case Choice(q, subject, branches, span):
            out = []
            for b in branches:
                if b.polarity == OUT:
                    out.append(Branch(b.label, b.polarity, _mapv(b.payload, env), None,
                                      rebind(b.cont, env, fresh), b.span))
                else:
                    nz = fresh()
                    out.append(Branch(b.label, b.polarity, None, nz,
                                      rebind(b.cont, {**env, b.binder: nz}, fresh), b.span))
            return Choice(q, m(subject), tuple(out), span)
        case Send(subject, payload, cont, span):
            return Send(m(subject), _mapv(payload, env), rebind(cont, env, fresh), span)
        case Receive(q, subject, binder, cont, span):
            nz = fresh()
            return Receive(q, m(subject), nz, rebind(cont, {**env, binder: nz}, fresh), span)
        case Select(subject, label, cont, span):
            return Select(m(subject), label, rebind(cont, env, fresh), span)
        case Case(subject, arms, span):
            return Case(m(subject), tuple((lab, rebind(body, env, fresh)) for lab, body in arms), span)
    raise TypeError(f"not a process: {p!r}")


def _counter(prefix: str, start: int = 0):
    it = itertools.count(start)
    return lambda: f"{prefix}{next(it)}"


def alpha_normal(p: Process) -> Process:
    """Rename bound names by traversal order without restructuring."""
    return _normalize_types(rebind(p, {}, _counter(_CANON)))


def _normalize_types(p: Process) -> Process:
    return _map_levels(p, lambda q: q)


def _map_levels(p: Process, f) -> Process:
    match p:
        case New(x, y, t, body, span):
            t = type_alpha_normal(t) if t is not None else None
            return f(New(x, y, t, _map_levels(body, f), span))
    return f(_map_children(p, lambda c: _map_levels(c, f)))


def _map_children(p: Process, g) -> Process:
    match p:
        case Par(left, right, span):
            return Par(g(left), g(right), span)
        case New(x, y, t, body, span):
            return New(x, y, t, g(body), span)
        case If(cond, then, orelse, span):
            return If(cond, g(then), g(orelse), span)
        case Choice(q, subject, branches, span):
            return Choice(q, subject, tuple(
                Branch(b.label, b.polarity, b.payload, b.binder, g(b.cont), b.span)
                for b in branches), span)
        case Send(subject, payload, cont, span):
            return Send(subject, payload, g(cont), span)
        case Receive(q, subject, binder, cont, span):
            return Receive(q, subject, binder, g(cont), span)
        case Select(subject, label, cont, span):
            return Select(subject, label, g(cont), span)
        case Case(subject, arms, span):
            return Case(subject, tuple((lab, g(body)) for lab, body in arms), span)
    return p


# -- flattening ----------------------------------------------------------------


def _flatten(p: Process, gc: bool) -> tuple[list[tuple[str, str, Type]], list[Process]]:
    """Split a (renamed-apart) process into hoisted restrictions and prefixed components."""
    match p:
        case Inact():
            return [], []
        case Par(left, right):
            r1, c1 = _flatten(left, gc)
            r2, c2 = _flatten(right, gc)
            return r1 + r2, c1 + c2
        case New(x, y, t, body):
            r, c = _flatten(body, gc)
            return [(x, y, t)] + r, c
    return [], [_map_children(p, lambda c: _structure(c, gc))]


def _is_garbage_select(c: Process, a: str) -> bool:
    return isinstance(c, Select) and c.subject == a and isinstance(c.cont, Inact)


def _collect_garbage(restrictions, comps):
    changed = True
    while changed:
        changed = False
        for i, (a, b, _) in enumerate(restrictions):
            users = [c for c in comps if a in free_names(c) or b in free_names(c)]
            if users and all(_is_garbage_select(c, a) for c in users):
                comps = [c for c in comps if not any(c is u for u in users)]
                del restrictions[i]
                changed = True
                break
    return restrictions, comps


def _drop_unused(restrictions, comps):
    used: set[str] = set()
    for c in comps:
        used |= free_names(c)
    return [r for r in restrictions if r[0] in used or r[1] in used]


def _structure(p: Process, gc: bool) -> Process:
    restrictions, comps = _flatten(p, gc)
    if gc:
        restrictions, comps = _collect_garbage(list(restrictions), comps)
    restrictions = _drop_unused(restrictions, comps)
    comps.sort(key=lambda c: render(c, _blind))
    body = par(*comps)
    for x, y, t in reversed(restrictions):
        body = New(x, y, t, body)
    return body


# -- numbering ---------------------------------------------------------------------


def _level(p: Process):
    restrictions = []
    while isinstance(p, New):
        restrictions.append((p.x, p.y, p.type))
        p = p.body
    comps = [p] if not isinstance(p, Par) else _par_list(p)
    if len(comps) == 1 and isinstance(comps[0], Inact):
        comps = []
    return restrictions, comps


def _par_list(p: Process) -> list[Process]:
    if isinstance(p, Par):
        return _par_list(p.left) + _par_list(p.right)
    return [p]


def _name_sequence(p: Process) -> list[str]:
    out: list[str] = []

    def visit(p: Process):
        match p:
            case New(x, y, _, body):
                out.extend((x, y))
                visit(body)
            case Par(left, right):
                visit(left)
                visit(right)
            case If(cond, then, orelse):
                if isinstance(cond, Var):
                    out.append(cond.name)
                visit(then)
                visit(orelse)
            case Choice(_, subject, branches):
                out.append(subject)
                for b in branches:
                    if b.polarity == OUT:
                        if isinstance(b.payload, Var):
                            out.append(b.payload.name)
                    else:
                        out.append(b.binder)
                    visit(b.cont)
            case Send(subject, payload, cont):
                out.append(subject)
                if isinstance(payload, Var):
                    out.append(payload.name)
                visit(cont)
            case Receive(_, subject, binder, cont):
                out.extend((subject, binder))
                visit(cont)
            case Select(subject, _, cont):
                out.append(subject)
                visit(cont)
            case Case(subject, arms):
                out.append(subject)
                for _, body in arms:
                    visit(body)

    visit(p)
    return out


def _orderings(comps: list[Process]):
    """Candidate orders: the sorted order with every tie group permuted."""
    groups: list[list[Process]] = []
    last = None
    for c in comps:
        key = render(c, _blind)
        if groups and key == last:
            groups[-1].append(c)
        else:
            groups.append([c])
        last = key
    choices = []
    total = 1
    for g in groups:
        distinct = {render(c) for c in g}
        if len(distinct) > 1:
            perms = list(itertools.permutations(g))
        else:
            perms = [tuple(g)]
        total *= len(perms)
        choices.append(perms)
    if total > _MAX_PERMUTATIONS:
        yield list(comps)
        return
    for combo in itertools.product(*choices):
        yield [c for group in combo for c in group]


def _number(p: Process, env: dict[str, str], ctr: int) -> tuple[Process, int]:
    restrictions, comps = _level(p)
    if not restrictions and len(comps) <= 1:
        if not comps:
            return Inact(), ctr
        return _number_prefix(comps[0], env, ctr)
    best = None
    for order in _orderings(comps):
        seq = [n for c in order for n in _name_sequence(c)]
        pos = {}
        for i, n in enumerate(seq):
            pos.setdefault(n, i)
        ordered = sorted(restrictions, key=lambda r: min(pos.get(r[0], len(seq)), pos.get(r[1], len(seq))))
        local = dict(env)
        c = ctr
        new_restrictions = []
        for x, y, t in ordered:
            local[x], local[y] = f"{_CANON}{c}", f"{_CANON}{c + 1}"
            new_restrictions.append((local[x], local[y], t))
            c += 2
        numbered = []
        for comp in order:
            nc, c = _number_prefix(comp, local, c)
            numbered.append(nc)
        body = par(*numbered)
        for x, y, t in reversed(new_restrictions):
            body = New(x, y, type_alpha_normal(t) if t is not None else None, body)
        key = render(body)
        if best is None or key < best[0]:
            best = (key, body, c)
    return best[1], best[2]


def _number_prefix(p: Process, env: dict[str, str], ctr: int) -> tuple[Process, int]:
    m = lambda n: env.get(n, n)
    match p:
        case If(cond, then, orelse):
            t, ctr = _number(then, env, ctr)
            e, ctr = _number(orelse, env, ctr)
            return If(_mapv(cond, env), t, e), ctr
        case Choice(q, subject, branches):
            out = []
            for b in branches:
                if b.polarity == OUT:
                    cont, ctr = _number(b.cont, env, ctr)
                    out.append(Branch(b.label, OUT, _mapv(b.payload, env), None, cont))
                else:
                    nz = f"{_CANON}{ctr}"
                    cont, ctr = _number(b.cont, {**env, b.binder: nz}, ctr + 1)
                    out.append(Branch(b.label, b.polarity, None, nz, cont))
            return Choice(q, m(subject), tuple(out)), ctr
        case Send(subject, payload, cont):
            c, ctr = _number(cont, env, ctr)
            return Send(m(subject), _mapv(payload, env), c), ctr
        case Receive(q, subject, binder, cont):
            nz = f"{_CANON}{ctr}"
            c, ctr = _number(cont, {**env, binder: nz}, ctr + 1)
            return Receive(q, m(subject), nz, c), ctr
        case Select(subject, label, cont):
            c, ctr = _number(cont, env, ctr)
            return Select(m(subject), label, c), ctr
        case Case(subject, arms):
            out = []
            for lab, body in arms:
                b, ctr = _number(body, env, ctr)
                out.append((lab, b))
            return Case(m(subject), tuple(out)), ctr
        case Inact():
            return p, ctr
    return _number(p, env, ctr)


# -- public API ----------------------------------------------------------------------


def canonicalize(p: Process, *, gc: bool = False) -> Process:
    """Canonical representative of ``p`` under structural congruence (``gc``: extended)."""
    apart = rebind(p, {}, _counter(_FRESH))
    structured = _structure(apart, gc)
    numbered, _ = _number(structured, {}, 0)
    return numbered


def canonical_key(p: Process, *, gc: bool = False) -> str:
    return render(canonicalize(p, gc=gc))


def congruent(p: Process, q: Process) -> bool:
    return canonical_key(p) == canonical_key(q)


def ext_congruent(p: Process, q: Process) -> bool:
    return canonical_key(p, gc=True) == canonical_key(q, gc=True)
