"""Reduction semantics, bounded exploration and barbs for both calculi.

A state is kept in hoisted form: every restriction at the top, the rest a
flat list of prefixed components.  Restriction names are preserved and only
renamed when two of them (or a free name) clash.  A redex is a pair of
components whose subjects are the two ends of one restriction; either end
may play either role.  After an interaction the annotation of the
restriction advances to the continuation type, so typed states stay typed.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .congruence import canonical_key
from .context import Context, TypingError
from .sessiontypes import advance, is_un, unfold, MChoice, PLUS
from .syntax import (
    IN, LIN, OUT, UN, BoolV, Case, Choice, If, Inact, New, Par, Receive, Select, Send,
    fresh_variant, free_names, par, rename, substitute,
)

M0 = "m0"
FULL = "full"


class IllTyped(Exception):
    pass


@dataclass(frozen=True)
class ReductionStep:
    rule: str
    channels: tuple[str, str] | None
    label: object | None
    value: object | None
    result: object = field(compare=False)

    @property
    def tag(self) -> str:
        """Channel pair as written in reduction arrows, e.g. ``s3t3``."""
        if not self.channels:
            return self.rule
        return "".join(n.replace("%", "") for n in self.channels)

    def __str__(self) -> str:
        parts = [self.rule]
        if self.channels:
            parts.append(self.tag)
        if self.label is not None:
            parts.append(str(self.label))
        if self.value is not None:
            parts.append(str(self.value))
        return " ".join(parts)


@dataclass
class Trace:
    start: object
    steps: list[ReductionStep]

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def tags(self) -> list[str]:
        return [s.tag for s in self.steps]

    @property
    def end(self):
        return self.steps[-1].result if self.steps else self.start


# -- hoisting ------------------------------------------------------------------


def hoist(p) -> tuple[list[tuple[str, str, object]], list]:
    """Restrictions and prefixed components of ``p``, renaming apart on clashes."""
    restrictions: list[tuple[str, str, object]] = []
    comps: list = []
    taken = set(free_names(p))

    def go(p):
        match p:
            case Inact():
                return
            case Par(left, right):
                go(left)
                go(right)
            case New(x, y, t, body):
                ren = {}
                for n in (x, y):
                    if n in taken:
                        new = fresh_variant(n, taken | free_names(body))
                        ren[n] = new
                        taken.add(new)
                    else:
                        taken.add(n)
                if ren:
                    body = rename(body, ren)
                restrictions.append((ren.get(x, x), ren.get(y, y), t))
                go(body)
            case _:
                comps.append(p)

    go(p)
    return restrictions, comps


def assemble(restrictions, comps):
    body = par(*comps)
    for x, y, t in reversed(restrictions):
        body = New(x, y, t, body)
    return body


def _ends(restrictions):
    out = {}
    for k, (x, y, _) in enumerate(restrictions):
        out[x] = (k, True)
        out[y] = (k, False)
    return out


def _advance(t, label=None, polarity=None):
    if t is None or is_un(t):
        return t
    nt = advance(t, label, polarity)
    return t if nt is None else nt


def _if_steps(restrictions, comps):
    for i, c in enumerate(comps):
        if isinstance(c, If) and isinstance(c.cond, BoolV):
            branch = c.then if c.cond.value else c.orelse
            rule = "IfT" if c.cond.value else "IfF"
            result = assemble(restrictions, comps[:i] + [branch] + comps[i + 1:])
            yield ReductionStep(rule, None, None, None, result)


def _dedup(steps):
    seen = set()
    out = []
    for s in steps:
        key = (s.rule, s.channels, s.label, s.value, canonical_key(s.result))
        if key not in seen:
            seen.add(key)
            out.append(s)
    return out


# -- mixed -----------------------------------------------------------------------

_MIXED_RULES = {(LIN, LIN): "LinLin", (LIN, UN): "LinUn", (UN, LIN): "UnLin", (UN, UN): "UnUn"}


def reduce_mixed(p, mode: str = M0) -> list[ReductionStep]:
    """Every one-step reduct of a mixed process, up to congruence."""
    restrictions, comps = hoist(p)
    steps = list(_if_steps(restrictions, comps))
    ends = _ends(restrictions)
    for i, ci in enumerate(comps):
        if not isinstance(ci, Choice) or ci.subject not in ends:
            continue
        k, first = ends[ci.subject]
        x, y, t = restrictions[k]
        other = y if first else x
        for j, cj in enumerate(comps):
            if j == i or not isinstance(cj, Choice) or cj.subject != other:
                continue
            rule = _MIXED_RULES[(ci.q, cj.q)]
            if mode == M0 and rule in ("LinUn", "UnLin"):
                continue
            for bo in ci.branches:
                if bo.polarity != OUT:
                    continue
                for bi in cj.branches:
                    if bi.polarity != IN or bi.label != bo.label:
                        continue
                    rest = [c for n, c in enumerate(comps) if n not in (i, j)]
                    kept = [c for c in (ci, cj) if c.q == UN]
                    new_comps = rest + [bo.cont, substitute(bi.cont, bo.payload, bi.binder)] + kept
                    pol = OUT if first else IN
                    nt = _advance(t, bo.label, pol)
                    new_r = restrictions[:k] + [(x, y, nt)] + restrictions[k + 1:]
                    steps.append(ReductionStep(rule, (x, y), bo.label, bo.payload,
                                               assemble(new_r, new_comps)))
    return _dedup(steps)


# -- classical --------------------------------------------------------------------------


def reduce_classical(p) -> list[ReductionStep]:
    restrictions, comps = hoist(p)
    steps = list(_if_steps(restrictions, comps))
    ends = _ends(restrictions)
    for i, ci in enumerate(comps):
        if not isinstance(ci, (Send, Select)) or ci.subject not in ends:
            continue
        k, first = ends[ci.subject]
        x, y, t = restrictions[k]
        other = y if first else x
        for j, cj in enumerate(comps):
            if j == i or getattr(cj, "subject", None) != other:
                continue
            rest = [c for n, c in enumerate(comps) if n not in (i, j)]
            if isinstance(ci, Send) and isinstance(cj, Receive):
                rule = "UnCom" if cj.q == UN else "LinCom"
                new_comps = rest + [ci.cont, substitute(cj.cont, ci.payload, cj.binder)]
                if cj.q == UN:
                    new_comps.append(cj)
                nt = _advance(t)
                new_r = restrictions[:k] + [(x, y, nt)] + restrictions[k + 1:]
                steps.append(ReductionStep(rule, (x, y), None, ci.payload, assemble(new_r, new_comps)))
            elif isinstance(ci, Select) and isinstance(cj, Case):
                arm = cj.arm(ci.label)
                if arm is None:
                    continue
                nt = _advance(t, ci.label)
                new_r = restrictions[:k] + [(x, y, nt)] + restrictions[k + 1:]
                steps.append(ReductionStep("Case", (x, y), ci.label, None,
                                           assemble(new_r, rest + [ci.cont, arm])))
    return _dedup(steps)


def reduce(p, calculus: str, mode: str = M0) -> list[ReductionStep]:
    if calculus == "mixed":
        return reduce_mixed(p, mode)
    return reduce_classical(p)


# -- exploration ------------------------------------------------------------------------


@dataclass
class Exploration:
    """Breadth-first state graph up to a depth bound; states keyed by canonical form."""

    start: object
    start_key: str
    depth_limit: int
    states: dict[str, object] = field(default_factory=dict)
    depth: dict[str, int] = field(default_factory=dict)
    edges: dict[str, list[tuple[ReductionStep, str]]] = field(default_factory=dict)
    preds: dict[str, list[tuple[str, ReductionStep]]] = field(default_factory=dict)
    truncated: bool = False  # some state at the bound still had reducts
    stopped: bool = False  # the caller's stop condition ended the search early

    def keys_at(self, d: int) -> list[str]:
        return [k for k, v in self.depth.items() if v == d]

    def find(self, predicate) -> list[str]:
        """State keys satisfying ``predicate(process)``, shallowest first."""
        hits = [k for k, p in self.states.items() if predicate(p)]
        return sorted(hits, key=lambda k: (self.depth[k], k))

    def shortest_traces(self, target: str, limit: int = 1000) -> list[Trace]:
        """All shortest traces from the start to ``target`` (up to ``limit``)."""
        out: list[Trace] = []

        def back(key, suffix):
            if len(out) >= limit:
                return
            if key == self.start_key:
                out.append(Trace(self.start, list(reversed(suffix))))
                return
            d = self.depth[key]
            for src, step in self.preds.get(key, []):
                if self.depth[src] == d - 1:
                    back(src, suffix + [step])

        if target in self.depth:
            back(target, [])
        out.sort(key=lambda tr: [str(s) for s in tr.steps])
        return out

    def traces(self, limit: int = 10_000) -> list[Trace]:
        """Maximal traces of length at most the depth bound (up to ``limit``)."""
        out: list[Trace] = []

        def go(key, steps):
            if len(out) >= limit:
                return
            succ = self.edges.get(key, [])
            if not succ or len(steps) >= self.depth_limit:
                out.append(Trace(self.start, list(steps)))
                return
            for step, dst in succ:
                go(dst, steps + [step])

        go(self.start_key, [])
        return out


def explore(p, depth_limit: int, calculus: str, mode: str = M0, *, max_states: int = 200_000,
            stop=None) -> Exploration:
    """Breadth-first exploration; ``stop(ex)`` is consulted after each complete layer."""
    key = canonical_key(p)
    ex = Exploration(p, key, depth_limit)
    ex.states[key] = p
    ex.depth[key] = 0
    layer = [key]
    for d in range(depth_limit + 1):
        if stop is not None and stop(ex):
            ex.stopped = True
            break
        nxt = []
        for k in layer:
            steps = reduce(ex.states[k], calculus, mode)
            if d == depth_limit:
                if steps:
                    ex.truncated = True
                continue
            out = ex.edges.setdefault(k, [])
            for s in steps:
                dk = canonical_key(s.result)
                out.append((s, dk))
                if dk not in ex.states:
                    ex.states[dk] = s.result
                    ex.depth[dk] = d + 1
                    nxt.append(dk)
                ex.preds.setdefault(dk, []).append((k, s))
            if len(ex.states) > max_states:
                ex.truncated = True
                return ex
        layer = nxt
        if not layer:
            break
    return ex


# -- barbs ----------------------------------------------------------------------------------


def _require_typed(ctx: Context, p, calculus: str):
    from .typing_classical import check_process_classical
    from .typing_mixed import check_process

    try:
        if calculus == "mixed":
            check_process(ctx, p)
        else:
            check_process_classical(ctx, p)
    except TypingError as e:
        raise IllTyped(str(e)) from e


def _syntactic_barbs(p, ctx: Context | None, calculus: str) -> set[str]:
    restrictions, comps = hoist(p)
    bound = {n for x, y, _ in restrictions for n in (x, y)}
    out = set()
    for c in comps:
        subject = getattr(c, "subject", None)
        if subject is None or subject in bound:
            continue
        if calculus == "classical":
            if isinstance(c, (Send, Select)):
                out.add(subject)
        elif isinstance(c, Choice) and ctx is not None and subject in ctx:
            t = unfold(ctx[subject])
            if isinstance(t, MChoice) and t.view == PLUS:
                out.add(subject)
    return out


def barbs(ctx: Context, p, calculus: str) -> set[str]:
    _require_typed(ctx, p, calculus)
    return _syntactic_barbs(p, ctx, calculus)


def weak_barb(ctx: Context, p, x: str, depth_limit: int, calculus: str = "classical",
              mode: str = M0) -> Trace | None:
    """A shortest trace to a state with a barb on ``x``, or ``None`` within the bound."""
    _require_typed(ctx, p, calculus)
    key = canonical_key(p)
    parent: dict[str, tuple[str, ReductionStep] | None] = {key: None}
    states = {key: p}
    queue = deque([(key, 0)])
    while queue:
        k, d = queue.popleft()
        if x in _syntactic_barbs(states[k], ctx, calculus):
            steps = []
            while parent[k] is not None:
                k, s = parent[k]
                steps.append(s)
            return Trace(p, list(reversed(steps)))
        if d == depth_limit:
            continue
        for s in reduce(states[k], calculus, mode):
            dk = canonical_key(s.result)
            if dk not in parent:
                parent[dk] = (k, s)
                states[dk] = s.result
                queue.append((dk, d + 1))
    return None
