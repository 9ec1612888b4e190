"""Abstract syntax for mixed and classical session processes.

Both calculi share ``Par``, ``New``, ``If`` and ``Inact``; mixed processes add
``Choice`` and classical processes add ``Send``, ``Receive``, ``Select`` and
``Case``.  Names are plain strings.  User names never start with ``%``;
names produced by the translator (``%s1``, ``%t1``, ``%u2`` ...) always do.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

LIN = "lin"
UN = "un"
OUT = "!"
IN = "?"

GENERATED_PREFIX = "%"


def dual_polarity(pol: str) -> str:
    return IN if pol == OUT else OUT


def is_generated(name: str) -> bool:
    return name.startswith(GENERATED_PREFIX)


def generated(kind: str, counter: int) -> str:
    return f"{GENERATED_PREFIX}{kind}{counter}"


@dataclass(frozen=True, order=True)
class Label:
    """A choice label, optionally carrying a polarity mark (``l^!`` / ``l^?``)."""

    base: str
    mark: str = ""

    def __post_init__(self):
        if self.mark not in ("", OUT, IN):
            raise ValueError(f"bad label mark {self.mark!r}")

    def __str__(self) -> str:
        return f"{self.base}^{self.mark}" if self.mark else self.base


# -- values -----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class BoolV:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class UnitV:
    def __str__(self) -> str:
        return "()"


@dataclass(frozen=True)
class IntV:
    value: int

    def __str__(self) -> str:
        return str(self.value)


Value = Union[Var, BoolV, UnitV, IntV]

TRUE = BoolV(True)
FALSE = BoolV(False)
UNIT = UnitV()

# -- processes ----------------------------------------------------------------
# ``span`` is (line, column) of the construct in its source text, when parsed.
# It never takes part in equality.

_span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Inact:
    span: tuple[int, int] | None = _span


@dataclass(frozen=True)
class Par:
    left: "Process"
    right: "Process"
    span: tuple[int, int] | None = _span


@dataclass(frozen=True)
class New:
    x: str
    y: str
    type: object  # session type for end ``x``; ``None`` when unannotated
    body: "Process"
    span: tuple[int, int] | None = _span

    def __post_init__(self):
        if self.x == self.y:
            raise ValueError(f"restriction binds {self.x!r} twice")


@dataclass(frozen=True)
class If:
    cond: Value
    then: "Process"
    orelse: "Process"
    span: tuple[int, int] | None = _span


@dataclass(frozen=True)
class Branch:
    """``l!v.P`` (payload set) or ``l?z.P`` (binder set)."""

    label: str
    polarity: str
    payload: Value | None
    binder: str | None
    cont: "Process"
    span: tuple[int, int] | None = _span

    def __post_init__(self):
        if self.polarity == OUT:
            ok = self.payload is not None and self.binder is None
        elif self.polarity == IN:
            ok = self.payload is None and self.binder is not None
        else:
            ok = False
        if not ok:
            raise ValueError(f"malformed branch {self.label}{self.polarity}")

    @property
    def key(self) -> tuple[str, str]:
        return (self.label, self.polarity)


@dataclass(frozen=True)
class Choice:
    q: str
    subject: str
    branches: tuple[Branch, ...]
    span: tuple[int, int] | None = _span

    def __post_init__(self):
        if not self.branches:
            raise ValueError("a choice needs at least one branch")
        object.__setattr__(self, "branches", tuple(self.branches))


@dataclass(frozen=True)
class Send:
    subject: str
    payload: Value
    cont: "Process"
    span: tuple[int, int] | None = _span


@dataclass(frozen=True)
class Receive:
    q: str
    subject: str
    binder: str
    cont: "Process"
    span: tuple[int, int] | None = _span


@dataclass(frozen=True)
class Select:
    subject: str
    label: Label
    cont: "Process"
    span: tuple[int, int] | None = _span


@dataclass(frozen=True)
class Case:
    subject: str
    arms: tuple[tuple[Label, "Process"], ...]
    span: tuple[int, int] | None = _span

    def __post_init__(self):
        arms = tuple(sorted(self.arms, key=lambda a: a[0]))
        labels = [lab for lab, _ in arms]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate case arm labels on {self.subject}")
        object.__setattr__(self, "arms", arms)

    def arm(self, label: Label) -> "Process | None":
        for lab, body in self.arms:
            if lab == label:
                return body
        return None


Process = Union[Inact, Par, New, If, Choice, Send, Receive, Select, Case]
MIXED_ONLY = (Choice,)
CLASSICAL_ONLY = (Send, Receive, Select, Case)

INACT = Inact()


def par(*procs: Process) -> Process:
    """Left-nested parallel composition; the empty product is ``0``."""
    procs = [p for p in procs]
    if not procs:
        return INACT
    out = procs[0]
    for p in procs[1:]:
        out = Par(out, p)
    return out


def par_components(p: Process) -> Iterator[Process]:
    if isinstance(p, Par):
        yield from par_components(p.left)
        yield from par_components(p.right)
    else:
        yield p


def calculus_of(p: Process) -> str | None:
    """Return ``"mixed"``, ``"classical"`` or ``None`` for calculus-neutral terms."""
    found = None
    for node in walk(p):
        kind = "mixed" if isinstance(node, MIXED_ONLY) else (
            "classical" if isinstance(node, CLASSICAL_ONLY) else None)
        if kind is None:
            continue
        if found and kind != found:
            raise ValueError("process mixes constructs of both calculi")
        found = kind
    return found


def children(p: Process) -> tuple[Process, ...]:
    match p:
        case Par(left, right):
            return (left, right)
        case New(body=body):
            return (body,)
        case If(_, then, orelse):
            return (then, orelse)
        case Choice(branches=branches):
            return tuple(b.cont for b in branches)
        case Send(cont=cont) | Receive(cont=cont) | Select(cont=cont):
            return (cont,)
        case Case(arms=arms):
            return tuple(body for _, body in arms)
    return ()


def walk(p: Process) -> Iterator[Process]:
    stack = [p]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


# -- names ------------------------------------------------------------------


def value_names(v: Value) -> set[str]:
    return {v.name} if isinstance(v, Var) else set()


def free_names(p: Process) -> set[str]:
    match p:
        case Inact():
            return set()
        case Par(left, right):
            return free_names(left) | free_names(right)
        case New(x, y, _, body):
            return free_names(body) - {x, y}
        case If(cond, then, orelse):
            return value_names(cond) | free_names(then) | free_names(orelse)
        case Choice(_, subject, branches):
            out = {subject}
            for b in branches:
                if b.polarity == OUT:
                    out |= value_names(b.payload) | free_names(b.cont)
                else:
                    out |= free_names(b.cont) - {b.binder}
            return out
        case Send(subject, payload, cont):
            return {subject} | value_names(payload) | free_names(cont)
        case Receive(_, subject, binder, cont):
            return {subject} | (free_names(cont) - {binder})
        case Select(subject, _, cont):
            return {subject} | free_names(cont)
        case Case(subject, arms):
            out = {subject}
            for _, body in arms:
                out |= free_names(body)
            return out
    raise TypeError(f"not a process: {p!r}")


def all_names(p: Process) -> set[str]:
    """Every name occurring in ``p``, free or bound."""
    out: set[str] = set()
    for node in walk(p):
        match node:
            case New(x, y):
                out |= {x, y}
            case If(cond):
                out |= value_names(cond)
            case Choice(subject=subject, branches=branches):
                out.add(subject)
                for b in branches:
                    if b.polarity == OUT:
                        out |= value_names(b.payload)
                    else:
                        out.add(b.binder)
            case Send(subject, payload):
                out.add(subject)
                out |= value_names(payload)
            case Receive(subject=subject, binder=binder):
                out |= {subject, binder}
            case Select(subject=subject) | Case(subject=subject):
                out.add(subject)
    return out


def fresh_variant(name: str, avoid: Iterable[str]) -> str:
    """A deterministic variant of ``name`` not in ``avoid``."""
    avoid = set(avoid)
    if name not in avoid:
        return name
    stem = name + "'"
    candidate = stem
    n = 1
    while candidate in avoid:
        n += 1
        candidate = f"{name}'{n}"
    return candidate


# -- substitution -----------------------------------------------------------


def _subst_value(v: Value, mapping: dict[str, Value]) -> Value:
    if isinstance(v, Var) and v.name in mapping:
        return mapping[v.name]
    return v


def _subst_subject(name: str, mapping: dict[str, Value]) -> str:
    if name in mapping:
        new = mapping[name]
        if not isinstance(new, Var):
            raise ValueError(f"cannot substitute {new} for channel {name}")
        return new.name
    return name


def rename(p: Process, mapping: dict[str, str]) -> Process:
    """Capture-avoiding renaming of free names."""
    return _subst(p, {k: Var(v) for k, v in mapping.items()})


def substitute(p: Process, v: Value, z: str) -> Process:
    """``p[v/z]``: replace free occurrences of ``z`` by ``v``, refreshing binders."""
    if isinstance(v, Var) and v.name == z:
        return p
    return _subst(p, {z: v})


def _binder_refresh(binders: list[str], body_free: set[str], mapping: dict[str, Value]):
    """Drop shadowed entries and pick fresh names for binders that would capture."""
    inner = {k: val for k, val in mapping.items() if k not in binders}
    incoming = set()
    for k, val in inner.items():
        if k in body_free:
            incoming |= value_names(val)
    renames: dict[str, str] = {}
    if incoming & set(binders):
        avoid = incoming | body_free | set(inner) | set(binders)
        for b in binders:
            if b in incoming:
                nb = fresh_variant(b, avoid)
                avoid.add(nb)
                renames[b] = nb
    for old, nb in renames.items():
        inner[old] = Var(nb)
    return inner, renames


def _subst(p: Process, mapping: dict[str, Value]) -> Process:
    if not mapping:
        return p
    match p:
        case Inact():
            return p
        case Par(left, right, span):
            return Par(_subst(left, mapping), _subst(right, mapping), span)
        case New(x, y, t, body, span):
            inner, renames = _binder_refresh([x, y], free_names(body), mapping)
            return New(renames.get(x, x), renames.get(y, y), t, _subst(body, inner), span)
        case If(cond, then, orelse, span):
            return If(_subst_value(cond, mapping), _subst(then, mapping),
                      _subst(orelse, mapping), span)
        case Choice(q, subject, branches, span):
            new_branches = []
            for b in branches:
                if b.polarity == OUT:
                    new_branches.append(Branch(b.label, OUT, _subst_value(b.payload, mapping),
                                               None, _subst(b.cont, mapping), b.span))
                else:
                    inner, renames = _binder_refresh([b.binder], free_names(b.cont), mapping)
                    new_branches.append(Branch(b.label, IN, None, renames.get(b.binder, b.binder),
                                               _subst(b.cont, inner), b.span))
            return Choice(q, _subst_subject(subject, mapping), tuple(new_branches), span)
        case Send(subject, payload, cont, span):
            return Send(_subst_subject(subject, mapping), _subst_value(payload, mapping),
                        _subst(cont, mapping), span)
        case Receive(q, subject, binder, cont, span):
            inner, renames = _binder_refresh([binder], free_names(cont), mapping)
            return Receive(q, _subst_subject(subject, mapping), renames.get(binder, binder),
                           _subst(cont, inner), span)
        case Select(subject, label, cont, span):
            return Select(_subst_subject(subject, mapping), label, _subst(cont, mapping), span)
        case Case(subject, arms, span):
            return Case(_subst_subject(subject, mapping),
                        tuple((lab, _subst(body, mapping)) for lab, body in arms), span)
    raise TypeError(f"not a process: {p!r}")


def alpha_equivalent(p: Process, q: Process) -> bool:
    from .congruence import alpha_normal

    return alpha_normal(p) == alpha_normal(q)
