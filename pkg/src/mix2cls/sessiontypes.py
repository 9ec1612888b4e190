"""Equirecursive session types for both calculi.

Mixed types have choice nodes whose branches carry a label, a polarity, a
payload and a continuation.  Classical types split those into communication
(``q!T.U`` / ``q?T.U``) and label-only choice (``q+{l: T}`` / ``q&{l: T}``).
``End``, the base types, ``Rec`` and ``TVar`` are shared.

Equivalence, subtyping and duality are decided coinductively: recursive types
are unfolded on demand and a pair already under consideration is assumed to
hold.  The visited set only grows during a query, so each query terminates
once every pair of subterms of the (finitely many) unfoldings has been seen.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .syntax import IN, LIN, OUT, UN, Label, dual_polarity

PLUS = "+"
AMP = "&"


def dual_view(view: str) -> str:
    return AMP if view == PLUS else PLUS


@dataclass(frozen=True)
class End:
    pass


@dataclass(frozen=True)
class UnitT:
    pass


@dataclass(frozen=True)
class BoolT:
    pass


@dataclass(frozen=True)
class IntT:
    pass


@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class Rec:
    var: str
    body: "Type"


@dataclass(frozen=True)
class MBranch:
    label: str
    polarity: str
    payload: "Type"
    cont: "Type"

    @property
    def key(self) -> tuple[str, str]:
        return (self.label, self.polarity)


@dataclass(frozen=True)
class MChoice:
    """Mixed choice type ``q view {l*S.T, ...}``; branches kept sorted by (label, polarity)."""

    q: str
    view: str
    branches: tuple[MBranch, ...]

    def __post_init__(self):
        branches = tuple(sorted(self.branches, key=lambda b: b.key))
        keys = [b.key for b in branches]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate label-polarity pair in choice type")
        object.__setattr__(self, "branches", branches)

    def branch(self, label: str, polarity: str) -> MBranch | None:
        for b in self.branches:
            if b.label == label and b.polarity == polarity:
                return b
        return None

    @property
    def keys(self) -> frozenset[tuple[str, str]]:
        return frozenset(b.key for b in self.branches)


@dataclass(frozen=True)
class Comm:
    q: str
    polarity: str
    payload: "Type"
    cont: "Type"


@dataclass(frozen=True)
class CChoice:
    q: str
    view: str
    arms: tuple[tuple[Label, "Type"], ...]

    def __post_init__(self):
        arms = tuple(sorted(self.arms, key=lambda a: a[0]))
        labels = [lab for lab, _ in arms]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate label in choice type")
        object.__setattr__(self, "arms", arms)

    def arm(self, label: Label) -> "Type | None":
        for lab, t in self.arms:
            if lab == label:
                return t
        return None

    @property
    def labels(self) -> frozenset[Label]:
        return frozenset(lab for lab, _ in self.arms)


Type = Union[End, UnitT, BoolT, IntT, TVar, Rec, MChoice, Comm, CChoice]

END = End()
UNIT_T = UnitT()
BOOL_T = BoolT()
INT_T = IntT()
BASE_TYPES = (UnitT, BoolT, IntT)


class TypeFormError(ValueError):
    """A type is not closed, not contractive, or not a session type where one is needed."""


# -- structure ---------------------------------------------------------------


def components(t: Type) -> tuple[Type, ...]:
    match t:
        case Rec(_, body):
            return (body,)
        case MChoice(branches=branches):
            return tuple(x for b in branches for x in (b.payload, b.cont))
        case Comm(_, _, payload, cont):
            return (payload, cont)
        case CChoice(arms=arms):
            return tuple(a for _, a in arms)
    return ()


def free_tvars(t: Type) -> set[str]:
    match t:
        case TVar(name):
            return {name}
        case Rec(var, body):
            return free_tvars(body) - {var}
    out: set[str] = set()
    for c in components(t):
        out |= free_tvars(c)
    return out


def is_closed(t: Type) -> bool:
    return not free_tvars(t)


def subst_tvar(t: Type, var: str, s: Type) -> Type:
    """``t[s/var]``.  ``s`` is closed in every use here, so no capture can occur."""
    match t:
        case TVar(name):
            return s if name == var else t
        case Rec(v, body):
            if v == var:
                return t
            return Rec(v, subst_tvar(body, var, s))
        case MChoice(q, view, branches):
            return MChoice(q, view, tuple(
                MBranch(b.label, b.polarity, subst_tvar(b.payload, var, s),
                        subst_tvar(b.cont, var, s)) for b in branches))
        case Comm(q, pol, payload, cont):
            return Comm(q, pol, subst_tvar(payload, var, s), subst_tvar(cont, var, s))
        case CChoice(q, view, arms):
            return CChoice(q, view, tuple((lab, subst_tvar(a, var, s)) for lab, a in arms))
    return t


def unfold_once(t: Rec) -> Type:
    return subst_tvar(t.body, t.var, t)


def unfold(t: Type) -> Type:
    """Unfold leading ``rec`` binders until the head is a constructor."""
    seen = 0
    while isinstance(t, Rec):
        t = unfold_once(t)
        seen += 1
        if seen > 10_000:
            raise TypeFormError("type is not contractive")
    return t


def is_contractive(t: Type) -> bool:
    """True iff no ``rec`` binder reaches its own (or an enclosing chain's) variable unguarded."""

    def check(t: Type) -> bool:
        if isinstance(t, Rec):
            chain = []
            body: Type = t
            while isinstance(body, Rec):
                chain.append(body.var)
                body = body.body
            if isinstance(body, TVar) and body.name in chain:
                return False
            return check(body)
        return all(check(c) for c in components(t))

    return check(t)


def require_wellformed(t: Type) -> None:
    if not is_closed(t):
        raise TypeFormError(f"type has free variables {sorted(free_tvars(t))}")
    if not is_contractive(t):
        raise TypeFormError("type is not contractive")


def is_un(t: Type) -> bool:
    match t:
        case End() | UnitT() | BoolT() | IntT():
            return True
        case Rec(_, body):
            return is_un(body)
        case MChoice(q=q) | Comm(q=q) | CChoice(q=q):
            return q == UN
    return False


def is_lin(t: Type) -> bool:
    # every type may be used linearly
    return True


def is_session(t: Type) -> bool:
    match t:
        case End() | MChoice() | Comm() | CChoice():
            return True
        case Rec():
            return is_session(unfold(t))
    return False


def qualifier(t: Type) -> str:
    return UN if is_un(t) else LIN


def alpha_normal(t: Type) -> Type:
    """Rename ``rec`` variables by binding depth so alpha-equivalent types compare equal."""

    def go(t: Type, env: dict[str, str], depth: int) -> Type:
        match t:
            case TVar(name):
                return TVar(env.get(name, name))
            case Rec(var, body):
                fresh = f"r{depth}"
                return Rec(fresh, go(body, {**env, var: fresh}, depth + 1))
            case MChoice(q, view, branches):
                return MChoice(q, view, tuple(
                    MBranch(b.label, b.polarity, go(b.payload, env, depth), go(b.cont, env, depth))
                    for b in branches))
            case Comm(q, pol, payload, cont):
                return Comm(q, pol, go(payload, env, depth), go(cont, env, depth))
            case CChoice(q, view, arms):
                return CChoice(q, view, tuple((lab, go(a, env, depth)) for lab, a in arms))
        return t

    return go(t, {}, 0)


# -- coinductive relations ----------------------------------------------------


def type_equiv(s: Type, t: Type) -> bool:
    return _Equiv().run(s, t)


def subtype(s: Type, t: Type) -> bool:
    return _Subtype().run(s, t)


def are_dual(s: Type, t: Type) -> bool:
    return _Dual().run(s, t)


class _Coinductive:
    """Visited-pair decision procedure; subclasses supply the structural rules."""

    def __init__(self):
        self.visited: set[tuple[Type, Type]] = set()

    def run(self, s: Type, t: Type) -> bool:
        return self.rel(s, t)

    def rel(self, s: Type, t: Type) -> bool:
        if (s, t) in self.visited:
            return True
        if isinstance(s, Rec):
            self.visited.add((s, t))
            return self.rel(unfold_once(s), t)
        if isinstance(t, Rec):
            self.visited.add((s, t))
            return self.rel(s, unfold_once(t))
        return self.step(s, t)

    def step(self, s: Type, t: Type) -> bool:
        raise NotImplementedError


class _Equiv(_Coinductive):
    def step(self, s, t):
        match s, t:
            case (End(), End()) | (UnitT(), UnitT()) | (BoolT(), BoolT()) | (IntT(), IntT()):
                return True
            case MChoice(), MChoice():
                if s.q != t.q or s.view != t.view or s.keys != t.keys:
                    return False
                return all(self.rel(a.payload, t.branch(*a.key).payload)
                           and self.rel(a.cont, t.branch(*a.key).cont) for a in s.branches)
            case Comm(), Comm():
                return (s.q == t.q and s.polarity == t.polarity
                        and self.rel(s.payload, t.payload) and self.rel(s.cont, t.cont))
            case CChoice(), CChoice():
                if s.q != t.q or s.view != t.view or s.labels != t.labels:
                    return False
                return all(self.rel(a, t.arm(lab)) for lab, a in s.arms)
        return False


class _Subtype(_Coinductive):
    def step(self, s, t):
        match s, t:
            case (End(), End()) | (UnitT(), UnitT()) | (BoolT(), BoolT()) | (IntT(), IntT()):
                return True
            case MChoice(), MChoice():
                if s.q != t.q or s.view != t.view:
                    return False
                # internal choice may drop branches, external choice may add them
                if s.view == PLUS:
                    if not t.keys <= s.keys:
                        return False
                    pairs = [(s.branch(*b.key), b) for b in t.branches]
                else:
                    if not s.keys <= t.keys:
                        return False
                    pairs = [(b, t.branch(*b.key)) for b in s.branches]
                return all(self._branch(u, v) for u, v in pairs)
            case Comm(), Comm():
                if s.q != t.q or s.polarity != t.polarity:
                    return False
                payload = (self.rel(t.payload, s.payload) if s.polarity == OUT
                           else self.rel(s.payload, t.payload))
                return payload and self.rel(s.cont, t.cont)
            case CChoice(), CChoice():
                if s.q != t.q or s.view != t.view:
                    return False
                if s.view == PLUS:
                    if not t.labels <= s.labels:
                        return False
                    return all(self.rel(s.arm(lab), a) for lab, a in t.arms)
                if not s.labels <= t.labels:
                    return False
                return all(self.rel(a, t.arm(lab)) for lab, a in s.arms)
        return False

    def _branch(self, u: MBranch, v: MBranch) -> bool:
        if u.polarity == OUT:
            payload = self.rel(v.payload, u.payload)
        else:
            payload = self.rel(u.payload, v.payload)
        return payload and self.rel(u.cont, v.cont)


class _Dual(_Coinductive):
    def step(self, s, t):
        match s, t:
            case End(), End():
                return True
            case MChoice(), MChoice():
                if s.q != t.q or s.view != dual_view(t.view):
                    return False
                if len(s.branches) != len(t.branches):
                    return False
                for b in s.branches:
                    other = t.branch(b.label, dual_polarity(b.polarity))
                    if other is None:
                        return False
                    if not type_equiv(b.payload, other.payload):
                        return False
                    if not self.rel(b.cont, other.cont):
                        return False
                return True
            case Comm(), Comm():
                if s.q != t.q or s.polarity != dual_polarity(t.polarity):
                    return False
                return (subtype(s.payload, t.payload) and subtype(t.payload, s.payload)
                        and self.rel(s.cont, t.cont))
            case CChoice(), CChoice():
                if s.q != t.q or s.view != dual_view(t.view) or s.labels != t.labels:
                    return False
                return all(self.rel(a, t.arm(lab)) for lab, a in s.arms)
        return False


def dual_of(t: Type) -> Type:
    """The structural dual of a closed session type.

    Payloads are not dualized; any recursion variable they mention is closed
    with the recursive type it stands for, so ``are_dual(t, dual_of(t))``.
    """
    if not is_session(t):
        raise TypeFormError("only session types have duals")
    return _dual(t, [])


def _close(t: Type, env: list[tuple[str, Type]]) -> Type:
    for var, rec in reversed(env):
        t = subst_tvar(t, var, rec)
    return t


def _dual(t: Type, env: list[tuple[str, Type]]) -> Type:
    match t:
        case End():
            return t
        case TVar():
            return t
        case Rec(var, body):
            return Rec(var, _dual(body, env + [(var, t)]))
        case MChoice(q, view, branches):
            return MChoice(q, dual_view(view), tuple(
                MBranch(b.label, dual_polarity(b.polarity), _close(b.payload, env), _dual(b.cont, env))
                for b in branches))
        case Comm(q, pol, payload, cont):
            return Comm(q, dual_polarity(pol), _close(payload, env), _dual(cont, env))
        case CChoice(q, view, arms):
            return CChoice(q, dual_view(view), tuple((lab, _dual(a, env)) for lab, a in arms))
    raise TypeFormError(f"no dual for {t!r}")


def advance(t: Type, label=None, polarity: str | None = None) -> Type | None:
    """The type of a channel end after one interaction, or ``None`` if ``t`` has no such step.

    ``label`` is a ``str`` for mixed choices (with ``polarity``) and a
    ``Label`` for classical choices; communication steps pass neither.
    """
    u = unfold(t)
    match u:
        case MChoice():
            b = u.branch(label, polarity)
            return b.cont if b else None
        case CChoice():
            return u.arm(label)
        case Comm():
            return u.cont
    return None


__all__ = [
    "AMP", "PLUS", "End", "UnitT", "BoolT", "IntT", "TVar", "Rec", "MBranch", "MChoice",
    "Comm", "CChoice", "Type", "END", "UNIT_T", "BOOL_T", "INT_T", "TypeFormError",
    "free_tvars", "is_closed", "subst_tvar", "unfold", "unfold_once", "is_contractive",
    "require_wellformed", "is_un", "is_lin", "is_session", "qualifier", "alpha_normal",
    "type_equiv", "subtype", "are_dual", "dual_of", "advance", "dual_view", "IN", "OUT",
]
