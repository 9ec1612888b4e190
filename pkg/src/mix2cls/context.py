"""Typing contexts, context split/update, derivation records and typing errors."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .sessiontypes import Type, is_un, type_equiv


class TypingError(Exception):
    """Base class; ``span`` locates the offending construct when known."""

    def __init__(self, message: str, span=None):
        super().__init__(message)
        self.span = span

    def __str__(self) -> str:
        msg = super().__str__()
        if self.span:
            return f"{self.span[0]}:{self.span[1]}: {msg}"
        return msg


class UnboundName(TypingError):
    pass


class LinearLeftover(TypingError):
    pass


class LinearityError(TypingError):
    pass


class LinearReintroduction(TypingError):
    pass


class LabelSetMismatch(TypingError):
    pass


class QualifierViolation(TypingError):
    pass


class DualityFailure(TypingError):
    pass


class SubjectNotChoiceTyped(TypingError):
    pass


class MissingCaseArm(TypingError):
    pass


class UnknownSelectLabel(TypingError):
    pass


class MissingAnnotation(TypingError):
    pass


class TypeMismatch(TypingError):
    pass


class Context:
    """An ordered, immutable map from names to types."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[tuple[str, Type]] = ()):
        d: dict[str, Type] = {}
        for name, t in entries:
            if name in d:
                raise ValueError(f"duplicate context entry {name}")
            d[name] = t
        self._entries = d

    @classmethod
    def of(cls, mapping: dict[str, Type]) -> "Context":
        return cls(mapping.items())

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __getitem__(self, name: str) -> Type:
        return self._entries[name]

    def get(self, name: str, default=None):
        return self._entries.get(name, default)

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def items(self):
        return self._entries.items()

    def names(self) -> list[str]:
        return list(self._entries)

    def extend(self, name: str, t: Type) -> "Context":
        if name in self._entries:
            raise ValueError(f"{name} already in context")
        return Context([*self._entries.items(), (name, t)])

    def without(self, names: Iterable[str]) -> "Context":
        drop = set(names)
        return Context((n, t) for n, t in self._entries.items() if n not in drop)

    def restrict(self, names: Iterable[str]) -> "Context":
        keep = set(names)
        return Context((n, t) for n, t in self._entries.items() if n in keep)

    def is_un(self) -> bool:
        return all(is_un(t) for t in self._entries.values())

    def linear_names(self) -> set[str]:
        return {n for n, t in self._entries.items() if not is_un(t)}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Context):
            return NotImplemented
        return self._entries == other._entries

    def same_entries(self, other: "Context") -> bool:
        """Equality ignoring entry order."""
        return set(self._entries.items()) == set(other._entries.items())

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}: {t!r}" for n, t in self._entries.items())
        return f"Context({inner})"

    def __str__(self) -> str:
        from .printer import show_type

        return ", ".join(f"{n}: {show_type(t)}" for n, t in self._entries.items()) or "."


EMPTY = Context()


def split(ctx: Context, demand_left: Iterable[str]) -> tuple[Context, Context]:
    """Demand-driven split: un entries go to both sides, lin entries left iff demanded."""
    demand = set(demand_left)
    missing = demand - set(ctx)
    if missing:
        raise UnboundName(f"cannot split on unknown names {sorted(missing)}")
    left, right = [], []
    for name, t in ctx.items():
        if is_un(t):
            left.append((name, t))
            right.append((name, t))
        elif name in demand:
            left.append((name, t))
        else:
            right.append((name, t))
    return Context(left), Context(right)


def update(ctx: Context, name: str, t: Type) -> Context:
    """``ctx + name: t``."""
    if name not in ctx:
        return ctx.extend(name, t)
    current = ctx[name]
    if is_un(current) and type_equiv(t, current):
        return ctx
    raise LinearReintroduction(f"{name} is already in the context with a type that cannot absorb it")


def compose(*parts: Context) -> Context:
    """Inverse of split: un entries are merged (they must agree up to equivalence), lin entries are unioned."""
    out: dict[str, Type] = {}
    for part in parts:
        for name, t in part.items():
            if name in out:
                prev = out[name]
                if not (is_un(prev) and is_un(t) and type_equiv(prev, t)):
                    raise LinearityError(f"{name} occurs linearly in two parts of a split")
                continue
            out[name] = t
    return Context(out.items())


@dataclass
class Derivation:
    """A node of a typing derivation.

    ``context`` is the part of the ambient context the node actually needs:
    every un entry in scope plus the lin entries the subterm consumes.
    ``splits`` holds the sub-contexts the rule divides it into; for choice
    branches these are the three parts (subject, payload, continuation).
    """

    rule: str
    context: Context
    term: object
    type: Type | None = None
    premises: tuple["Derivation", ...] = ()
    splits: tuple[Context, ...] = ()
    info: dict = field(default_factory=dict)

    def walk(self) -> Iterator["Derivation"]:
        yield self
        for p in self.premises:
            yield from p.walk()

    def size(self) -> int:
        return sum(1 for _ in self.walk())
