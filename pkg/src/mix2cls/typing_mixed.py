"""Type checking for mixed sessions."""
from __future__ import annotations

from .checker import Checker
from .context import EMPTY, Context, Derivation
from .sessiontypes import Type


def check_process(ctx: Context, p, *, m0: bool = True) -> Derivation:
    """Derive ``ctx |- p`` or raise a ``TypingError``.

    With ``m0`` (the default) a choice must carry the same qualifier as the
    type of its subject, which is the fragment the translation handles.
    """
    return Checker("mixed", m0).check(ctx, p)


def type_value(ctx: Context, v) -> tuple[Type, Derivation]:
    return Checker("mixed").check_value(ctx, v)


def is_well_typed(ctx: Context, p, *, m0: bool = True) -> bool:
    from .context import TypingError

    try:
        check_process(ctx, p, m0=m0)
    except TypingError:
        return False
    return True


__all__ = ["check_process", "type_value", "is_well_typed", "EMPTY"]
