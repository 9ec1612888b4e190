"""Type checking for classical sessions."""
from __future__ import annotations

from .checker import Checker
from .context import Context, Derivation, TypingError


def check_process_classical(ctx: Context, p) -> Derivation:
    return Checker("classical").check(ctx, p)


def is_well_typed_classical(ctx: Context, p) -> bool:
    try:
        check_process_classical(ctx, p)
    except TypingError:
        return False
    return True


def ndchoice_typing_check(ctx: Context, parts) -> bool:
    """Does the expansion of ``NDChoice{parts}`` type check under ``ctx``?

    The admissible rule says this holds exactly when every part checks.
    """
    from .translate import FreshNameSource, build_ndchoice
    from .syntax import all_names

    avoid = set(ctx)
    for p in parts:
        avoid |= all_names(p)
    term = build_ndchoice(list(parts), FreshNameSource(avoid=avoid))
    return is_well_typed_classical(ctx, term)
