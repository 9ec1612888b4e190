"""Shared helpers: congruence-preserving scrambles and small parse shortcuts."""
import random

from mix2cls.context import Context
from mix2cls.parser import parse_context, parse_mixed, parse_classical, parse_type
from mix2cls.sessiontypes import END
from mix2cls.syntax import Inact, New, Par, all_names, rename

P = parse_mixed
C = parse_classical
T = parse_type


def ctx(text: str = "") -> Context:
    return parse_context(f"[{text}]") if text else Context()


def scramble(rng: random.Random, p, rounds: int = 6):
    """A process structurally congruent to ``p``, built from the congruence laws."""
    for _ in range(rounds):
        p = _once(rng, p, set(all_names(p)))
    return p


def _once(rng, p, names):
    r = rng.random()
    if r < 0.2:
        return Par(p, Inact()) if rng.random() < 0.5 else Par(Inact(), p)
    if r < 0.35:
        x, y = _fresh(names), _fresh(names)
        return New(x, y, END, p) if rng.random() < 0.5 else Par(p, New(x, y, END, Inact()))
    match p:
        case Par(Par(a, b), c) if rng.random() < 0.5:
            return Par(a, Par(b, c))
        case Par(a, b):
            return Par(_once(rng, b, names), _once(rng, a, names))
        case New(x, y, t, New(x2, y2, t2, body)) if rng.random() < 0.5 and len({x, y, x2, y2}) == 4:
            return New(x2, y2, t2, New(x, y, t, body))
        case New(x, y, t, body):
            if rng.random() < 0.5:
                fx, fy = _fresh(names), _fresh(names)
                return New(fx, fy, t, rename(body, {x: fx, y: fy}))
            return New(x, y, t, _once(rng, body, names))
    return p


def _fresh(names: set) -> str:
    k = len(names)
    while f"w{k}" in names:
        k += 1
    names.add(f"w{k}")
    return f"w{k}"
