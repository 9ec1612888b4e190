"""Bounded checks of the correspondence properties of the translation."""
from __future__ import annotations

from dataclasses import dataclass, field

from .congruence import canonical_key
from .context import EMPTY, Context, TypingError
from .parser import parse_mixed, parse_type
from .printer import show_process
from .semantics import M0, Trace, explore, reduce_classical, reduce_mixed, _syntactic_barbs
from .syntax import UNIT, Inact, Send, all_names
from .translate import (
    FreshNameSource, TranslationError, build_ndchoice, translate_context, translate_process,
)
from .typing_classical import check_process_classical, is_well_typed_classical
from .typing_mixed import check_process

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

DEFAULT_DEPTH = 12


@dataclass
class VerificationReport:
    claim: str
    subject: str
    outcome: str
    diagnostic: str = ""
    witnesses: list[Trace] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.outcome == PASS

    def summary(self) -> str:
        line = f"{self.claim} [{self.subject}]: {self.outcome}"
        if self.diagnostic:
            line += f" ({self.diagnostic})"
        return line


def _translate(ctx: Context, p):
    d = check_process(ctx, p)
    return translate_context(ctx), translate_process(d)


# -- type soundness ----------------------------------------------------------------


def check_type_soundness(ctx: Context, p, subject: str = "") -> VerificationReport:
    rep = VerificationReport("TypeSoundness", subject, PASS)
    try:
        d = check_process(ctx, p)
    except TypingError as e:
        rep.outcome, rep.diagnostic = FAIL, f"source does not type check: {e}"
        return rep
    try:
        cctx, q = translate_context(ctx), translate_process(d)
    except TranslationError as e:
        rep.outcome, rep.diagnostic = FAIL, f"translation failed: {e}"
        return rep
    try:
        check_process_classical(cctx, q)
    except TypingError as e:
        rep.outcome, rep.diagnostic = FAIL, f"translation does not type check: {e}"
        return rep
    rep.data["translation"] = q
    return rep


# -- NDChoice ----------------------------------------------------------------------------


def check_ndchoice_typing(ctx: Context, parts, subject: str = "") -> VerificationReport:
    """The expansion checks exactly when every part does."""
    from .typing_classical import ndchoice_typing_check

    each = all(is_well_typed_classical(ctx, p) for p in parts)
    whole = ndchoice_typing_check(ctx, parts)
    rep = VerificationReport("NDChoiceTyping", subject, PASS if each == whole else FAIL)
    rep.data.update(parts_check=each, ndchoice_checks=whole)
    if each != whole:
        rep.diagnostic = f"parts check: {each}, expansion checks: {whole}"
    return rep


def ndchoice_markers(n: int) -> list:
    return [Send(f"k{i}", UNIT, Inact()) for i in range(1, n + 1)]


def check_ndchoice_reduction(n: int) -> VerificationReport:
    rep = VerificationReport("NDChoiceReduction", f"n={n}", PASS)
    if n < 1:
        rep.outcome, rep.diagnostic = FAIL, "NDChoice needs at least one part"
        return rep
    markers = ndchoice_markers(n)
    avoid = set().union(*(all_names(m) for m in markers))
    term = build_ndchoice(markers, FreshNameSource(avoid))
    marker_keys = {canonical_key(m, gc=True): k for k, m in enumerate(markers)}
    reached: dict[int, list] = {}
    stray = []
    classes = set()
    for step in reduce_classical(term):
        key = canonical_key(step.result, gc=True)
        classes.add(key)
        if key in marker_keys:
            reached.setdefault(marker_keys[key], []).append(step)
        else:
            stray.append(step)
    missing = [k + 1 for k in range(n) if k not in reached]
    rep.data.update(reducts=sum(len(v) for v in reached.values()) + len(stray),
                    classes=len(classes))
    if stray:
        rep.outcome, rep.diagnostic = FAIL, f"{len(stray)} reducts are not congruent to any part"
    elif missing:
        rep.outcome, rep.diagnostic = FAIL, f"parts never selected: {missing}"
    elif len(classes) != n:
        rep.outcome, rep.diagnostic = FAIL, f"{len(classes)} classes of reducts, expected {n}"
    for k in sorted(reached):
        rep.witnesses.append(Trace(term, [reached[k][0]]))
    return rep


# -- barbs ----------------------------------------------------------------------------------


def check_barb_preservation(ctx: Context, p, depth_limit: int = DEFAULT_DEPTH,
                            subject: str = "") -> VerificationReport:
    rep = VerificationReport("BarbPreservation", subject, PASS)
    try:
        cctx, q = _translate(ctx, p)
    except (TypingError, TranslationError) as e:
        rep.outcome, rep.diagnostic = FAIL, str(e)
        return rep
    source = _syntactic_barbs(p, ctx, "mixed")
    rep.data["barbs"] = sorted(source)
    if not source:
        rep.notes.append("no barbs: holds vacuously")
        return rep
    ex = explore(q, depth_limit, "classical")
    found = {}
    for x in sorted(source):
        hits = ex.find(lambda s, x=x: x in _syntactic_barbs(s, None, "classical"))
        if hits:
            tr = ex.shortest_traces(hits[0], limit=1)[0]
            found[x] = tr
            rep.witnesses.append(tr)
    missing = sorted(source - set(found))
    if missing:
        rep.outcome = INCONCLUSIVE if ex.truncated else FAIL
        rep.diagnostic = f"no weak barb on {', '.join(missing)} within depth {depth_limit}"
    rep.data["witness_lengths"] = {x: len(t) for x, t in found.items()}
    return rep


# -- completeness ---------------------------------------------------------------------------------


def check_completeness(ctx: Context, p, depth_limit: int = DEFAULT_DEPTH,
                       subject: str = "") -> VerificationReport:
    rep = VerificationReport("Completeness", subject, PASS)
    try:
        _, q = _translate(ctx, p)
    except (TypingError, TranslationError) as e:
        rep.outcome, rep.diagnostic = FAIL, str(e)
        return rep
    steps = reduce_mixed(p, M0)
    rep.data["steps"] = []
    if not steps:
        rep.notes.append("source has no reductions: holds vacuously")
        return rep
    problems = []
    targets: list[str | None] = []
    for step in steps:
        try:
            _, q2 = _translate(ctx, step.result)
            targets.append(canonical_key(q2, gc=True))
        except (TypingError, TranslationError) as e:
            problems.append(f"reduct of {step} cannot be translated: {e}")
            targets.append(None)
    wanted = {t for t in targets if t is not None}
    by_key: dict[str, list[str]] = {}
    indexed: set[str] = set()

    def index(ex) -> bool:
        for k in ex.states.keys() - indexed:
            indexed.add(k)
            by_key.setdefault(canonical_key(ex.states[k], gc=True), []).append(k)
        return wanted <= by_key.keys()

    ex = explore(q, depth_limit, "classical", stop=index)
    index(ex)
    for step, target in zip(steps, targets):
        entry = {"step": str(step), "rule": step.rule}
        matches = sorted(by_key.get(target, []), key=lambda k: (ex.depth[k], k))
        if target is None:
            pass
        elif not matches:
            problems.append(f"no match for {step}")
            entry["witness"] = None
        else:
            traces = ex.shortest_traces(matches[0], limit=100)
            rep.witnesses.append(traces[0])
            entry["witness_length"] = len(traces[0])
            entry["witness_tags"] = sorted({" ".join(t.tags) for t in traces})
        rep.data["steps"].append(entry)
        if step.rule == "UnUn":
            note = ("un steps are compared against a fresh translation of the reduct; "
                    "the re-armed loop coincides with it, no extra normalization is applied")
            if note not in rep.notes:
                rep.notes.append(note)
    rep.data["states_explored"] = len(ex.states)
    if problems:
        rep.outcome = INCONCLUSIVE if ex.truncated and all("no match" in m for m in problems) else FAIL
        rep.diagnostic = "; ".join(problems)
    return rep


# -- reduction soundness fails ------------------------------------------------------------------------


def demo_soundness_failure(ctx: Context | None = None, p=None) -> VerificationReport:
    """The translation has a step the source cannot match: ``un y (m?z.0)``."""
    if p is None:
        p = parse_mixed("un y (m?z.0)")
        ctx = Context([("y", parse_type("rec a.un+{m?int.a}"))])
    ctx = ctx if ctx is not None else EMPTY
    rep = VerificationReport("SoundnessCounterexample", show_process(p), PASS)
    try:
        _, q = _translate(ctx, p)
    except (TypingError, TranslationError) as e:
        rep.outcome, rep.diagnostic = FAIL, str(e)
        return rep
    target = reduce_classical(q)
    source = reduce_mixed(p, M0)
    rep.data.update(classical_steps=len(target), mixed_steps=len(source))
    if target and not source:
        rep.witnesses.append(Trace(q, [target[0]]))
        rep.diagnostic = f"translation steps on {target[0].tag}; the source is stuck"
    else:
        rep.outcome = FAIL
        rep.diagnostic = ("translation is stuck" if not target
                          else "the source can also reduce")
    return rep
