"""The bundled example programs and the suite that runs every claim over them."""
from __future__ import annotations

from importlib import resources

from .congruence import canonicalize, canonical_key
from .context import TypingError
from .parser import SourceFile, parse_file
from .printer import show_process
from .translate import TranslationError, translate
from .verify import (
    DEFAULT_DEPTH, FAIL, PASS, VerificationReport, check_barb_preservation, check_completeness,
    check_ndchoice_reduction, check_type_soundness, demo_soundness_failure,
)

# well-typed mixed programs, in presentation order
PROGRAMS = ["sec1_a", "sec1_b", "sec1_c", "fig1", "fig2", "fig3", "unloop", "barb_lin", "barb_un"]
ILL_TYPED = ["illtyped"]
GOLDEN = {"fig1": "fig1.cls", "fig2": "fig2.cls", "fig3": "fig3.cls"}

# the two interleavings of the single source step, as channel tags
FIGURE_WITNESSES = {
    "fig1": {"s3t3 xy s1t1 s4t4 xy", "s3t3 xy s4t4 s1t1 xy"},
    "fig2": {"s2t2 xy s1t1 s3t3 xy", "s2t2 xy s3t3 s1t1 xy"},
}


def corpus_files() -> list[str]:
    root = resources.files("mix2cls") / "corpus"
    return sorted(p.name for p in root.iterdir() if p.name.endswith((".mix", ".cls")))


def read_text(filename: str) -> str:
    return (resources.files("mix2cls") / "corpus" / filename).read_text(encoding="utf-8")


def load(name: str) -> SourceFile:
    filename = name if "." in name else f"{name}.mix"
    return parse_file(read_text(filename), filename)


def check_golden(name: str) -> VerificationReport:
    """Translation of a figure source against its hand-transcribed target."""
    rep = VerificationReport("GoldenTranslation", name, PASS)
    src = load(name).get()
    gold = load(GOLDEN[name]).get()
    try:
        _, q = translate(src.context, src.process)
    except (TypingError, TranslationError) as e:
        rep.outcome, rep.diagnostic = FAIL, str(e)
        return rep
    if canonical_key(q) != canonical_key(gold.process):
        rep.outcome = FAIL
        rep.diagnostic = "translation differs from the transcribed target"
        rep.data["translation"] = show_process(canonicalize(q))
        rep.data["expected"] = show_process(canonicalize(gold.process))
    return rep


def run_corpus(depth_limit: int = DEFAULT_DEPTH) -> list[VerificationReport]:
    reports: list[VerificationReport] = []
    for name in PROGRAMS:
        d = load(name).get()
        reports.append(check_type_soundness(d.context, d.process, subject=name))
        reports.append(check_completeness(d.context, d.process, depth_limit, subject=name))
        reports.append(check_barb_preservation(d.context, d.process, depth_limit, subject=name))
    for name in GOLDEN:
        reports.append(check_golden(name))
    for n in range(1, 5):
        reports.append(check_ndchoice_reduction(n))
    reports.append(demo_soundness_failure())
    return reports
