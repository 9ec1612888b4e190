"""One test per acceptance criterion."""
import random

from mix2cls.congruence import congruent
from mix2cls.corpus import FIGURE_WITNESSES, GOLDEN, PROGRAMS, check_golden, load
from mix2cls.generators import (
    narrow, random_ndchoice_instance, random_process, random_program, random_type, widen,
)
from mix2cls.parser import parse_classical, parse_process
from mix2cls.printer import emit_sepi, show_process
from mix2cls.sessiontypes import are_dual, dual_of, is_un, subtype, type_equiv
from mix2cls.translate import translate, translate_type
from mix2cls.typing_mixed import is_well_typed
from mix2cls.verify import (
    check_barb_preservation, check_completeness, check_ndchoice_reduction, check_ndchoice_typing,
    check_type_soundness, demo_soundness_failure,
)

INTRO = ["sec1_a", "sec1_b", "sec1_c"]
FIGURES = ["fig1", "fig2", "fig3"]


def decl(name):
    d = load(name).get()
    return d.context, d.process


def test_criterion_1_golden_corpus():
    for name in INTRO + FIGURES:
        assert is_well_typed(*decl(name)), name
    for name in GOLDEN:
        rep = check_golden(name)
        assert rep.passed, rep.data


def test_criterion_2_type_soundness():
    for name in PROGRAMS:
        assert check_type_soundness(*decl(name), subject=name).passed, name
    rng = random.Random(2)
    for i in range(100):
        g, p = random_program(rng, 4)
        rep = check_type_soundness(g, p, subject=f"generated {i}")
        assert rep.passed, (show_process(p), rep.diagnostic)


def test_criterion_3_completeness():
    for name in PROGRAMS:
        rep = check_completeness(*decl(name), depth_limit=12, subject=name)
        assert rep.passed, (name, rep.diagnostic)
    for name, expected in FIGURE_WITNESSES.items():
        rep = check_completeness(*decl(name), depth_limit=12)
        [step] = [s for s in rep.data["steps"] if s["step"].endswith(" 3")]
        assert step["witness_length"] == 5
        assert set(step["witness_tags"]) == expected


def test_criterion_4_barb_preservation():
    for name, length in (("barb_lin", 1), ("barb_un", 2)):
        rep = check_barb_preservation(*decl(name), depth_limit=12, subject=name)
        assert rep.passed, rep.diagnostic
        assert rep.data["barbs"] == ["y"]
        assert rep.data["witness_lengths"]["y"] == length


def test_criterion_5_ndchoice():
    rng = random.Random(5)
    verdicts = set()
    for i in range(100):
        ctx, parts = random_ndchoice_instance(rng, n_max=3)
        rep = check_ndchoice_typing(ctx, parts, subject=f"instance {i}")
        assert rep.passed, rep.diagnostic
        verdicts.add(rep.data["parts_check"])
    assert verdicts == {True, False}
    for n in range(1, 5):
        rep = check_ndchoice_reduction(n)
        assert rep.passed, rep.diagnostic
        assert rep.data["classes"] == n


def test_criterion_6_counterexample():
    ctx, p = decl("barb_un")
    assert p == parse_process("un y (m?z.0)")
    rep = demo_soundness_failure(ctx, p)
    assert rep.passed, rep.diagnostic
    assert rep.data["mixed_steps"] == 0
    assert rep.witnesses[0].tags == ["u1v1"]


def test_criterion_7_type_algebra():
    rng = random.Random(7)
    types = [random_type(rng, 3) for _ in range(200)]
    for t in types:
        assert subtype(t, t)
        assert are_dual(t, dual_of(t))
        assert type_equiv(dual_of(dual_of(t)), t)
        assert is_un(translate_type(t)) == is_un(t)
    for t in types:
        s, u = narrow(rng, t), widen(rng, t)
        assert subtype(s, t) and subtype(t, u)
        assert subtype(s, u)
        assert subtype(translate_type(s), translate_type(t))
        assert subtype(translate_type(t), translate_type(u))
        assert type_equiv(s, t) == (subtype(s, t) and subtype(t, s))
    for a, b in zip(types, types[1:]):
        assert type_equiv(a, b) == (subtype(a, b) and subtype(b, a))


def test_criterion_8_determinism_and_round_trips():
    files = [f"{n}.mix" for n in PROGRAMS] + list(GOLDEN.values())
    for filename in files:
        for d in load(filename).decls:
            assert parse_process(show_process(d.process)) == d.process
            assert parse_process(show_process(d.process, pretty=True)) == d.process
    for name in PROGRAMS:
        ctx, p = decl(name)
        first = translate(ctx, p)
        assert translate(ctx, p) == first
        assert congruent(parse_classical(emit_sepi(first[1]), sepi=True), first[1])
    rng = random.Random(8)
    for i in range(500):
        _, p = random_program(rng, 4)
        assert parse_process(show_process(p)) == p
        u = random_process(rng, 4, "mixed" if i % 2 else "classical")
        assert parse_process(show_process(u)) == u
    rng = random.Random(88)
    for _ in range(50):
        g, p = random_program(rng, 3)
        first = translate(g, p)
        assert translate(g, p) == first
        q = first[1]
        assert congruent(parse_classical(emit_sepi(q), sepi=True), q)
