import random

import pytest
from hypothesis import given, strategies as st

from helpers import C, ctx
from mix2cls.context import EMPTY, MissingCaseArm, TypingError, UnknownSelectLabel
from mix2cls.corpus import GOLDEN, load
from mix2cls.generators import random_ndchoice_instance
from mix2cls.semantics import reduce_classical
from mix2cls.typing_classical import (
    check_process_classical, is_well_typed_classical, ndchoice_typing_check,
)

FIG1_RIGHT = """
(new s3 t3: *+{ell})(s3 select ell.0 | case t3 of {
    ell -> y select m^?.(new s4 t4: *+{ell})(s4 select ell.0 | case t4 of {ell -> y?z.0})})
"""


def test_figure_one_right_side():
    g = ctx("y: lin+{m^?: lin?int.end, n^!: lin!bool.end}")
    assert is_well_typed_classical(g, C(FIG1_RIGHT))


def test_single_output():
    assert is_well_typed_classical(ctx("x: lin!int.end"), C("x!3.0"))


def test_loop_trigger_reenters():
    assert is_well_typed_classical(ctx("u: rec a.un!unit.a"), C("u!().0 | u!().0"))


def test_replicated_input():
    g = ctx("v: rec a.un?unit.a, c: *!int")
    assert is_well_typed_classical(g, C("v*?w.c!1.0"))


def test_case_must_cover_exactly():
    g = ctx("x: lin&{a: end, b: end}")
    with pytest.raises(MissingCaseArm):
        check_process_classical(g, C("case x of {a -> 0}"))
    assert is_well_typed_classical(g, C("case x of {a -> 0, b -> 0}"))


def test_select_label_must_exist():
    with pytest.raises(UnknownSelectLabel):
        check_process_classical(ctx("x: lin+{a: end}"), C("x select c.0"))


def test_select_subset():
    assert is_well_typed_classical(ctx("x: lin+{a: end, b: end}"), C("x select b.0"))


def test_linear_input_must_be_used_up():
    with pytest.raises(TypingError):
        check_process_classical(ctx("x: lin?int.lin!int.end"), C("x?z.0"))


class TestNDChoiceTyping:
    def test_inaction(self):
        assert ndchoice_typing_check(EMPTY, [C("0")])

    def test_figure_two_inner(self):
        assert ndchoice_typing_check(ctx("x: lin!int.end"), [C("x!3.0"), C("x!5.0")])

    def test_failing_part(self):
        assert not ndchoice_typing_check(ctx("x: lin!bool.end"), [C("x!3.0")])

    @given(st.integers(0, 100_000))
    def test_admissible(self, seed):
        g, parts = random_ndchoice_instance(random.Random(seed), ill_typed=0.0)
        assert all(is_well_typed_classical(g, p) for p in parts)
        assert ndchoice_typing_check(g, parts)

    @given(st.integers(0, 100_000))
    def test_agrees_with_parts(self, seed):
        g, parts = random_ndchoice_instance(random.Random(seed), ill_typed=0.5)
        assert ndchoice_typing_check(g, parts) == all(is_well_typed_classical(g, p) for p in parts)


@pytest.mark.parametrize("name", sorted(GOLDEN.values()))
def test_subject_reduction_on_golden_targets(name):
    dec = load(name).get()
    check_process_classical(dec.context, dec.process)
    frontier = [dec.process]
    for _ in range(4):
        nxt = []
        for p in frontier:
            for step in reduce_classical(p):
                check_process_classical(EMPTY, step.result)
                nxt.append(step.result)
        frontier = nxt[:20]
