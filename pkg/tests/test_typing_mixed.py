import random

import pytest
from hypothesis import given, strategies as st

from helpers import P, T, ctx
from mix2cls.context import (
    EMPTY, Context, DualityFailure, LabelSetMismatch, LinearityError, LinearLeftover,
    LinearReintroduction, MissingAnnotation, QualifierViolation, SubjectNotChoiceTyped,
    TypingError, UnboundName, compose, split, update,
)
from mix2cls.corpus import PROGRAMS, load
from mix2cls.generators import random_program
from mix2cls.sessiontypes import BOOL_T, END, UNIT_T
from mix2cls.syntax import TRUE, UNIT, Var
from mix2cls.typing_mixed import check_process, is_well_typed, type_value

FIG1 = "(new x y: lin&{m!int.end, n?bool.end})(lin x (m!3.0 + n?w.0) | lin y (m?z.0))"


class TestSplit:
    def test_linear_goes_left_on_demand(self):
        left, right = split(ctx("x: lin+{m!unit.end}"), {"x"})
        assert "x" in left and "x" not in right

    def test_un_copied(self):
        left, right = split(ctx("x: end"), set())
        assert left == right == ctx("x: end")

    def test_empty(self):
        assert split(EMPTY, set()) == (EMPTY, EMPTY)

    def test_compose_inverts_split(self):
        g = ctx("a: lin+{m!unit.end}, b: end, c: lin&{m?int.end}")
        left, right = split(g, {"c"})
        assert compose(left, right).same_entries(g)


class TestUpdate:
    def test_add(self):
        assert update(EMPTY, "x", END) == ctx("x: end")

    def test_un_absorbs_equivalent(self):
        g = ctx("x: rec a.un&{m?unit.a}")
        assert update(g, "x", T("un&{m?unit.rec a.un&{m?unit.a}}")) == g

    def test_linear_reintroduction(self):
        with pytest.raises(LinearReintroduction):
            update(ctx("x: lin+{m!unit.end}"), "x", T("lin+{m!unit.end}"))


class TestValues:
    def test_unit(self):
        t, _ = type_value(ctx("x: end"), UNIT)
        assert t == UNIT_T

    def test_true(self):
        assert type_value(EMPTY, TRUE)[0] == BOOL_T

    def test_var(self):
        g = ctx("x: lin+{m!unit.end}, y: end")
        assert type_value(g, Var("x"))[0] == T("lin+{m!unit.end}")

    def test_unbound(self):
        with pytest.raises(UnboundName):
            type_value(EMPTY, Var("x"))


class TestCheck:
    def test_figure_one(self):
        d = check_process(EMPTY, P(FIG1))
        assert d.rule == "Res"

    def test_leftover_linear(self):
        with pytest.raises(LinearLeftover):
            check_process(ctx("x: lin+{m!unit.end}"), P("0"))

    def test_external_needs_every_pair(self):
        with pytest.raises(LabelSetMismatch):
            check_process(ctx("x: lin&{m!int.end, n?bool.end}"), P("lin x (m!3.0)"))

    def test_internal_may_drop_pairs(self):
        assert is_well_typed(ctx("x: lin+{m!int.end, n?bool.end}"), P("lin x (m!3.0)"))

    def test_unknown_pair(self):
        with pytest.raises(LabelSetMismatch):
            check_process(ctx("x: lin+{m!int.end}"), P("lin x (p!3.0)"))

    def test_duplicated_pairs_share_a_type_branch(self):
        assert is_well_typed(ctx("x: lin+{m!int.end}"), P("lin x (m!3.0 + m!5.0)"))

    def test_un_choice_over_linear_context(self):
        g = ctx("x: rec a.un+{m!int.a}, c: lin+{k!int.end}")
        with pytest.raises(TypingError):
            check_process(g, P("un x (m!3.lin c (k!1.0))"))

    def test_m0_qualifier_must_match(self):
        with pytest.raises(QualifierViolation):
            check_process(ctx("x: rec a.un+{m!int.a}"), P("lin x (m!3.0)"))
        assert is_well_typed(ctx("x: rec a.un+{m!int.a}"), P("lin x (m!3.0)"), m0=False)

    def test_duality_at_restriction(self):
        with pytest.raises((DualityFailure, LinearityError, LabelSetMismatch)):
            check_process(EMPTY, P("(new x y: lin+{m!int.end})(lin x (m!3.0) | lin y (m!4.0))"))

    def test_reuse_of_linear_name(self):
        with pytest.raises(LinearityError):
            check_process(EMPTY, P("(new x y: lin+{m!int.end})(lin x (m!3.0) | lin x (m!5.0) | lin y (m?z.0))"))

    def test_subject_must_be_choice_typed(self):
        with pytest.raises(SubjectNotChoiceTyped):
            check_process(ctx("x: int"), P("lin x (m!3.0)"))

    def test_missing_annotation(self):
        with pytest.raises(MissingAnnotation):
            check_process(EMPTY, P("(new x y)(lin x (m!3.0) | lin y (m?z.0))"))

    def test_payload_type(self):
        with pytest.raises(TypingError):
            check_process(ctx("x: lin+{m!int.end}"), P("lin x (m!true.0)"))

    def test_received_value_in_scope(self):
        g = ctx("x: lin&{m?int.lin+{n!int.end}}")
        assert is_well_typed(g, P("lin x (m?z.lin x (n!z.0))"))

    def test_if_branches_agree(self):
        g = ctx("x: lin+{m!int.end}")
        assert is_well_typed(g, P("if true then lin x (m!1.0) else lin x (m!2.0)"))
        with pytest.raises(TypingError):
            check_process(g, P("if true then lin x (m!1.0) else 0"))

    def test_binder_shadowing_an_outer_name(self):
        # the inner z is a fresh binding, not the outer channel
        g = ctx("z: lin+{m!int.end}, x: lin&{m?int.end}")
        assert is_well_typed(g, P("lin x (m?z.0) | lin z (m!1.0)"))


def test_splits_recompose():
    d = check_process(EMPTY, P(FIG1))
    for node in d.walk():
        if node.splits:
            assert compose(*node.splits).same_entries(node.context)


@pytest.mark.parametrize("name", PROGRAMS)
def test_weakening_and_exchange(name):
    dec = load(name).get()
    g = dec.context
    assert is_well_typed(Context([*g.items(), ("fresh_end", END)]), dec.process)
    assert is_well_typed(Context(list(reversed(list(g.items())))), dec.process)


@pytest.mark.parametrize("name", PROGRAMS)
def test_deterministic(name):
    dec = load(name).get()
    a = check_process(dec.context, dec.process)
    b = check_process(dec.context, dec.process)
    assert a == b


@given(st.integers(0, 100_000))
def test_generated_programs_check(seed):
    g, p = random_program(random.Random(seed), 3)
    assert is_well_typed(g, p)
