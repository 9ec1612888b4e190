import pytest

from helpers import P, ctx
from mix2cls.context import EMPTY
from mix2cls.corpus import load
from mix2cls.verify import (
    FAIL, INCONCLUSIVE, PASS, check_barb_preservation, check_completeness,
    check_ndchoice_reduction, check_ndchoice_typing, check_type_soundness, demo_soundness_failure,
)
from helpers import C


def decl(name):
    d = load(name).get()
    return d.context, d.process


class TestSoundness:
    @pytest.mark.parametrize("name", ["fig1", "fig3"])
    def test_figures(self, name):
        assert check_type_soundness(*decl(name)).outcome == PASS

    def test_ill_typed_fails_at_source(self):
        rep = check_type_soundness(*decl("illtyped"))
        assert rep.outcome == FAIL and "source" in rep.diagnostic


class TestNDChoice:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_reduction(self, n):
        rep = check_ndchoice_reduction(n)
        assert rep.outcome == PASS
        assert rep.data["classes"] == n and len(rep.witnesses) == n

    def test_zero_parts(self):
        assert check_ndchoice_reduction(0).outcome == FAIL

    def test_typing(self):
        rep = check_ndchoice_typing(ctx("x: lin!int.end"), [C("x!3.0"), C("x!5.0")])
        assert rep.outcome == PASS and rep.data["ndchoice_checks"]


class TestBarbs:
    def test_lin(self):
        rep = check_barb_preservation(*decl("barb_lin"))
        assert rep.outcome == PASS and len(rep.witnesses[0]) <= 2

    def test_un(self):
        rep = check_barb_preservation(*decl("barb_un"))
        assert rep.outcome == PASS
        assert rep.witnesses[0].tags == ["u1v1", "s1t1"]

    def test_vacuous(self):
        rep = check_barb_preservation(*decl("fig1"))
        assert rep.outcome == PASS and rep.notes

    def test_inconclusive_when_depth_runs_out(self):
        rep = check_barb_preservation(*decl("barb_un"), depth_limit=1)
        assert rep.outcome == INCONCLUSIVE


class TestCompleteness:
    def test_figure_one(self):
        rep = check_completeness(*decl("fig1"))
        assert rep.outcome == PASS
        [step] = rep.data["steps"]
        assert step["witness_length"] == 5
        assert step["witness_tags"] == ["s3t3 xy s1t1 s4t4 xy", "s3t3 xy s4t4 s1t1 xy"]

    def test_figure_two_both_outcomes(self):
        rep = check_completeness(*decl("fig2"))
        assert rep.outcome == PASS
        assert sorted(s["step"] for s in rep.data["steps"]) == ["LinLin xy m 3", "LinLin xy m 5"]
        assert all(s["witness_length"] == 5 for s in rep.data["steps"])

    def test_if(self):
        rep = check_completeness(EMPTY, P("if true then 0 else 0"))
        assert rep.outcome == PASS and [len(w) for w in rep.witnesses] == [1]

    def test_un_loop(self):
        rep = check_completeness(*decl("unloop"))
        assert rep.outcome == PASS and len(rep.witnesses) == 1
        assert 5 < len(rep.witnesses[0]) <= 10
        assert any("un steps" in n for n in rep.notes)

    def test_one_witness_per_step(self):
        rep = check_completeness(*decl("sec1_a"))
        assert len(rep.witnesses) == len(rep.data["steps"]) == 2

    def test_depth_too_small(self):
        rep = check_completeness(*decl("fig1"), depth_limit=3)
        assert rep.outcome == INCONCLUSIVE

    def test_monotone_in_depth(self):
        assert check_completeness(*decl("fig2"), depth_limit=5).outcome == PASS
        assert check_completeness(*decl("fig2"), depth_limit=9).outcome == PASS

    def test_reproducible(self):
        a, b = check_completeness(*decl("unloop")), check_completeness(*decl("unloop"))
        assert a.data == b.data and [w.tags for w in a.witnesses] == [w.tags for w in b.witnesses]


class TestCounterexample:
    def test_default(self):
        rep = demo_soundness_failure()
        assert rep.outcome == PASS
        assert rep.witnesses[0].tags == ["u1v1"]
        assert rep.data["mixed_steps"] == 0

    def test_inaction(self):
        assert demo_soundness_failure(EMPTY, P("0")).outcome == FAIL

    def test_lin_variant(self):
        rep = demo_soundness_failure(ctx("y: lin+{m?int.end}"), P("lin y (m?z.0)"))
        assert rep.outcome == PASS and rep.witnesses[0].tags == ["s1t1"]
