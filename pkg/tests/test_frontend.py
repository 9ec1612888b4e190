"""Parser, printer, SePi emission and JSON/DOT export."""
import json
import random

import pytest
from hypothesis import given, strategies as st

from helpers import C, P, T
from mix2cls.congruence import congruent
from mix2cls.context import EMPTY
from mix2cls.corpus import corpus_files, load
from mix2cls.generators import random_process, random_program
from mix2cls.parser import ParseError, parse_classical, parse_file, parse_mixed, parse_process, parse_type
from mix2cls.printer import emit_sepi, sepi_name, show_process, show_type
from mix2cls.semantics import explore
from mix2cls.serialize import SCHEMA, exploration_dot, from_data, to_data, translation_document
from mix2cls.syntax import Case, Choice, Inact, Label, New, Par
from mix2cls.translate import translate

seeds = st.integers(0, 100_000)


class TestParse:
    def test_section_one_listing(self):
        p = P("(new x y: lin+{m!int.end, n?int.end, p?int.end})(lin x (m!3.0 + n?z.0) | lin y (m?w.0 + n!5.0 + p!7.0))")
        assert isinstance(p, New) and isinstance(p.body, Par)
        assert isinstance(p.body.left, Choice) and isinstance(p.body.right, Choice)
        assert len(p.body.right.branches) == 3

    def test_inaction(self):
        assert P("0") == Inact()

    def test_single_arm_case(self):
        c = C("case y of {ell -> 0}")
        assert isinstance(c, Case) and c.arms == ((Label("ell"), Inact()),)

    def test_omitted_inaction(self):
        assert P("lin x (m!3 + n?z)") == P("lin x (m!3.0 + n?z.0)")

    def test_precedence(self):
        # prefix binds tighter than +, + tighter than |
        p = P("lin x (m!1.lin c (k!2.0) + n?z.0) | lin y (m?w.0)")
        assert isinstance(p, Par) and len(p.left.branches) == 2

    def test_unparenthesized_new(self):
        assert C("new x y: lin!int.end x!1.0 | y?z.0") == C("(new x y: lin!int.end)(x!1.0 | y?z.0)")

    def test_positioned_errors(self):
        with pytest.raises(ParseError) as e:
            P("lin x (m!3.0 +)")
        assert e.value.line == 1 and e.value.col > 1

    def test_calculus_guard(self):
        with pytest.raises(ParseError):
            parse_mixed("x!3.0")
        with pytest.raises(ParseError):
            parse_classical("lin x (m!3.0)")

    def test_type_aliases_and_comments(self):
        sf = parse_file("type U = lin!int.end\n// a comment\nproc a [c: U] = c!1.0\nproc b = 0\n")
        assert sf.calculus == "classical"
        assert sf.get("a").context["c"] == T("lin!int.end")
        assert sf.get("b").process == Inact()

    def test_star_types(self):
        assert T("*?(lin&{m^?: !int.end})") == T("rec a.un?(lin&{m^?: lin!int.end}).a")

    @pytest.mark.parametrize("name", corpus_files())
    def test_corpus_files_parse(self, name):
        assert load(name).decls


class TestPrint:
    @pytest.mark.parametrize("name", corpus_files())
    def test_corpus_round_trip(self, name):
        for d in load(name).decls:
            for pretty in (False, True):
                assert parse_process(show_process(d.process, pretty=pretty)) == d.process

    @given(seeds, st.sampled_from(["mixed", "classical"]), st.booleans())
    def test_generated_round_trip(self, seed, calculus, pretty):
        p = random_process(random.Random(seed), 4, calculus)
        assert parse_process(show_process(p, pretty=pretty)) == p

    def test_type_round_trip(self):
        for text in ("rec a.un+{m!int.a}", "lin&{m^?: lin!int.end}", "lin+{m!(lin&{n?bool.end}).end}"):
            t = T(text)
            assert T(show_type(t)) == t
            assert parse_type(show_type(t, sepi=True), sepi=True) == t


class TestSepi:
    def test_names(self):
        assert sepi_name("%s3") == "s_3" and sepi_name("x") == "x"

    def test_figure_three(self):
        _, q = translate(EMPTY, load("fig3").get().process)
        text = emit_sepi(q)
        assert "new u_1 v_1: *!()" in text
        assert "v_1*?().x?a_1.case a_1 of" in text
        assert "a_1!3.u_1!()" in text
        assert congruent(parse_classical(text, sepi=True), q)

    def test_ndchoice_shape(self):
        _, q = translate(EMPTY, load("fig2").get().process)
        text = emit_sepi(q)
        assert "s_1 select ell_1 |" in text and "s_1 select ell_2 |" in text
        assert "case t_1 of" in text

    def test_inaction(self):
        assert emit_sepi(Inact()) == "0"

    @given(seeds)
    def test_reparses(self, seed):
        g, p = random_program(random.Random(seed), 3)
        _, q = translate(g, p)
        assert congruent(parse_classical(emit_sepi(q), sepi=True), q)


class TestSerialize:
    @pytest.mark.parametrize("name", ["fig1.cls", "fig3.cls", "sec1_a.mix"])
    def test_ast_round_trip(self, name):
        p = load(name).get().process
        assert from_data(json.loads(json.dumps(to_data(p)))) == p

    def test_spans_and_kinds(self):
        data = to_data(P("lin x (m!3.0)"))
        assert data["kind"] == "Choice" and data["span"] == [1, 1]

    def test_translation_document(self):
        d = load("fig1").get()
        cg, q = translate(d.context, d.process)
        doc = translation_document(d.context, d.process, cg, q)
        assert doc["schema"] == SCHEMA
        assert doc["target"]["process"]["kind"] == "New"

    def test_dot(self):
        _, q = translate(EMPTY, load("fig1").get().process)
        dot = exploration_dot(explore(q, 12, "classical"))
        assert dot.startswith("digraph") and 'label="s3t3"' in dot
