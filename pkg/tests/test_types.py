import random

import pytest
from hypothesis import given, strategies as st

from helpers import T
from mix2cls.generators import narrow, random_type, widen
from mix2cls.sessiontypes import (
    END, INT_T, TypeFormError, advance, alpha_normal, are_dual, dual_of, is_closed,
    is_contractive, is_un, subtype, type_equiv, unfold,
)

seeds = st.integers(0, 100_000)


class TestUn:
    def test_end(self):
        assert is_un(END)

    def test_lin_choice(self):
        assert not is_un(T("lin+{m!unit.end}"))

    def test_rec_un(self):
        assert is_un(T("rec a.un&{m?unit.a}"))

    def test_base(self):
        assert is_un(INT_T) and is_un(T("bool")) and is_un(T("unit"))


class TestContractive:
    def test_bare_variable(self):
        assert not is_contractive(T("rec a.a"))

    def test_rec_chain(self):
        assert not is_contractive(T("rec a.rec b.a"))

    def test_ndchoice_type(self):
        assert is_contractive(T("rec a.un+{l: a}"))

    def test_end(self):
        assert is_contractive(END)


class TestEquiv:
    def test_one_unfolding(self):
        assert type_equiv(T("rec a.un&{m?unit.a}"), T("un&{m?unit.rec a.un&{m?unit.a}}"))

    def test_end(self):
        assert type_equiv(END, END)

    def test_view_mismatch(self):
        assert not type_equiv(T("lin+{m!unit.end}"), T("lin&{m!unit.end}"))

    def test_star_abbreviation(self):
        assert type_equiv(T("*+{ell_1, ell_2}"), T("rec a.un+{ell_1: a, ell_2: a}"))
        assert type_equiv(T("*!unit"), T("rec a.un!unit.a"))


class TestSubtype:
    def test_internal_width(self):
        assert subtype(T("lin+{m!unit.end, n?bool.end}"), T("lin+{m!unit.end}"))
        assert not subtype(T("lin+{m!unit.end}"), T("lin+{m!unit.end, n?bool.end}"))

    def test_external_width(self):
        assert subtype(T("lin&{m!unit.end}"), T("lin&{m!unit.end, n?bool.end}"))
        assert not subtype(T("lin&{m!unit.end, n?bool.end}"), T("lin&{m!unit.end}"))

    def test_output_payload_contravariant(self):
        small, big = "lin+{k!unit.end, j!unit.end}", "lin+{k!unit.end}"
        assert subtype(T(small), T(big))
        assert subtype(T(f"lin+{{m!({big}).end}}"), T(f"lin+{{m!({small}).end}}"))
        assert subtype(T(f"lin+{{m?({small}).end}}"), T(f"lin+{{m?({big}).end}}"))

    def test_no_qualifier_subsumption(self):
        assert not subtype(T("rec a.un+{m!int.a}"), T("lin+{m!int.rec a.un+{m!int.a}}"))

    def test_classical(self):
        assert subtype(T("lin!(lin+{a: end}).end"), T("lin!(lin+{a: end, b: end}).end"))
        assert subtype(T("lin+{a: end, b: end}"), T("lin+{a: end}"))


class TestDual:
    def test_end(self):
        assert are_dual(END, END)

    def test_single_branch(self):
        assert are_dual(T("lin+{m!unit.end}"), T("lin&{m?unit.end}"))

    def test_classical_comm(self):
        assert are_dual(T("lin?int.end"), T("lin!int.end"))

    def test_dual_of_external(self):
        assert dual_of(T("lin&{m!int.end}")) == T("lin+{m?int.end}")

    def test_dual_of_rejects_base(self):
        with pytest.raises(TypeFormError):
            dual_of(INT_T)

    def test_recursive_dual(self):
        t = T("rec a.lin+{m!int.a, n?bool.end}")
        assert are_dual(t, dual_of(t))
        assert not are_dual(t, t)


def test_advance():
    t = T("lin+{m!int.lin&{n?bool.end}}")
    assert advance(t, "m", "!") == T("lin&{n?bool.end}")
    u = T("rec a.un+{m!int.a}")
    assert type_equiv(advance(u, "m", "!"), u)


def test_alpha_normal_types():
    assert alpha_normal(T("rec a.un+{m!int.a}")) == alpha_normal(T("rec b.un+{m!int.b}"))


@given(seeds)
def test_generated_types_are_well_formed(seed):
    t = random_type(random.Random(seed), 3)
    assert is_contractive(t) and is_closed(t)


@given(seeds)
def test_subtype_reflexive(seed):
    t = random_type(random.Random(seed), 3)
    assert subtype(t, t)


@given(seeds)
def test_subtype_transitive(seed):
    rng = random.Random(seed)
    t = random_type(rng, 3)
    s, u = narrow(rng, t), widen(rng, t)
    r = narrow(rng, s)
    assert subtype(r, s) and subtype(s, t) and subtype(t, u)
    assert subtype(r, t) and subtype(s, u) and subtype(r, u)


@given(seeds)
def test_equiv_is_mutual_subtyping(seed):
    rng = random.Random(seed)
    t = random_type(rng, 3)
    for other in (narrow(rng, t), widen(rng, t), random_type(rng, 3), unfold(t)):
        assert type_equiv(t, other) == (subtype(t, other) and subtype(other, t))


@given(seeds)
def test_dual_of_is_dual_and_involutive(seed):
    t = random_type(random.Random(seed), 3)
    d = dual_of(t)
    assert are_dual(t, d) and are_dual(d, t)
    assert type_equiv(dual_of(d), t)


@given(seeds)
def test_un_survives_unfolding(seed):
    t = random_type(random.Random(seed), 3)
    if is_un(t):
        assert is_un(unfold(t))
