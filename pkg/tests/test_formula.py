import random

import pytest
from hypothesis import given, settings, strategies as st

from hyltl.ltl import (
    Always, And, Atom, Eventually, FormulaSyntaxError, Implies, Next, Not, Or, UntilStrong,
    UntilWeak, atoms, depth, is_sc_fragment, parse_formula, subformulas, to_text,
)

from helpers import random_formula


class TestParse:
    def test_grammar_examples(self):
        assert parse_formula("G (p -> F q)") == Always(Implies(Atom("p"), Eventually(Atom("q"))))
        assert parse_formula("p U q") == UntilStrong(Atom("p"), Atom("q"))

    def test_keywords(self):
        assert parse_formula("always eventually p") == Always(Eventually(Atom("p")))
        assert parse_formula("next p until q") == UntilStrong(Next(Atom("p")), Atom("q"))
        assert parse_formula("p W q") == UntilWeak(Atom("p"), Atom("q"))

    def test_unary_binds_tighter(self):
        assert parse_formula("!p & q") == And(Not(Atom("p")), Atom("q"))
        assert parse_formula("F p3 & (p1 U p2)") == And(
            Eventually(Atom("p3")), UntilStrong(Atom("p1"), Atom("p2")))

    def test_until_right_associative(self):
        assert parse_formula("a U b U c") == UntilStrong(Atom("a"), UntilStrong(Atom("b"), Atom("c")))
        assert parse_formula("a W b U c") == UntilWeak(Atom("a"), UntilStrong(Atom("b"), Atom("c")))

    def test_binary_levels(self):
        f = parse_formula("a | b & c -> d <-> e")
        assert to_text(f) == "a | b & c -> d <-> e"
        assert parse_formula("a -> b -> c") == Implies(Atom("a"), Implies(Atom("b"), Atom("c")))
        assert parse_formula("a & b U c") == And(Atom("a"), UntilStrong(Atom("b"), Atom("c")))

    @pytest.mark.parametrize("text,pos", [
        ("U p", 0), ("p U", 3), ("(p & q", 6), ("p q", 2), ("p & & q", 4), ("p # q", 2), ("", 0),
        ("G", 1), ("p)", 1)])
    def test_syntax_errors(self, text, pos):
        with pytest.raises(FormulaSyntaxError) as info:
            parse_formula(text)
        assert info.value.pos == pos
        assert str(pos) in str(info.value) or "^" in str(info.value)

    def test_helpers(self):
        f = parse_formula("F p3 & (p1 U p2)")
        assert atoms(f) == {"p1", "p2", "p3"}
        assert depth(f) == 2 and depth(parse_formula("p")) == 0
        subs = subformulas(f)
        assert subs[-1] == f
        for i, g in enumerate(subs):
            for c in g.children():
                assert subs.index(c) < i


class TestScFragment:
    @pytest.mark.parametrize("text,expected", [
        ("F p3 & (p1 U p2)", True), ("G p", False), ("!(p U q)", False), ("X !p | q", True),
        ("p W q", False), ("p -> q", False)])
    def test_examples(self, text, expected):
        assert is_sc_fragment(parse_formula(text)) is expected


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip(seed):
    f = random_formula(random.Random(seed))
    text = to_text(f)
    assert parse_formula(text) == f
    assert to_text(parse_formula(text)) == text
