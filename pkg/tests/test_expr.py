import math

import pytest
from hypothesis import given, settings, strategies as st

from hyltl.expr import (
    BinOp, BoolOp, Call, Compare, Const, ExprDomainError, ExprSyntaxError, ExprTypeError, Neg,
    Not, Num, UnboundVariable, Var, compile_expression, eval_expression, evaluate_reference,
    margin_expression, parse_expression, to_text,
)


def ev(text, x=(), **consts):
    return eval_expression(parse_expression(text), x, consts)


class TestParse:
    def test_barrier_expression(self):
        e = parse_expression("2*g*x1 + (x2-1)*(x2+1)")
        assert e.type == "num"
        assert ev("2*g*x1 + (x2-1)*(x2+1)", (0.25, 0), g=1) == -0.5

    def test_boolean(self):
        assert parse_expression("max(x1,x2) >= 1").type == "bool"

    def test_syntax_error_has_position(self):
        with pytest.raises(ExprSyntaxError) as info:
            parse_expression("x1 + and")
        assert info.value.pos == 5

    @pytest.mark.parametrize("text,pos", [("x1 +", 4), ("(x1", 3), ("x1 $ 2", 3),
                                          ("x1 <= 1 <= 2", 8), ("foo(x1)", 0), ("", 0)])
    def test_positioned_errors(self, text, pos):
        with pytest.raises(ExprSyntaxError) as info:
            parse_expression(text)
        assert info.value.pos == pos
        assert "^" in info.value.caret()

    def test_type_errors(self):
        with pytest.raises(ExprTypeError):
            parse_expression("1 + (x1 <= 0)")
        with pytest.raises(ExprTypeError):
            parse_expression("x1 and x2 <= 0")
        with pytest.raises(ExprTypeError):
            parse_expression("abs(x1, x2)")

    def test_precedence(self):
        assert parse_expression("-x1^2") == Neg(BinOp("^", Var("x1"), Num(2)))
        assert parse_expression("2^3^2") == BinOp("^", Num(2), BinOp("^", Num(3), Num(2)))
        assert ev("2^3^2") == 512
        assert ev("1 - 2 - 3") == -4
        assert ev("not 1 > 2 and 2 > 1")
        assert ev("x1 <= 0 or x1 >= 1 and x1 <= 2", (-1,))
        assert ev("2**-1") == 0.5


class TestEval:
    def test_sgn_zero_is_one(self):
        assert ev("sgn(x1)", (0.0,)) == 1
        assert ev("sgn(x1)", (-0.0,)) == 1
        assert ev("sgn(x1)", (-2,)) == -1

    @pytest.mark.parametrize("text", ["sqrt(x1)", "ln(x1 + 1)", "1/(x1 + 1)", "x1^0.5"])
    def test_domain_errors(self, text):
        with pytest.raises(ExprDomainError):
            ev(text, (-1.0,))

    def test_unbound(self):
        with pytest.raises(UnboundVariable):
            ev("x1 + c")
        with pytest.raises(UnboundVariable):
            compile_expression(parse_expression("x3"), 2, {})

    def test_functions(self):
        assert ev("min(3, x1) + max(3, x1)", (1,)) == 4
        assert ev("ceil(2.1)") == 3
        assert ev("exp(ln(2))") == pytest.approx(2)
        assert ev("pow(2, 10)") == 1024
        assert ev("ite(x1 < 1, 5, 6)", (1,)) == 6
        assert ev("abs(-2)") == 2


class TestMargins:
    @pytest.mark.parametrize("text", [
        "x1 <= 0", "x1 >= 1", "x1 == 0.5", "x1 <= 0 and x2 >= 0", "x1 < 0 or x2 > 1",
        "not x1 <= 0", "true", "false"])
    def test_margin_sign_matches_truth(self, text):
        node = parse_expression(text)
        m = compile_expression(margin_expression(node), 2, {})
        f = compile_expression(node, 2, {})
        for a in (-1.0, -0.25, 0.5, 0.75, 2.0):
            for b in (-1.0, 0.5, 2.0):
                assert bool(f((a, b))) == (m((a, b)) <= 0)

    def test_unsupported(self):
        assert margin_expression(parse_expression("x1 != 0")) is None
        assert margin_expression(parse_expression("not x1 == 0")) is None


# random expressions --------------------------------------------------------

names = st.sampled_from(["x1", "x2", "x3", "c", "k"])
numbers = st.one_of(st.integers(0, 100).map(float),
                    st.floats(0.001, 1000, allow_nan=False).map(lambda v: round(v, 3)))


def num_exprs():
    leaves = st.one_of(numbers.map(Num), names.map(Var))

    def extend(children):
        return st.one_of(
            children.map(Neg),
            st.tuples(st.sampled_from(["+", "-", "*", "/", "^"]), children, children)
            .map(lambda t: BinOp(*t)),
            st.tuples(st.sampled_from(["abs", "sgn", "sqrt", "exp", "ln", "ceil"]), children)
            .map(lambda t: Call(t[0], (t[1],))),
            st.tuples(st.sampled_from(["min", "max", "pow"]), children, children)
            .map(lambda t: Call(t[0], (t[1], t[2]))),
        )

    return st.recursive(leaves, extend, max_leaves=8)


def bool_exprs():
    cmp = st.tuples(st.sampled_from(["<=", "<", "==", ">=", ">", "!="]), num_exprs(),
                    num_exprs()).map(lambda t: Compare(*t))
    leaves = st.one_of(cmp, st.booleans().map(Const))

    def extend(children):
        return st.one_of(children.map(Not),
                         st.tuples(st.sampled_from(["and", "or"]), children, children)
                         .map(lambda t: BoolOp(*t)))

    return st.recursive(leaves, extend, max_leaves=4)


any_expr = st.one_of(num_exprs(), bool_exprs())


@settings(max_examples=500, deadline=None)
@given(any_expr)
def test_print_parse_round_trip(e):
    text = to_text(e)
    back = parse_expression(text)
    assert back == e
    assert to_text(back) == text


@settings(max_examples=500, deadline=None)
@given(any_expr, st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=3),
       st.floats(-3, 3, allow_nan=False), st.floats(0.1, 3))
def test_compiled_matches_reference(e, x, c, k):
    consts = {"c": c, "k": k}

    def run(fn):
        try:
            v = fn()
        except ExprDomainError:
            return "domain"
        except OverflowError:
            return "overflow"
        return v

    a = run(lambda: compile_expression(e, 3, consts)(x))
    b = run(lambda: evaluate_reference(e, x, consts))
    if isinstance(a, float) and isinstance(b, float) and math.isnan(a):
        assert math.isnan(b)
    else:
        assert a == b
