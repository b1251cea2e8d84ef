"""A small typed expression language for functions of the state.

Grammar, loosest binding first::

    expr    := and ("or" and)*
    and     := not ("and" not)*
    not     := "not" not | cmp
    cmp     := sum [("<=" | "<" | "==" | "=" | ">=" | ">" | "!=") sum]
    sum     := prod (("+" | "-") prod)*
    prod    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ["^" unary]
    atom    := number | "true" | "false" | name | func "(" expr ("," expr)* ")"
             | "(" expr ")"

State coordinates are ``x1 .. xn``; any other name is a constant bound at
evaluation time. Functions: ``abs sgn sqrt exp ln ceil`` (one argument),
``min max pow`` (two) and ``ite(cond, a, b)``. ``sgn(0) = 1``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .hybrid import HybridError

NUM = "num"
BOOL = "bool"


class ExprError(HybridError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")

    def caret(self) -> str:
        return f"{self.text}\n{' ' * self.pos}^"


class ExprTypeError(ExprError):
    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} at position {pos}")


class UnboundVariable(ExprError):
    pass


class ExprDomainError(ExprError, ArithmeticError):
    pass


# AST ----------------------------------------------------------------------


class Expr:
    type: str

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, eq=True)
class Num(Expr):
    value: float
    type = NUM


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: bool
    type = BOOL


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str
    type = NUM

    @property
    def index(self) -> int | None:
        m = re.fullmatch(r"x([1-9][0-9]*)", self.name)
        return int(m.group(1)) - 1 if m else None


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr
    type = NUM


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr
    type = NUM


@dataclass(frozen=True, eq=True)
class Call(Expr):
    fn: str
    args: tuple[Expr, ...]
    type = NUM


@dataclass(frozen=True, eq=True)
class Compare(Expr):
    op: str
    left: Expr
    right: Expr
    type = BOOL


@dataclass(frozen=True, eq=True)
class Not(Expr):
    arg: Expr
    type = BOOL


@dataclass(frozen=True, eq=True)
class BoolOp(Expr):
    op: str
    left: Expr
    right: Expr
    type = BOOL


UNARY_FUNCS = ("abs", "sgn", "sqrt", "exp", "ln", "ceil")
BINARY_FUNCS = ("min", "max", "pow")
FUNCS = UNARY_FUNCS + BINARY_FUNCS + ("ite",)
KEYWORDS = ("and", "or", "not", "true", "false")
CMP_OPS = ("<=", "<", "==", ">=", ">", "!=")

# parsing ------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|==|!=|&&|\|\||\*\*|[-+*/^()<>=,!])"
    r")"
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        if kind is None:
            break
        tok_text = m.group(kind)
        start = m.start(kind)
        if kind == "op":
            tok_text = {"&&": "and", "||": "or", "!": "not", "**": "^", "=": "=="}.get(
                tok_text, tok_text
            )
        toks.append(_Tok(kind, tok_text, start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.tok
        return ExprSyntaxError(msg, tok.pos, self.text)

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "name") and t.text in texts

    def take(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.take()

    def parse(self) -> Expr:
        node = self.p_or()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return node

    def _need(self, node: Expr, want: str, tok: _Tok, what: str) -> Expr:
        if node.type != want:
            raise ExprTypeError(f"{what} needs a {want} operand, got {node.type}", tok.pos)
        return node

    def p_or(self) -> Expr:
        left = self.p_and()
        while self.at("or"):
            tok = self.take()
            right = self.p_and()
            self._need(left, BOOL, tok, "'or'")
            self._need(right, BOOL, tok, "'or'")
            left = BoolOp("or", left, right)
        return left

    def p_and(self) -> Expr:
        left = self.p_not()
        while self.at("and"):
            tok = self.take()
            right = self.p_not()
            self._need(left, BOOL, tok, "'and'")
            self._need(right, BOOL, tok, "'and'")
            left = BoolOp("and", left, right)
        return left

    def p_not(self) -> Expr:
        if self.at("not"):
            tok = self.take()
            return Not(self._need(self.p_not(), BOOL, tok, "'not'"))
        return self.p_cmp()

    def p_cmp(self) -> Expr:
        left = self.p_sum()
        if self.at(*CMP_OPS):
            tok = self.take()
            right = self.p_sum()
            self._need(left, NUM, tok, f"{tok.text!r}")
            self._need(right, NUM, tok, f"{tok.text!r}")
            if self.at(*CMP_OPS):
                raise self.error("comparisons cannot be chained")
            return Compare(tok.text, left, right)
        return left

    def p_sum(self) -> Expr:
        left = self.p_prod()
        while self.at("+", "-"):
            tok = self.take()
            right = self.p_prod()
            self._need(left, NUM, tok, f"{tok.text!r}")
            self._need(right, NUM, tok, f"{tok.text!r}")
            left = BinOp(tok.text, left, right)
        return left

    def p_prod(self) -> Expr:
        left = self.p_unary()
        while self.at("*", "/"):
            tok = self.take()
            right = self.p_unary()
            self._need(left, NUM, tok, f"{tok.text!r}")
            self._need(right, NUM, tok, f"{tok.text!r}")
            left = BinOp(tok.text, left, right)
        return left

    def p_unary(self) -> Expr:
        if self.at("-"):
            tok = self.take()
            return Neg(self._need(self.p_unary(), NUM, tok, "'-'"))
        return self.p_power()

    def p_power(self) -> Expr:
        base = self.p_atom()
        if self.at("^"):
            tok = self.take()
            exp = self.p_unary()
            self._need(base, NUM, tok, "'^'")
            self._need(exp, NUM, tok, "'^'")
            return BinOp("^", base, exp)
        return base

    def p_atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.take()
            return Num(float(tok.text))
        if tok.kind == "name":
            if tok.text in ("true", "false"):
                self.take()
                return Const(tok.text == "true")
            if tok.text in ("and", "or", "not"):
                raise self.error(f"unexpected keyword {tok.text!r}")
            self.take()
            if self.at("("):
                return self.p_call(tok)
            return Var(tok.text)
        if self.at("("):
            self.take()
            node = self.p_or()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise self.error(f"expected an operand, found {found!r}")

    def p_call(self, name: _Tok) -> Expr:
        if name.text not in FUNCS:
            raise self.error(f"unknown function {name.text!r}", name)
        self.expect("(")
        args = [self.p_or()]
        while self.at(","):
            self.take()
            args.append(self.p_or())
        self.expect(")")
        fn = name.text
        want = 1 if fn in UNARY_FUNCS else 2 if fn in BINARY_FUNCS else 3
        if len(args) != want:
            raise ExprTypeError(f"{fn} takes {want} argument(s), got {len(args)}", name.pos)
        if fn == "ite":
            self._need(args[0], BOOL, name, "ite condition")
            self._need(args[1], NUM, name, "ite")
            self._need(args[2], NUM, name, "ite")
        else:
            for a in args:
                self._need(a, NUM, name, fn)
        return Call(fn, tuple(args))


def parse_expression(text: str) -> Expr:
    return _Parser(text).parse()


# printing -----------------------------------------------------------------

_PREC = {"or": 1, "and": 2, "not": 3, "cmp": 4, "+": 5, "-": 5, "*": 6, "/": 6, "neg": 7,
         "^": 8, "atom": 9}


def _prec(node: Expr) -> int:
    if isinstance(node, BoolOp):
        return _PREC[node.op]
    if isinstance(node, Not):
        return _PREC["not"]
    if isinstance(node, Compare):
        return _PREC["cmp"]
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def _fmt_num(v: float) -> str:
    if math.isfinite(v) and v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_text(node: Expr) -> str:
    def wrap(child: Expr, min_prec: int) -> str:
        s = to_text(child)
        return f"({s})" if _prec(child) < min_prec else s

    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, Const):
        return "true" if node.value else "false"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.fn}({', '.join(to_text(a) for a in node.args)})"
    if isinstance(node, Neg):
        return "-" + wrap(node.arg, _PREC["neg"])
    if isinstance(node, Not):
        return "not " + wrap(node.arg, _PREC["not"])
    if isinstance(node, BinOp) and node.op == "^":
        return f"{wrap(node.left, _PREC['^'] + 1)} ^ {wrap(node.right, _PREC['neg'])}"
    if isinstance(node, (BinOp, BoolOp, Compare)):
        p = _prec(node)
        return f"{wrap(node.left, p if not isinstance(node, Compare) else p + 1)} {node.op} {wrap(node.right, p + 1)}"
    raise TypeError(f"not an expression node: {node!r}")


# evaluation ---------------------------------------------------------------


def _sgn(v: float) -> float:
    return 1.0 if v >= 0 else -1.0


def _sqrt(v: float) -> float:
    if v < 0:
        raise ExprDomainError(f"sqrt of negative value {v}")
    return math.sqrt(v)


def _ln(v: float) -> float:
    if v <= 0:
        raise ExprDomainError(f"ln of nonpositive value {v}")
    return math.log(v)


def _exp(v: float) -> float:
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def _ceil(v: float) -> float:
    if not math.isfinite(v):
        return v
    return float(math.ceil(v))


def _div(a: float, b: float) -> float:
    if b == 0:
        raise ExprDomainError("division by zero")
    return a / b


def _pow(a: float, b: float) -> float:
    if a == 0 and b < 0:
        raise ExprDomainError("zero to a negative power")
    if a < 0 and b != int(b):
        raise ExprDomainError(f"negative base {a} with non-integer exponent {b}")
    try:
        return math.pow(a, b)
    except OverflowError:
        return math.inf


_UNARY: dict[str, Callable[[float], float]] = {
    "abs": abs, "sgn": _sgn, "sqrt": _sqrt, "exp": _exp, "ln": _ln, "ceil": _ceil,
}
_BINARY: dict[str, Callable[[float, float], float]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _div,
    "^": _pow,
    "pow": _pow,
    "min": min,
    "max": max,
}
_CMP: dict[str, Callable[[float, float], bool]] = {
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    "==": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
    "!=": lambda a, b: a != b,
}


def variables(node: Expr) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    out: set[str] = set()
    for child in _children(node):
        out |= variables(child)
    return out


def _children(node: Expr) -> tuple[Expr, ...]:
    if isinstance(node, (Neg, Not)):
        return (node.arg,)
    if isinstance(node, (BinOp, BoolOp, Compare)):
        return (node.left, node.right)
    if isinstance(node, Call):
        return node.args
    return ()


def _resolve(name: str, dim: int | None, constants: Mapping[str, float]):
    idx = Var(name).index
    if idx is not None and (dim is None or idx < dim):
        return ("x", idx)
    if name in constants:
        return ("c", float(constants[name]))
    if idx is not None:
        raise UnboundVariable(f"{name} exceeds the state dimension {dim}")
    raise UnboundVariable(f"unbound name {name!r}")


def compile_expression(node: Expr, dim: int | None = None,
                       constants: Mapping[str, float] | None = None) -> Callable[[Sequence[float]], float | bool]:
    """Compile ``node`` into a closure of the state with constants folded in."""
    constants = constants or {}

    def build(n: Expr):
        if isinstance(n, Num):
            v = n.value
            return lambda x: v
        if isinstance(n, Const):
            b = n.value
            return lambda x: b
        if isinstance(n, Var):
            kind, val = _resolve(n.name, dim, constants)
            if kind == "c":
                return lambda x: val
            i = val

            def var(x, i=i):
                try:
                    return x[i]
                except IndexError:
                    raise UnboundVariable(f"x{i + 1} is not bound by a state of length {len(x)}") from None
            return var
        if isinstance(n, Neg):
            a = build(n.arg)
            return lambda x: -a(x)
        if isinstance(n, Not):
            a = build(n.arg)
            return lambda x: not a(x)
        if isinstance(n, BinOp):
            f = _BINARY[n.op]
            a, b = build(n.left), build(n.right)
            if n.op == "+":
                return lambda x: a(x) + b(x)
            if n.op == "-":
                return lambda x: a(x) - b(x)
            if n.op == "*":
                return lambda x: a(x) * b(x)
            return lambda x: f(a(x), b(x))
        if isinstance(n, Compare):
            f = _CMP[n.op]
            a, b = build(n.left), build(n.right)
            return lambda x: f(a(x), b(x))
        if isinstance(n, BoolOp):
            a, b = build(n.left), build(n.right)
            if n.op == "and":
                return lambda x: a(x) and b(x)
            return lambda x: a(x) or b(x)
        if isinstance(n, Call):
            args = [build(c) for c in n.args]
            if n.fn == "ite":
                c, t, e = args
                return lambda x: t(x) if c(x) else e(x)
            if n.fn in _UNARY:
                f1 = _UNARY[n.fn]
                a = args[0]
                return lambda x: f1(a(x))
            f2 = _BINARY[n.fn]
            a, b = args
            return lambda x: f2(a(x), b(x))
        raise TypeError(f"not an expression node: {n!r}")

    return build(node)


def eval_expression(node: Expr, state: Sequence[float] = (),
                    constants: Mapping[str, float] | None = None) -> float | bool:
    return compile_expression(node, None, constants)(state)


def evaluate_reference(node: Expr, state: Sequence[float],
                       constants: Mapping[str, float] | None = None) -> float | bool:
    """Plain recursive tree walk; used as an independent check of
    :func:`compile_expression`."""
    constants = constants or {}
    ev = lambda n: evaluate_reference(n, state, constants)  # noqa: E731
    if isinstance(node, (Num, Const)):
        return node.value
    if isinstance(node, Var):
        kind, val = _resolve(node.name, len(state), constants)
        return state[val] if kind == "x" else val
    if isinstance(node, Neg):
        return -ev(node.arg)
    if isinstance(node, Not):
        return not ev(node.arg)
    if isinstance(node, BinOp):
        return _BINARY[node.op](ev(node.left), ev(node.right))
    if isinstance(node, Compare):
        return _CMP[node.op](ev(node.left), ev(node.right))
    if isinstance(node, BoolOp):
        left = ev(node.left)
        if node.op == "and":
            return left and ev(node.right)
        return left or ev(node.right)
    if isinstance(node, Call):
        if node.fn == "ite":
            return ev(node.args[1]) if ev(node.args[0]) else ev(node.args[2])
        vals = [ev(a) for a in node.args]
        if node.fn in _UNARY:
            return _UNARY[node.fn](vals[0])
        return _BINARY[node.fn](*vals)
    raise TypeError(f"not an expression node: {node!r}")


def margin_expression(node: Expr) -> Expr | None:
    """Numeric expression ``g`` with ``g <= 0`` iff the boolean ``node`` holds,
    or ``None`` when no such form is available (``!=``, ``not ==``).

    Strict comparisons share the margin of their non-strict version, so the
    two can disagree exactly on the boundary.
    """
    if node.type != BOOL:
        raise ExprTypeError("margins exist only for boolean expressions")
    if isinstance(node, Const):
        return Num(-math.inf if node.value else math.inf)
    if isinstance(node, Compare):
        a, b = node.left, node.right
        if node.op in ("<=", "<"):
            return BinOp("-", a, b)
        if node.op in (">=", ">"):
            return BinOp("-", b, a)
        if node.op == "==":
            return Call("abs", (BinOp("-", a, b),))
        return None
    if isinstance(node, BoolOp):
        ma, mb = margin_expression(node.left), margin_expression(node.right)
        if ma is None or mb is None:
            return None
        return Call("max" if node.op == "and" else "min", (ma, mb))
    if isinstance(node, Not):
        m = margin_expression(node.arg)
        if m is None or (isinstance(node.arg, Compare) and node.arg.op == "=="):
            return None
        if isinstance(m, Num):
            return Num(-m.value)
        return Neg(m)
    raise ExprTypeError(f"no margin for {node!r}")
