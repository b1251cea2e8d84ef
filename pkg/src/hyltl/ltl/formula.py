"""LTL formula syntax tree, parser and printer.

Concrete syntax, loosest binding first::

    iff     := implies ("<->" implies)*
    implies := or ["->" implies]              right-associative
    or      := and ("|" and)*
    and     := until ("&" until)*
    until   := unary [("U" | "until" | "W") until]   right-associative
    unary   := ("!" | "X" | "next" | "F" | "eventually" | "G" | "always") unary
             | atom | "(" iff ")"

Atoms are identifiers other than the operator keywords.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..hybrid import HybridError

KEYWORDS = {
    "X": "X", "next": "X",
    "F": "F", "eventually": "F",
    "G": "G", "always": "G",
    "U": "U", "until": "U",
    "W": "W",
}


class FormulaSyntaxError(HybridError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")

    def caret(self) -> str:
        return f"{self.text}\n{' ' * self.pos}^"


class Formula:
    def __str__(self) -> str:
        return to_text(self)

    def children(self) -> tuple[Formula, ...]:
        return ()


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class _Unary(Formula):
    arg: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)


class Not(_Unary):
    pass


class Next(_Unary):
    pass


class Eventually(_Unary):
    pass


class Always(_Unary):
    pass


class And(_Binary):
    pass


class Or(_Binary):
    pass


class Implies(_Binary):
    pass


class Iff(_Binary):
    pass


class UntilStrong(_Binary):
    pass


class UntilWeak(_Binary):
    pass


_UNARY_SYM = {Not: "!", Next: "X", Eventually: "F", Always: "G"}
_BINARY_SYM = {Iff: "<->", Implies: "->", Or: "|", And: "&", UntilStrong: "U", UntilWeak: "W"}
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, UntilStrong: 5, UntilWeak: 5}
_UNARY_PREC = 6
_ATOM_PREC = 7
_RIGHT_ASSOC = (Implies, UntilStrong, UntilWeak)


def atoms(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    out: set[str] = set()
    for c in f.children():
        out |= atoms(c)
    return out


def depth(f: Formula) -> int:
    return 1 + max((depth(c) for c in f.children()), default=-1) if f.children() else 0


def subformulas(f: Formula) -> list[Formula]:
    """Post-order list of distinct subformulas (children before parents)."""
    seen: dict[Formula, None] = {}

    def walk(g: Formula) -> None:
        for c in g.children():
            walk(c)
        seen.setdefault(g, None)

    walk(f)
    return list(seen)


# printing -----------------------------------------------------------------


def _prec(f: Formula) -> int:
    if isinstance(f, Atom):
        return _ATOM_PREC
    if isinstance(f, _Unary):
        return _UNARY_PREC
    return _PREC[type(f)]


def to_text(f: Formula) -> str:
    def wrap(g: Formula, min_prec: int) -> str:
        s = to_text(g)
        return f"({s})" if _prec(g) < min_prec else s

    if isinstance(f, Atom):
        return f.name
    if isinstance(f, _Unary):
        sym = _UNARY_SYM[type(f)]
        sep = "" if sym == "!" else " "
        return f"{sym}{sep}{wrap(f.arg, _UNARY_PREC)}"
    if isinstance(f, _Binary):
        p = _PREC[type(f)]
        if isinstance(f, _RIGHT_ASSOC):
            lp, rp = p + 1, p
        else:
            lp, rp = p, p + 1
        return f"{wrap(f.left, lp)} {_BINARY_SYM[type(f)]} {wrap(f.right, rp)}"
    raise TypeError(f"not a formula: {f!r}")


# parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op><->|->|&&|\|\||[!&|()~]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        if m.group("name") is not None:
            word = m.group("name")
            kind = "kw" if word in KEYWORDS else "atom"
            toks.append((kind, KEYWORDS.get(word, word), m.start("name")))
        else:
            op = {"&&": "&", "||": "|", "~": "!"}.get(m.group("op"), m.group("op"))
            toks.append(("op", op, m.start("op")))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def at(self, *vals: str) -> bool:
        kind, val, _ = self.peek()
        return kind in ("op", "kw") and val in vals

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str):
        kind, val, pos = self.peek()
        found = val if kind != "end" else "end of input"
        return FormulaSyntaxError(f"{msg}, found {found!r}", pos, self.text)

    def parse(self) -> Formula:
        f = self.p_iff()
        if self.peek()[0] != "end":
            raise self.fail("expected an operator or end of input")
        return f

    def p_iff(self) -> Formula:
        left = self.p_implies()
        while self.at("<->"):
            self.take()
            left = Iff(left, self.p_implies())
        return left

    def p_implies(self) -> Formula:
        left = self.p_or()
        if self.at("->"):
            self.take()
            return Implies(left, self.p_implies())
        return left

    def p_or(self) -> Formula:
        left = self.p_and()
        while self.at("|"):
            self.take()
            left = Or(left, self.p_and())
        return left

    def p_and(self) -> Formula:
        left = self.p_until()
        while self.at("&"):
            self.take()
            left = And(left, self.p_until())
        return left

    def p_until(self) -> Formula:
        left = self.p_unary()
        if self.at("U", "W"):
            op = self.take()[1]
            right = self.p_until()
            return UntilStrong(left, right) if op == "U" else UntilWeak(left, right)
        return left

    def p_unary(self) -> Formula:
        if self.at("!"):
            self.take()
            return Not(self.p_unary())
        if self.at("X", "F", "G"):
            op = self.take()[1]
            arg = self.p_unary()
            return {"X": Next, "F": Eventually, "G": Always}[op](arg)
        kind, val, _ = self.peek()
        if kind == "atom":
            self.take()
            return Atom(val)
        if self.at("("):
            self.take()
            f = self.p_iff()
            if not self.at(")"):
                raise self.fail("expected ')'")
            self.take()
            return f
        raise self.fail("expected a proposition, a unary operator or '('")


def parse_formula(text: str) -> Formula:
    return _Parser(text).parse()
