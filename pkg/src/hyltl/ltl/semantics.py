"""Evaluation of LTL formulas on sampled hybrid arcs.

Every subformula is turned into a truth vector over the arc's samples, which
are already ordered by ``t + j``. The temporal operators are single backward
scans (see :mod:`.kernels`). Quantifiers range over sample points only; the
continuum between samples is not inspected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..hybrid import HybridArc, HybridError, PropositionSet
from . import kernels
from .formula import (
    Always, And, Atom, Eventually, Formula, Iff, Implies, Next, Not, Or, UntilStrong,
    UntilWeak, subformulas,
)


class NotASample(HybridError):
    pass


def atom_vector(name: str, arc: HybridArc, props: PropositionSet,
                tol: float | None = None) -> np.ndarray:
    props.get(name)
    return np.fromiter((props.holds(name, x, tol) for x in arc.states),
                       dtype=np.uint8, count=len(arc))


def truth_table(f: Formula, arc: HybridArc, props: PropositionSet,
                tol: float | None = None) -> dict[Formula, np.ndarray]:
    """Truth vector (uint8, one entry per sample) for every subformula of ``f``."""
    prejump = np.ascontiguousarray(arc.prejump, dtype=np.uint8)
    table: dict[Formula, np.ndarray] = {}
    for g in subformulas(f):
        if isinstance(g, Atom):
            v = atom_vector(g.name, arc, props, tol)
        elif isinstance(g, Not):
            v = 1 - table[g.arg]
        elif isinstance(g, And):
            v = table[g.left] & table[g.right]
        elif isinstance(g, Or):
            v = table[g.left] | table[g.right]
        elif isinstance(g, Implies):
            v = (1 - table[g.left]) | table[g.right]
        elif isinstance(g, Iff):
            v = (table[g.left] == table[g.right]).astype(np.uint8)
        elif isinstance(g, Next):
            v = kernels.next_op(table[g.arg], prejump)
        elif isinstance(g, Eventually):
            v = kernels.eventually(table[g.arg])
        elif isinstance(g, Always):
            v = kernels.always(table[g.arg])
        elif isinstance(g, (UntilStrong, UntilWeak)):
            v = kernels.until(table[g.left], table[g.right], isinstance(g, UntilWeak))
        else:
            raise TypeError(f"not a formula: {g!r}")
        table[g] = np.ascontiguousarray(v, dtype=np.uint8)
    return table


def evaluate_all(f: Formula, arc: HybridArc, props: PropositionSet,
                 tol: float | None = None) -> np.ndarray:
    return truth_table(f, arc, props, tol)[f].astype(bool)


def _index(arc: HybridArc, at: tuple[float, int]) -> int:
    i = arc.index_of(at)
    if i is None:
        raise NotASample(f"({at[0]}, {at[1]}) is not a sample point of the arc")
    return i


def evaluate(f: Formula, arc: HybridArc, props: PropositionSet, at: tuple[float, int],
             tol: float | None = None) -> bool:
    i = _index(arc, at)
    return bool(evaluate_all(f, arc, props, tol)[i])


def holds_for_all_times(f: Formula, arc: HybridArc, props: PropositionSet,
                        tol: float | None = None) -> bool:
    if len(arc) == 0:
        raise HybridError("empty arc")
    return bool(evaluate_all(f, arc, props, tol).all())


def is_sc_fragment(f: Formula) -> bool:
    """Only F, X and strong U as temporal operators, negation only on atoms."""
    if isinstance(f, Atom):
        return True
    if isinstance(f, Not):
        return isinstance(f.arg, Atom)
    if isinstance(f, (Always, UntilWeak, Implies, Iff)):
        return False
    return all(is_sc_fragment(c) for c in f.children())


@dataclass
class Verdict:
    """Outcome of checking a formula on one arc.

    ``witness`` is given for a top-level existential operator (F, U, X) that
    holds, ``counterexample`` for a top-level universal operator (G) that
    fails, and for ``--all`` checks the first sample where the formula fails.
    """

    formula: str
    value: bool
    at: tuple[float, int] | None
    samples: int
    witness: tuple[float, int] | None = None
    counterexample: tuple[float, int] | None = None
    note: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    def summary(self) -> str:
        where = "at every sample" if self.at is None else f"at (t, j) = {self.at}"
        lines = [f"{self.formula}: {'true' if self.value else 'false'} {where}",
                 f"satisfied on {self.samples} sampled hybrid times" if self.value
                 else f"checked on {self.samples} sampled hybrid times"]
        if self.witness is not None:
            lines.append(f"witness: (t, j) = {self.witness}")
        if self.counterexample is not None:
            lines.append(f"counterexample: (t, j) = {self.counterexample}")
        if self.note:
            lines.append(self.note)
        return "\n".join(lines)

    def to_dict(self) -> dict[str, Any]:
        return {
            "formula": self.formula,
            "value": self.value,
            "at": list(self.at) if self.at is not None else "all",
            "samples": self.samples,
            "witness": list(self.witness) if self.witness else None,
            "counterexample": list(self.counterexample) if self.counterexample else None,
        }


def _first(v: np.ndarray, start: int) -> int | None:
    hits = np.flatnonzero(v[start:])
    return int(hits[0]) + start if len(hits) else None


def check(f: Formula, arc: HybridArc, props: PropositionSet,
          at: tuple[float, int] | None = (0.0, 0), tol: float | None = None) -> Verdict:
    """Evaluate ``f`` at one sample (or at all samples when ``at`` is None)
    and locate a witness or counterexample."""
    table = truth_table(f, arc, props, tol)
    v = table[f]
    pts = arc.points()
    if at is None:
        ok = bool(v.all())
        bad = None if ok else pts[int(np.flatnonzero(v == 0)[0])]
        return Verdict(str(f), ok, None, len(arc), counterexample=bad)
    i = _index(arc, at)
    ok = bool(v[i])
    verdict = Verdict(str(f), ok, (pts[i][0], pts[i][1]), len(arc))
    if ok and isinstance(f, Eventually):
        k = _first(table[f.arg], i)
        verdict.witness = pts[k] if k is not None else None
    elif ok and isinstance(f, (UntilStrong, UntilWeak)):
        k = _first(table[f.right], i)
        if k is not None and table[f.left][i:k].all():
            verdict.witness = pts[k]
    elif ok and isinstance(f, Next):
        verdict.witness = pts[i + 1]
    elif not ok and isinstance(f, Always):
        k = _first(1 - table[f.arg], i)
        verdict.counterexample = pts[k] if k is not None else None
    elif not ok and isinstance(f, (UntilStrong, UntilWeak)):
        k = _first(1 - table[f.left], i)
        verdict.counterexample = pts[k] if k is not None else None
    return verdict
