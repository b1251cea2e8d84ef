"""Brute-force evaluator that enumerates sample pairs literally.

Independent of the scan kernels: orders samples by the value ``t + j``
itself and finds ``(t, j + 1)`` by lookup rather than by position. Quadratic
in the number of samples; intended as a test oracle.
"""

from __future__ import annotations

import numpy as np

from ..hybrid import HybridArc, PropositionSet
from .formula import (
    Always, And, Atom, Eventually, Formula, Iff, Implies, Next, Not, Or, UntilStrong,
    UntilWeak,
)


def direct_evaluate(f: Formula, arc: HybridArc, props: PropositionSet,
                    tol: float | None = None) -> np.ndarray:
    s = np.asarray(arc.times, dtype=float) + np.asarray(arc.jumps, dtype=float)
    where = {(t, j): i for i, (t, j) in enumerate(arc.points())}
    n = len(s)
    cache: dict[Formula, np.ndarray] = {}

    def ev(g: Formula) -> np.ndarray:
        if g in cache:
            return cache[g]
        if isinstance(g, Atom):
            r = np.array([props.holds(g.name, x, tol) for x in arc.states], dtype=bool)
        elif isinstance(g, Not):
            r = ~ev(g.arg)
        elif isinstance(g, And):
            r = ev(g.left) & ev(g.right)
        elif isinstance(g, Or):
            r = ev(g.left) | ev(g.right)
        elif isinstance(g, Implies):
            r = ~ev(g.left) | ev(g.right)
        elif isinstance(g, Iff):
            r = ev(g.left) == ev(g.right)
        elif isinstance(g, Next):
            a = ev(g.arg)
            r = np.zeros(n, dtype=bool)
            for i, (t, j) in enumerate(arc.points()):
                k = where.get((t, j + 1))
                r[i] = k is not None and bool(a[k])
        elif isinstance(g, Eventually):
            a = ev(g.arg)
            r = np.array([a[s >= s[i]].any() for i in range(n)], dtype=bool)
        elif isinstance(g, Always):
            a = ev(g.arg)
            r = np.array([a[s >= s[i]].all() for i in range(n)], dtype=bool)
        elif isinstance(g, (UntilStrong, UntilWeak)):
            p, q = ev(g.left), ev(g.right)
            r = np.zeros(n, dtype=bool)
            for i in range(n):
                later = s >= s[i]
                bad = later & ~p
                # a witness k needs p at every m with s_i <= s_m < s_k
                limit = s[bad].min() if bad.any() else np.inf
                strong = bool((later & q & (s <= limit)).any())
                r[i] = strong or (isinstance(g, UntilWeak) and not bad.any())
        else:
            raise TypeError(f"not a formula: {g!r}")
        cache[g] = r
        return r

    return ev(f)
