"""Random arcs and formulas shared by the semantics tests and the acceptance suite."""

import random

from hyltl.hybrid import HybridArc, PropositionSet, validate_domain
from hyltl.ltl import (
    Always, And, Atom, Eventually, Iff, Implies, Next, Not, Or, UntilStrong, UntilWeak,
)

ATOMS = ("p", "q", "r")


def atom_props() -> PropositionSet:
    ps = PropositionSet()
    for i, name in enumerate(ATOMS):
        ps.add(name, lambda x, i=i: x[i] > 0.5, lambda x, i=i: 0.5 - x[i])
    return ps


def random_arc(rng: random.Random, max_samples: int = 200) -> HybridArc:
    """Arc with 3 coordinates, each 0 or 1, so that p/q/r are plain bits."""
    n_target = rng.randint(1, max_samples)
    phases, samples = [], []
    t, j, n = 0.0, 0, 0
    while True:
        if rng.random() < 0.2:
            k = 1
        else:
            k = rng.randint(2, 12)
        k = max(1, min(k, n_target - n)) if n < n_target else 1
        times = [t]
        for _ in range(k - 1):
            times.append(times[-1] + rng.choice([0.05, 0.1, 0.25, 0.5]))
        rows = [(s, tuple(float(rng.random() < 0.5) for _ in ATOMS)) for s in times]
        phases.append((j, t, times[-1]))
        samples.append(rows)
        n += k
        t = times[-1]
        j += 1
        if n >= n_target:
            break
    return HybridArc(validate_domain(phases), samples, len(ATOMS))


_UNARY = (Not, Next, Eventually, Always)
_BINARY = (And, Or, Implies, Iff, UntilStrong, UntilWeak)


def random_formula(rng: random.Random, max_depth: int = 4):
    if max_depth == 0 or rng.random() < 0.25:
        return Atom(rng.choice(ATOMS))
    if rng.random() < 0.45:
        return rng.choice(_UNARY)(random_formula(rng, max_depth - 1))
    return rng.choice(_BINARY)(random_formula(rng, max_depth - 1),
                               random_formula(rng, max_depth - 1))


# expressions ---------------------------------------------------------------

from hyltl.expr import BinOp, BoolOp, Call, Compare, Const, Neg, Num, Var  # noqa: E402
from hyltl.expr import Not as ExprNot  # noqa: E402

_FUN1 = ("abs", "sgn", "sqrt", "exp", "ln", "ceil")
_FUN2 = ("min", "max", "pow")


def random_num_expr(rng: random.Random, depth: int = 4):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Num(rng.choice([0.0, 1.0, 2.0, 0.5, 3.25, 10.0, 1e-3]))
        return Var(rng.choice(["x1", "x2", "x3", "g", "lam"]))
    k = rng.random()
    if k < 0.15:
        return Neg(random_num_expr(rng, depth - 1))
    if k < 0.65:
        return BinOp(rng.choice("+-*/^"), random_num_expr(rng, depth - 1),
                     random_num_expr(rng, depth - 1))
    if k < 0.85:
        return Call(rng.choice(_FUN1), (random_num_expr(rng, depth - 1),))
    return Call(rng.choice(_FUN2), (random_num_expr(rng, depth - 1),
                                    random_num_expr(rng, depth - 1)))


def random_expr(rng: random.Random, depth: int = 4):
    """Numeric or boolean expression tree."""
    if rng.random() < 0.5:
        return random_num_expr(rng, depth)
    return _random_bool(rng, depth)


def _random_bool(rng: random.Random, depth: int):
    if depth <= 1 or rng.random() < 0.4:
        if rng.random() < 0.1:
            return Const(rng.random() < 0.5)
        return Compare(rng.choice(["<=", "<", "==", ">=", ">", "!="]),
                       random_num_expr(rng, depth - 1), random_num_expr(rng, depth - 1))
    if rng.random() < 0.2:
        return ExprNot(_random_bool(rng, depth - 1))
    return BoolOp(rng.choice(["and", "or"]), _random_bool(rng, depth - 1),
                  _random_bool(rng, depth - 1))
