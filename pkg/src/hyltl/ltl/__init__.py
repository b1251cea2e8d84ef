from .direct import direct_evaluate
from .formula import (
    Always, And, Atom, Eventually, Formula, FormulaSyntaxError, Iff, Implies, Next, Not, Or,
    UntilStrong, UntilWeak, atoms, depth, parse_formula, subformulas, to_text,
)
from .kernels import BACKEND
from .semantics import (
    NotASample, Verdict, check, evaluate, evaluate_all, holds_for_all_times, is_sc_fragment,
    truth_table,
)

__all__ = [
    "Always", "And", "Atom", "BACKEND", "Eventually", "Formula", "FormulaSyntaxError", "Iff",
    "Implies", "Next", "Not", "NotASample", "Or", "UntilStrong", "UntilWeak", "Verdict",
    "atoms", "check", "depth", "direct_evaluate", "evaluate", "evaluate_all",
    "holds_for_all_times", "is_sc_fragment", "parse_formula", "subformulas", "to_text",
    "truth_table",
]
