"""Deterministic finite automata for a co-safe LTL fragment.

Supported formulas::

    g ::= F a | a U a' | X a | g & g        a, a' ::= p | !p

Words are read one observation per step. The observation alphabet has one
letter per proposition ``p`` (p true, all other propositions false) and one
per negation ``!p`` (all propositions false).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Any, Iterable, Sequence

from .hybrid import HybridError, HybridSystem, PropositionSet, State
from .ltl.formula import And, Atom, Eventually, Formula, Next, Not, UntilStrong, atoms
from .ltl.semantics import is_sc_fragment

SINK = "sink"


class AutomatonError(HybridError):
    pass


class UnsupportedFormula(AutomatonError):
    pass


class UnknownObservation(AutomatonError):
    pass


@dataclass(frozen=True)
class Fsa:
    states: tuple[str, ...]
    initial: str
    observations: tuple[str, ...]
    transitions: dict[tuple[str, str], str]
    accepting: frozenset[str]
    sink: str | None = None
    formula: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.initial not in self.states:
            raise AutomatonError("initial state is not declared")
        if not self.accepting <= set(self.states):
            raise AutomatonError("accepting states must be declared")
        if self.sink is not None and (self.sink not in self.states or self.sink in self.accepting):
            raise AutomatonError("the sink must be a declared, non-accepting state")
        for (s, o), t in self.transitions.items():
            if s not in self.states or t not in self.states or o not in self.observations:
                raise AutomatonError(f"transition {(s, o, t)} uses undeclared labels")

    def step(self, s: str, o: str) -> str:
        if o not in self.observations:
            raise UnknownObservation(o)
        t = self.transitions.get((s, o))
        if t is None:
            if self.sink is None:
                raise AutomatonError(f"no transition from {s} on {o} and no sink")
            return self.sink
        return t

    @property
    def is_total(self) -> bool:
        return self.sink is not None or all(
            (s, o) in self.transitions for s in self.states for o in self.observations)

    def to_dict(self) -> dict[str, Any]:
        return {
            "states": list(self.states),
            "initial": self.initial,
            "observations": list(self.observations),
            "transitions": [[s, o, t] for (s, o), t in sorted(
                self.transitions.items(),
                key=lambda kv: (self.states.index(kv[0][0]), self.observations.index(kv[0][1])))],
            "accepting": sorted(self.accepting, key=self.states.index),
            "sink": self.sink,
            "formula": self.formula,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Fsa:
        return cls(tuple(data["states"]), data["initial"], tuple(data["observations"]),
                   {(s, o): t for s, o, t in data["transitions"]},
                   frozenset(data["accepting"]), data.get("sink"), data.get("formula"))

    def to_dot(self) -> str:
        lines = ["digraph fsa {", "  rankdir=LR;", '  start [shape=point];']
        for s in self.states:
            shape = "doublecircle" if s in self.accepting else "circle"
            lines.append(f'  "{s}" [shape={shape}];')
        lines.append(f'  start -> "{self.initial}";')
        grouped: dict[tuple[str, str], list[str]] = {}
        for (s, o), t in self.transitions.items():
            grouped.setdefault((s, t), []).append(o)
        for (s, t), obs in grouped.items():
            lines.append(f'  "{s}" -> "{t}" [label="{", ".join(obs)}"];')
        lines.append("}")
        return "\n".join(lines)


def alphabet(names: Iterable[str]) -> tuple[str, ...]:
    pos = sorted(set(names))
    return tuple(pos) + tuple("!" + p for p in pos)


def letter_satisfies(letter: str, literal: Formula) -> bool:
    if isinstance(literal, Atom):
        return letter == literal.name
    if isinstance(literal, Not) and isinstance(literal.arg, Atom):
        return letter != literal.arg.name
    raise UnsupportedFormula(f"{literal} is not a literal")


def _is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.arg, Atom))


def _conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


# raw automata: states are ints, 0 initial, full transition table ----------


@dataclass
class _Raw:
    delta: dict[tuple[int, str], int]
    accepting: set[int]
    n: int


def _base(g: Formula, sigma: Sequence[str]) -> _Raw:
    delta: dict[tuple[int, str], int] = {}
    if isinstance(g, Eventually) and _is_literal(g.arg):
        # 0 waiting, 1 done
        for o in sigma:
            delta[0, o] = 1 if letter_satisfies(o, g.arg) else 0
            delta[1, o] = 1
        return _Raw(delta, {1}, 2)
    if isinstance(g, UntilStrong) and _is_literal(g.left) and _is_literal(g.right):
        # 0 waiting, 1 done, 2 failed
        for o in sigma:
            if letter_satisfies(o, g.right):
                delta[0, o] = 1
            elif letter_satisfies(o, g.left):
                delta[0, o] = 0
            else:
                delta[0, o] = 2
            delta[1, o] = 1
            delta[2, o] = 2
        return _Raw(delta, {1}, 3)
    if isinstance(g, Next) and _is_literal(g.arg):
        # 0 first letter, 1 second letter, 2 done, 3 failed
        for o in sigma:
            delta[0, o] = 1
            delta[1, o] = 2 if letter_satisfies(o, g.arg) else 3
            delta[2, o] = 2
            delta[3, o] = 3
        return _Raw(delta, {2}, 4)
    raise UnsupportedFormula(f"{g} is outside the supported fragment")


def product(a: _Raw, b: _Raw, sigma: Sequence[str]) -> _Raw:
    """Synchronous product accepting the intersection of both languages."""
    index = {(0, 0): 0}
    queue = deque([(0, 0)])
    delta: dict[tuple[int, str], int] = {}
    while queue:
        pa, pb = queue.popleft()
        s = index[pa, pb]
        for o in sigma:
            nxt = (a.delta[pa, o], b.delta[pb, o])
            if nxt not in index:
                index[nxt] = len(index)
                queue.append(nxt)
            delta[s, o] = index[nxt]
    acc = {i for (pa, pb), i in index.items() if pa in a.accepting and pb in b.accepting}
    return _Raw(delta, acc, len(index))


def minimize(raw: _Raw, sigma: Sequence[str]) -> _Raw:
    """Moore partition refinement on the reachable part."""
    reach = {0}
    queue = deque([0])
    while queue:
        s = queue.popleft()
        for o in sigma:
            t = raw.delta[s, o]
            if t not in reach:
                reach.add(t)
                queue.append(t)
    states = sorted(reach)
    block = {s: int(s in raw.accepting) for s in states}
    while True:
        sig = {s: (block[s],) + tuple(block[raw.delta[s, o]] for o in sigma) for s in states}
        ids: dict[tuple, int] = {}
        new = {s: ids.setdefault(sig[s], len(ids)) for s in states}
        if len(ids) == len(set(block.values())):
            block = new
            break
        block = new
    # renumber blocks so the initial state's block is 0, in BFS order
    order: dict[int, int] = {block[0]: 0}
    queue = deque([0])
    seen = {0}
    while queue:
        s = queue.popleft()
        for o in sigma:
            t = raw.delta[s, o]
            if block[t] not in order:
                order[block[t]] = len(order)
            if t not in seen:
                seen.add(t)
                queue.append(t)
    delta = {(order[block[s]], o): order[block[raw.delta[s, o]]] for s in states for o in sigma}
    acc = {order[block[s]] for s in states if s in raw.accepting}
    return _Raw(delta, acc, len(order))


def _finish(raw: _Raw, sigma: Sequence[str], formula: str | None) -> Fsa:
    # states that can still reach acceptance
    live = set(raw.accepting)
    changed = True
    while changed:
        changed = False
        for (s, _), t in raw.delta.items():
            if t in live and s not in live:
                live.add(s)
                changed = True
    dead = [s for s in range(raw.n) if s not in live and s != 0]
    # names: initial, accepting in BFS order, then the rest
    bfs = []
    seen = {0}
    queue = deque([0])
    while queue:
        s = queue.popleft()
        bfs.append(s)
        for o in sigma:
            t = raw.delta[s, o]
            if t not in seen:
                seen.add(t)
                queue.append(t)
    ordered = [0] + [s for s in bfs if s in raw.accepting and s != 0] + \
              [s for s in bfs if s not in raw.accepting and s != 0 and s not in dead]
    names = {s: f"s{i}" for i, s in enumerate(ordered)}
    sink = None
    if dead:
        sink = SINK
        for s in dead:
            names[s] = SINK
    states = tuple(names[s] for s in ordered) + ((SINK,) if sink else ())
    delta = {(names[s], o): names[t] for (s, o), t in raw.delta.items()
             if names[s] != SINK and names[t] != SINK}
    return Fsa(states, names[0], tuple(sigma), delta,
               frozenset(names[s] for s in raw.accepting), sink, formula)


def build_automaton(f: Formula, names: Iterable[str] = ()) -> Fsa:
    """Deterministic automaton for ``f``. Observations are the literals of the
    formula's atoms together with ``names`` (extra propositions that may be
    observed but do not occur in ``f``)."""
    if not is_sc_fragment(f):
        raise UnsupportedFormula(f"{f} is not in the co-safe fragment")
    sigma = alphabet(atoms(f) | set(names))
    parts = [_base(g, sigma) for g in _conjuncts(f)]
    raw = parts[0]
    for nxt in parts[1:]:
        raw = product(raw, nxt, sigma)
    return _finish(minimize(raw, sigma), sigma, str(f))


def run_automaton(fsa: Fsa, word: Sequence[str]) -> tuple[list[str], bool]:
    run = [fsa.initial]
    for o in word:
        run.append(fsa.step(run[-1], o))
    return run, run[-1] in fsa.accepting


def observe(x: Sequence[float], props: PropositionSet, obs_order: Sequence[str]) -> str:
    """Label of the first listed proposition true at ``x``, else ``!first``."""
    if not obs_order:
        raise AutomatonError("observation order is empty")
    for name in obs_order:
        props.get(name)
    for name in obs_order:
        if props.holds(name, x):
            return name
    return "!" + obs_order[0]


def augment_system(system: HybridSystem, fsa: Fsa, props: PropositionSet,
                   obs_order: Sequence[str]) -> HybridSystem:
    """Append the automaton state (as its index in ``fsa.states``) to the
    state. Flows keep it constant; every jump advances it on the observation
    of the pre-jump state."""
    if not fsa.is_total:
        raise AutomatonError("the automaton must be total (declare a sink)")
    n = system.dim
    idx = {s: i for i, s in enumerate(fsa.states)}
    labels = fsa.states

    def valid(y: Sequence[float]) -> bool:
        s = y[n]
        return s == int(s) and 0 <= int(s) < len(labels)

    def lift_pred(pred):
        return lambda y: valid(y) and bool(pred(y[:n]))

    def lift_margin(m):
        if m is None:
            return None
        return lambda y: m(y[:n]) if valid(y) else float("inf")

    flows = tuple((lambda y, f=f: tuple(f(y[:n])) + (0.0,)) for f in system.flow_selections)

    def make_jump(g):
        def jump(y: Sequence[float]) -> State:
            o = observe(y[:n], props, obs_order)
            s_next = fsa.step(labels[int(y[n])], o)
            return tuple(float(v) for v in g(y[:n])) + (float(idx[s_next]),)
        return jump

    return HybridSystem(
        dim=n + 1,
        flow_set=lift_pred(system.flow_set),
        jump_set=lift_pred(system.jump_set),
        flow_selections=flows,
        jump_selections=tuple(make_jump(g) for g in system.jump_selections),
        state_space=lift_pred(system.state_space),
        flow_margin=lift_margin(system.flow_margin),
        jump_margin=lift_margin(system.jump_margin),
        state_margin=lift_margin(system.state_margin),
        name=f"{system.name}*fsa" if system.name else "fsa",
    )


def augment_propositions(props: PropositionSet, fsa: Fsa, dim: int) -> PropositionSet:
    """Base propositions lifted to the augmented state, plus ``fsa_accepting``."""
    out = PropositionSet()
    for name in props:
        prop = props.get(name)
        m = prop.margin
        out.add(name, lambda y, p=prop.predicate: p(y[:dim]),
                None if m is None else (lambda y, m=m: m(y[:dim])), prop.source)
    acc = frozenset(i for i, s in enumerate(fsa.states) if s in fsa.accepting)
    out.add("fsa_accepting", lambda y: int(y[dim]) in acc)
    return out


# word semantics oracle -----------------------------------------------------


def word_arc(word: Sequence[str], names: Sequence[str]):
    """Encode a word as a hybrid arc of point phases (one jump per letter),
    state = indicator vector of ``names``; returns ``(arc, props)``."""
    from .hybrid import HybridArc, validate_domain

    names = list(names)
    if not word:
        raise AutomatonError("empty word has no arc")
    dom = validate_domain((k, 0.0, 0.0) for k in range(len(word)))
    rows = []
    for o in word:
        x = [1.0 if o == p else 0.0 for p in names]
        rows.append([(0.0, x)])
    arc = HybridArc(dom, rows, max(1, len(names)))
    props = PropositionSet()
    for i, p in enumerate(names):
        props.add(p, lambda x, i=i: x[i] == 1.0)
    return arc, props


def words(sigma: Sequence[str], max_len: int) -> Iterable[tuple[str, ...]]:
    for n in range(max_len + 1):
        yield from cartesian(sigma, repeat=n)
