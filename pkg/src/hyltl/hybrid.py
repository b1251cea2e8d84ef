"""Hybrid time domains, hybrid arcs, hybrid systems and atomic propositions.

A hybrid arc is stored as a list of phases. Phase ``j`` covers the closed
interval ``[t_j, t_{j+1}]``; the jump instant ``t_{j+1}`` therefore appears
twice, once as the last point of phase ``j`` (pre-jump) and once as the first
point of phase ``j + 1`` (post-jump).
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

State = tuple[float, ...]
Predicate = Callable[[Sequence[float]], bool]
Margin = Callable[[Sequence[float]], float]


class HybridError(Exception):
    """Base class for errors raised by this package."""


class DomainError(HybridError):
    pass


class NonzeroOrigin(DomainError):
    pass


class GapOrOverlap(DomainError):
    pass


class NegativeInterval(DomainError):
    pass


class NonConsecutiveJ(DomainError):
    pass


class NotInDomain(HybridError):
    pass


class UnknownProposition(HybridError, KeyError):
    def __str__(self) -> str:
        return f"unknown proposition {self.args[0]!r}"


class ArcError(HybridError):
    pass


@dataclass(frozen=True)
class Phase:
    j: int
    t_start: float
    t_end: float


class Ordering(enum.Enum):
    BEFORE = -1
    EQUAL = 0
    AFTER = 1


@dataclass(frozen=True)
class HybridTimeDomain:
    """A compact hybrid time domain given by its phases. Build with
    :func:`validate_domain`."""

    phases: tuple[Phase, ...]

    def __post_init__(self) -> None:
        _check_phases(self.phases)

    @property
    def last(self) -> Phase:
        return self.phases[-1]

    def contains(self, point: tuple[float, int]) -> bool:
        t, j = point
        if j != int(j) or j < 0 or j >= len(self.phases):
            return False
        ph = self.phases[int(j)]
        return ph.t_start <= t <= ph.t_end

    def endpoints(self) -> list[tuple[float, int]]:
        pts = []
        for ph in self.phases:
            pts.append((ph.t_start, ph.j))
            if ph.t_end != ph.t_start:
                pts.append((ph.t_end, ph.j))
        return pts


def _check_phases(phases: Sequence[Phase]) -> None:
    if not phases:
        raise DomainError("hybrid time domain needs at least one phase")
    first = phases[0]
    if first.j != 0 or first.t_start != 0:
        raise NonzeroOrigin(
            f"first phase must start at (0, 0), got (t={first.t_start}, j={first.j})"
        )
    for k, ph in enumerate(phases):
        if not (math.isfinite(ph.t_start) and math.isfinite(ph.t_end)):
            raise DomainError(f"phase {k} has non-finite bounds")
        if ph.t_end < ph.t_start:
            raise NegativeInterval(f"phase {k}: t_end {ph.t_end} < t_start {ph.t_start}")
        if k == 0:
            continue
        prev = phases[k - 1]
        if ph.j != prev.j + 1:
            raise NonConsecutiveJ(f"phase {k}: j={ph.j} does not follow j={prev.j}")
        if ph.t_start != prev.t_end:
            raise GapOrOverlap(
                f"phase {k} starts at t={ph.t_start} but phase {k - 1} ends at t={prev.t_end}"
            )


def validate_domain(phases: Iterable[Sequence[float]]) -> HybridTimeDomain:
    """Build a domain from ``(j, t_start, t_end)`` triples, rejecting any that
    do not describe a hybrid time domain."""
    built = []
    for item in phases:
        j, t0, t1 = item
        if j != int(j):
            raise NonConsecutiveJ(f"jump index {j} is not an integer")
        built.append(Phase(int(j), float(t0), float(t1)))
    return HybridTimeDomain(tuple(built))


def compare_hybrid_times(
    a: tuple[float, int], b: tuple[float, int], domain: HybridTimeDomain
) -> Ordering:
    for p in (a, b):
        if not domain.contains(p):
            raise NotInDomain(f"{p} is not in the domain")
    sa, sb = a[0] + a[1], b[0] + b[1]
    if sa == sb and (a[0], a[1]) != (b[0], b[1]):
        # float rounding only; t + j is injective on a domain
        sa, sb = (a[1], a[0]), (b[1], b[0])
    if sa < sb:
        return Ordering.BEFORE
    if sa > sb:
        return Ordering.AFTER
    return Ordering.EQUAL


class HybridArc:
    """Sampled hybrid arc.

    ``phase_samples[j]`` is the ordered list of ``(t, x)`` samples of phase
    ``j``; it starts at the phase's ``t_start`` and ends at its ``t_end``.
    """

    def __init__(
        self,
        domain: HybridTimeDomain,
        phase_samples: Sequence[Sequence[tuple[float, Sequence[float]]]],
        dim: int,
    ):
        if len(phase_samples) != len(domain.phases):
            raise ArcError("one sample list per phase is required")
        stored = []
        for ph, samples in zip(domain.phases, phase_samples):
            if not samples:
                raise ArcError(f"phase {ph.j} has no samples")
            rows = tuple((float(t), tuple(float(v) for v in x)) for t, x in samples)
            if rows[0][0] != ph.t_start or rows[-1][0] != ph.t_end:
                raise ArcError(f"phase {ph.j} samples must span [{ph.t_start}, {ph.t_end}]")
            if ph.t_start == ph.t_end and len(rows) != 1:
                raise ArcError(f"point phase {ph.j} must have exactly one sample")
            for (ta, _), (tb, _) in zip(rows, rows[1:]):
                if not tb > ta:
                    raise ArcError(f"phase {ph.j} sample times are not strictly increasing")
            for _, x in rows:
                if len(x) != dim:
                    raise ArcError(f"state {x} does not have dimension {dim}")
            stored.append(rows)
        self.domain = domain
        self.dim = dim
        self.phase_samples: tuple[tuple[tuple[float, State], ...], ...] = tuple(stored)
        self._times: list[float] = []
        self._js: list[int] = []
        self._states: list[State] = []
        self._prejump: list[bool] = []
        last_j = len(stored) - 1
        for j, rows in enumerate(stored):
            for k, (t, x) in enumerate(rows):
                self._times.append(t)
                self._js.append(j)
                self._states.append(x)
                self._prejump.append(k == len(rows) - 1 and j < last_j)
        self._index = {(t, j): i for i, (t, j) in enumerate(zip(self._times, self._js))}

    def __len__(self) -> int:
        return len(self._times)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, HybridArc)
            and self.dim == other.dim
            and self.domain == other.domain
            and self.phase_samples == other.phase_samples
        )

    def __repr__(self) -> str:
        return f"HybridArc(dim={self.dim}, phases={len(self.domain.phases)}, samples={len(self)})"

    @property
    def times(self) -> list[float]:
        return self._times

    @property
    def jumps(self) -> list[int]:
        return self._js

    @property
    def states(self) -> list[State]:
        return self._states

    @property
    def prejump(self) -> list[bool]:
        """``prejump[i]`` is true when ``(t_i, j_i + 1)`` is also in the domain."""
        return self._prejump

    def points(self) -> list[tuple[float, int]]:
        return list(zip(self._times, self._js))

    @property
    def x0(self) -> State:
        return self._states[0]

    @property
    def final(self) -> tuple[float, int, State]:
        return self._times[-1], self._js[-1], self._states[-1]

    def index_of(self, point: tuple[float, int], tol: float = 0.0) -> int | None:
        t, j = point
        i = self._index.get((float(t), int(j)))
        if i is not None or tol <= 0:
            return i
        if not 0 <= j < len(self.phase_samples):
            return None
        best, best_d = None, tol
        for i, (tt, jj) in enumerate(zip(self._times, self._js)):
            if jj == j and abs(tt - t) <= best_d:
                best, best_d = i, abs(tt - t)
        return best

    def sample_at(self, point: tuple[float, int]) -> State:
        t, j = point
        if not self.domain.contains((t, j)):
            raise NotInDomain(f"({t}, {j}) is not in the arc's domain")
        i = self._index.get((float(t), int(j)))
        if i is not None:
            return self._states[i]
        rows = self.phase_samples[int(j)]
        lo, hi = 0, len(rows) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if rows[mid][0] <= t:
                lo = mid
            else:
                hi = mid
        (ta, xa), (tb, xb) = rows[lo], rows[hi]
        w = (t - ta) / (tb - ta)
        return tuple(a + w * (b - a) for a, b in zip(xa, xb))

    # serialization -------------------------------------------------------

    def to_dict(self, meta: Mapping[str, Any] | None = None) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "phases": [
                {"j": ph.j, "t_start": ph.t_start, "t_end": ph.t_end}
                for ph in self.domain.phases
            ],
            "samples": [
                {"t": t, "j": j, "x": list(x)}
                for t, j, x in zip(self._times, self._js, self._states)
            ],
            "meta": dict(meta or {}),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> HybridArc:
        domain = validate_domain(
            (ph["j"], ph["t_start"], ph["t_end"]) for ph in data["phases"]
        )
        per_phase: list[list[tuple[float, list[float]]]] = [[] for _ in domain.phases]
        for s in data["samples"]:
            j = int(s["j"])
            if not 0 <= j < len(per_phase):
                raise ArcError(f"sample with j={j} lies outside the domain")
            per_phase[j].append((s["t"], s["x"]))
        return cls(domain, per_phase, int(data["dim"]))


def dump_trace(arc: HybridArc, meta: Mapping[str, Any] | None = None) -> str:
    return json.dumps(arc.to_dict(meta), indent=1, sort_keys=True)


def load_trace(text: str) -> tuple[HybridArc, dict[str, Any]]:
    data = json.loads(text)
    return HybridArc.from_dict(data), dict(data.get("meta", {}))


def write_trace(path: str, arc: HybridArc, meta: Mapping[str, Any] | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(dump_trace(arc, meta))


def read_trace(path: str) -> tuple[HybridArc, dict[str, Any]]:
    with open(path) as fh:
        return load_trace(fh.read())


def write_csv(path: str, arc: HybridArc) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "j"] + [f"x{i + 1}" for i in range(arc.dim)])
        for t, j, x in zip(arc.times, arc.jumps, arc.states):
            w.writerow([repr(t), j] + [repr(v) for v in x])


# systems and propositions ------------------------------------------------


@dataclass(frozen=True)
class HybridSystem:
    """Data ``(C, F, D, G)`` on a state space ``X``.

    The set-valued maps are given as finite lists of single-valued
    selections. The optional margin functions follow the convention
    ``margin(x) <= 0`` iff the point is in the set and let the simulator and
    checkers apply numerical tolerances to thin sets such as ``{x1 = 0}``.
    """

    dim: int
    flow_set: Predicate
    jump_set: Predicate
    flow_selections: tuple[Callable[[Sequence[float]], Sequence[float]], ...]
    jump_selections: tuple[Callable[[Sequence[float]], Sequence[float]], ...]
    state_space: Predicate = lambda x: True
    flow_margin: Margin | None = None
    jump_margin: Margin | None = None
    state_margin: Margin | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise HybridError("state dimension must be positive")
        if not self.flow_selections and not self.jump_selections:
            raise HybridError("a hybrid system needs a flow or a jump selection")
        object.__setattr__(self, "flow_selections", tuple(self.flow_selections))
        object.__setattr__(self, "jump_selections", tuple(self.jump_selections))

    def in_flow(self, x: Sequence[float], tol: float = 0.0) -> bool:
        return _member(self.flow_set, self.flow_margin, x, tol)

    def in_jump(self, x: Sequence[float], tol: float = 0.0) -> bool:
        return _member(self.jump_set, self.jump_margin, x, tol)

    def in_space(self, x: Sequence[float], tol: float = 0.0) -> bool:
        return _member(self.state_space, self.state_margin, x, tol)

    def flows(self, x: Sequence[float]) -> list[State]:
        return [tuple(float(v) for v in f(x)) for f in self.flow_selections]

    def jumps(self, x: Sequence[float]) -> list[State]:
        return [tuple(float(v) for v in g(x)) for g in self.jump_selections]


def _member(pred: Predicate, margin: Margin | None, x: Sequence[float], tol: float) -> bool:
    if pred(x):
        return True
    if tol > 0 and margin is not None:
        try:
            return margin(x) <= tol
        except (ArithmeticError, ValueError):
            return False
    return False


@dataclass(frozen=True)
class Proposition:
    predicate: Predicate
    margin: Margin | None = None
    source: str | None = None


@dataclass
class PropositionSet:
    """Named atomic propositions over the state."""

    props: dict[str, Proposition] = field(default_factory=dict)

    def __contains__(self, name: str) -> bool:
        return name in self.props

    def __iter__(self):
        return iter(self.props)

    def names(self) -> list[str]:
        return list(self.props)

    def add(self, name: str, predicate: Predicate, margin: Margin | None = None,
            source: str | None = None) -> None:
        if name in self.props:
            raise HybridError(f"duplicate proposition {name!r}")
        self.props[name] = Proposition(predicate, margin, source)

    def get(self, name: str) -> Proposition:
        try:
            return self.props[name]
        except KeyError:
            raise UnknownProposition(name) from None

    def holds(self, name: str, x: Sequence[float], tol: float | None = None) -> bool:
        """Truth of ``name`` at ``x``. With ``tol`` and a margin function the
        test becomes ``margin(x) <= tol``."""
        prop = self.get(name)
        if tol is not None and prop.margin is not None:
            return prop.margin(x) <= tol
        return bool(prop.predicate(x))

    def check_margins(self, points: Iterable[Sequence[float]]) -> list[tuple[str, State]]:
        """Points where a margin function disagrees with its predicate."""
        bad = []
        for x in points:
            for name, prop in self.props.items():
                if prop.margin is not None and bool(prop.predicate(x)) != (prop.margin(x) <= 0):
                    bad.append((name, tuple(x)))
        return bad


def sample_at(arc: HybridArc, point: tuple[float, int]) -> State:
    return arc.sample_at(point)
