"""Fixed-step RK4 simulation of hybrid systems with event localization."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .hybrid import (
    HybridArc, HybridError, HybridSystem, PropositionSet, State, validate_domain,
)

PRIORITIES = ("jump_first", "flow_first", "random")
POLICIES = ("first", "random")


class SimulationError(HybridError):
    pass


class NotInCupD(SimulationError):
    pass


class StepTooLarge(SimulationError):
    pass


class NoSignChange(SimulationError):
    pass


@dataclass(frozen=True)
class SimOptions:
    t_max: float = 10.0
    j_max: int = 100
    step: float = 1e-3
    event_tol: float = 1e-10
    # membership slack for thin sets such as {x1 = 0}; applied through margins
    set_tol: float = 1e-7
    zeno_gap: float = 1e-9
    zeno_run: int = 5
    priority: str = "jump_first"
    seed: int = 0
    selection_policy: str = "first"

    def __post_init__(self) -> None:
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.j_max < 0:
            raise ValueError("j_max must be nonnegative")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.event_tol > 0:
            raise ValueError("event_tol must be positive")
        if self.priority not in PRIORITIES:
            raise ValueError(f"priority must be one of {PRIORITIES}")
        if self.selection_policy not in POLICIES:
            raise ValueError(f"selection_policy must be one of {POLICIES}")
        if self.zeno_run < 1:
            raise ValueError("zeno_run must be at least 1")


@dataclass(frozen=True)
class JumpRecord:
    t: float
    j: int
    x_pre: State
    x_post: State
    selection: int


@dataclass
class SimResult:
    arc: HybridArc
    termination: str
    jump_log: list[JumpRecord] = field(default_factory=list)

    @property
    def flow_time(self) -> float:
        return self.arc.final[0]


def rk4_step(f: Callable[[Sequence[float]], Sequence[float]], x: Sequence[float], h: float) -> State:
    k1 = f(x)
    x2 = [a + 0.5 * h * b for a, b in zip(x, k1)]
    k2 = f(x2)
    x3 = [a + 0.5 * h * b for a, b in zip(x, k2)]
    k3 = f(x3)
    x4 = [a + h * b for a, b in zip(x, k3)]
    k4 = f(x4)
    return tuple(
        a + (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        for a, b1, b2, b3, b4 in zip(x, k1, k2, k3, k4)
    )


def _bisect(flow: Callable[[float], State], pred: Callable[[State], bool],
            lo: float, hi: float, tol: float) -> tuple[float, float]:
    p_lo = bool(pred(flow(lo)))
    if p_lo == bool(pred(flow(hi))):
        raise NoSignChange(f"predicate has the same value at {lo} and {hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if bool(pred(flow(mid))) == p_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def locate_boundary(flow: Callable[[float], State], pred: Callable[[State], bool],
                    bracket: tuple[float, float], tol: float) -> float:
    """Bisect until the bracket is at most ``tol`` wide; return its midpoint."""
    lo, hi = _bisect(flow, pred, bracket[0], bracket[1], tol)
    return 0.5 * (lo + hi)


def _finite(x: Sequence[float]) -> bool:
    return all(math.isfinite(v) for v in x)


def simulate(system: HybridSystem, x0: Sequence[float], opts: SimOptions | None = None) -> SimResult:
    opts = opts or SimOptions()
    tol = opts.set_tol
    x: State = tuple(float(v) for v in x0)
    if len(x) != system.dim:
        raise SimulationError(f"x0 has length {len(x)}, expected {system.dim}")
    if not (system.in_flow(x, tol) or system.in_jump(x, tol)):
        raise NotInCupD(f"x0 = {x} is in neither the flow set nor the jump set")
    rng = random.Random(opts.seed)

    def pick(n: int) -> int:
        return 0 if opts.selection_policy == "first" or n == 1 else rng.randrange(n)

    in_c = lambda y: system.in_flow(y, 0.0)  # noqa: E731
    in_d = lambda y: system.in_jump(y, tol)  # noqa: E731
    can_jump = lambda y: bool(system.jump_selections) and in_d(y)  # noqa: E731

    phases: list[tuple[int, float, float]] = []
    samples: list[list[tuple[float, State]]] = []
    log: list[JumpRecord] = []
    t, j = 0.0, 0
    t_phase = 0.0
    cur: list[tuple[float, State]] = [(t, x)]
    short = 0
    termination = ""
    flow_sel: int | None = None

    def close_phase() -> None:
        phases.append((j, t_phase, t))
        samples.append(cur)

    while True:
        if not system.in_space(x, tol):
            termination = "left_state_space"
            break
        flowable = bool(system.flow_selections) and system.in_flow(x, tol)
        jumpable = can_jump(x)
        want_jump = False
        if jumpable and flowable:
            if opts.priority == "jump_first":
                want_jump = True
            elif opts.priority == "random":
                want_jump = rng.random() < 0.5
        elif jumpable:
            want_jump = True
        elif not flowable:
            termination = "dead_end"
            break

        if not want_jump:
            if t >= opts.t_max:
                termination = "budget_t"
                break
            if flow_sel is None:
                flow_sel = pick(len(system.flow_selections))
            f = system.flow_selections[flow_sel]
            moved, stop = _flow_phase(system, f, x, t, t_phase, cur, opts, in_c,
                                      jumpable or opts.priority == "flow_first", in_d)
            x, t = cur[-1][1], cur[-1][0]
            if stop is not None:
                termination = stop
                break
            if not moved and not can_jump(x):
                termination = "dead_end"
                break
            if not can_jump(x):
                continue
        # jump from x at (t, j)
        if j >= opts.j_max:
            termination = "budget_j"
            break
        short = short + 1 if t - t_phase < opts.zeno_gap else 0
        if short >= opts.zeno_run:
            termination = "zeno_flagged"
            break
        k = pick(len(system.jump_selections))
        x_post = tuple(float(v) for v in system.jump_selections[k](x))
        if len(x_post) != system.dim or not _finite(x_post):
            raise SimulationError(f"jump selection {k} returned {x_post} at {x}")
        log.append(JumpRecord(t, j, x, x_post, k))
        close_phase()
        j += 1
        t_phase = t
        x = x_post
        cur = [(t, x)]
        flow_sel = None

    close_phase()
    domain = validate_domain(phases)
    arc = HybridArc(domain, samples, system.dim)
    return SimResult(arc, termination, log)


def _flow_phase(system, f, x, t, t_phase, cur, opts, in_c, skip_d_entry, in_d):
    """Integrate from ``(t, x)`` until C is left, D is entered (jump_first),
    the state space is left, or ``t_max`` is reached. Samples are appended
    to ``cur``. Returns ``(moved, termination or None)``."""
    h = opts.step
    k = 0
    moved = False
    t0 = t
    watch_d = bool(system.jump_selections) and not skip_d_entry
    in_d_exact = lambda y: system.in_jump(y, 0.0)  # noqa: E731
    while True:
        if t >= opts.t_max:
            return moved, "budget_t"
        k += 1
        t_next = min(t0 + k * h, opts.t_max)
        dt = t_next - t
        if dt <= 0:
            return moved, "budget_t"
        x_new = rk4_step(f, x, dt)
        if not _finite(x_new):
            raise StepTooLarge(f"integration produced {x_new} at t={t_next}")
        flow = (lambda s, x=x: x if s == 0 else rk4_step(f, x, s))
        if watch_d and in_d_exact(x_new):
            _, hi = _bisect(flow, in_d_exact, 0.0, dt, opts.event_tol)
            x_ev = flow(hi)
            if hi > 0 and t + hi > t:
                cur.append((t + hi, x_ev))
                moved = True
            return moved, None
        if not in_c(x_new):
            if not in_c(x):
                # already on the closure boundary and moving outward
                return moved, None
            try:
                lo, _ = _bisect(flow, in_c, 0.0, dt, opts.event_tol)
            except NoSignChange as exc:
                raise StepTooLarge(str(exc)) from None
            if lo > 0 and t + lo > t:
                cur.append((t + lo, flow(lo)))
                moved = True
            return moved, None
        cur.append((t_next, x_new))
        moved = True
        if not system.in_space(x_new, opts.set_tol):
            return moved, "left_state_space"
        x, t = x_new, t_next


def measure_settling_time(arc: HybridArc, props: PropositionSet, name: str,
                          tol: float = 0.0) -> tuple[float, int] | None:
    """First sample, in ``t + j`` order, where ``name`` holds (through its
    margin with slack ``tol`` when one exists)."""
    props.get(name)
    for t, j, x in zip(arc.times, arc.jumps, arc.states):
        if props.holds(name, x, tol):
            return t, j
    return None
