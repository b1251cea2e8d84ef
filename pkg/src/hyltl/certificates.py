"""Sample-based checks of barrier and Lyapunov sufficient conditions.

Every check evaluates the hypotheses of a sufficient condition on a finite
set of sampled states. A passing report means "no violation on the samples",
never a proof. Inequalities ``lhs <= rhs`` count as violated only when
``lhs - rhs > ABS_TOL + REL_TOL * scale``; ties pass.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .hybrid import HybridError, HybridSystem, PropositionSet, State

ABS_TOL = 1e-9
REL_TOL = 1e-6
MAX_LISTED = 10

PASSED = "passed_on_samples"
VIOLATED = "violated"

Func = Callable[[Sequence[float]], float]
Pred = Callable[[Sequence[float]], bool]


class CertificateError(HybridError):
    pass


class BadParameters(CertificateError, ValueError):
    pass


class GradientUnavailable(CertificateError):
    pass


def violates(margin: float, scale: float = 0.0) -> bool:
    return margin > ABS_TOL + REL_TOL * abs(scale)


@dataclass(frozen=True)
class ScalarCertificate:
    """A scalar function of the state used as a barrier or Lyapunov function.

    ``nonsmooth`` marks functions with kinks; their flow derivative bound
    also takes forward difference quotients along each flow direction.
    """

    func: Func
    gradient: Callable[[Sequence[float]], Sequence[float]] | None = None
    role: str = "lyapunov"
    nonsmooth: bool = False
    name: str = "V"
    source: str | None = None

    def __post_init__(self) -> None:
        if self.role not in ("barrier", "lyapunov"):
            raise CertificateError(f"unknown role {self.role!r}")

    def __call__(self, x: Sequence[float]) -> float:
        return float(self.func(x))

    def grad(self, x: Sequence[float]) -> list[float]:
        if self.gradient is not None:
            g = [float(v) for v in self.gradient(x)]
            if all(math.isfinite(v) for v in g):
                return g
        g = finite_difference_gradient(self.func, x)
        if not all(math.isfinite(v) for v in g):
            raise GradientUnavailable(f"no finite gradient of {self.name} at {tuple(x)}")
        return g


def finite_difference_gradient(func: Func, x: Sequence[float]) -> list[float]:
    x = [float(v) for v in x]
    g = []
    for i, xi in enumerate(x):
        h = 1e-6 * (1.0 + abs(xi))
        xp = list(x)
        xm = list(x)
        xp[i] = xi + h
        xm[i] = xi - h
        g.append((float(func(xp)) - float(func(xm))) / (2.0 * h))
    return g


def check_gradient(cert: ScalarCertificate, bounds: Sequence[tuple[float, float]],
                   n: int = 100, seed: int = 0, rel_tol: float = 1e-5,
                   where: Pred | None = None) -> list[tuple[State, int, float, float]]:
    """Compare the supplied gradient with central differences at ``n`` random
    points; returns ``(x, coordinate, supplied, numeric)`` for mismatches."""
    if cert.gradient is None:
        return []
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    bad = []
    tried = 0
    while tried < n:
        x = tuple(float(v) for v in rng.uniform(lo, hi))
        if where is not None and not where(x):
            tried += 1
            continue
        tried += 1
        g = [float(v) for v in cert.gradient(x)]
        fd = finite_difference_gradient(cert.func, x)
        for i, (a, b) in enumerate(zip(g, fd)):
            if abs(a - b) > rel_tol * max(abs(a), abs(b), 1.0):
                bad.append((x, i, a, b))
    return bad


# sampling -----------------------------------------------------------------


@dataclass(frozen=True)
class Sampler:
    """Grid or uniform random samples of a box.

    ``boundary_radius`` is the width of the band just outside K used for the
    flow condition of the invariance check; ``probe_step`` is the Euler step
    used to decide whether a flow direction points into the flow set.
    """

    bounds: tuple[tuple[float, float], ...]
    mode: str = "grid"
    counts: tuple[int, ...] | None = None
    budget: int = 10_000
    seed: int = 0
    boundary_radius: float = 0.05
    probe_step: float = 1e-6

    def __post_init__(self) -> None:
        object.__setattr__(self, "bounds", tuple((float(a), float(b)) for a, b in self.bounds))
        if self.counts is not None:
            object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if self.mode not in ("grid", "random"):
            raise BadParameters(f"unknown sampler mode {self.mode!r}")
        if not self.bounds:
            raise BadParameters("sampler needs at least one coordinate")
        for a, b in self.bounds:
            if not (math.isfinite(a) and math.isfinite(b)) or b < a:
                raise BadParameters(f"bad sampler bounds {(a, b)}")
        if self.budget < 1:
            raise BadParameters("sample budget must be at least 1")
        if self.counts is not None:
            if len(self.counts) != len(self.bounds) or min(self.counts) < 1:
                raise BadParameters("one positive count per coordinate is required")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def points(self) -> list[State]:
        if self.mode == "random":
            rng = np.random.default_rng(self.seed)
            lo = np.array([b[0] for b in self.bounds])
            hi = np.array([b[1] for b in self.bounds])
            arr = rng.uniform(lo, hi, size=(self.budget, self.dim))
            return [tuple(float(v) for v in row) for row in arr]
        counts = self.counts or (max(1, round(self.budget ** (1.0 / self.dim))),) * self.dim
        axes = [np.linspace(a, b, c) if c > 1 else np.array([0.5 * (a + b)])
                for (a, b), c in zip(self.bounds, counts)]
        mesh = np.meshgrid(*axes, indexing="ij")
        flat = np.stack([m.ravel() for m in mesh], axis=1)
        return [tuple(float(v) for v in row) for row in flat]

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "bounds": [list(b) for b in self.bounds],
            "counts": list(self.counts) if self.counts else None,
            "budget": self.budget,
            "seed": self.seed,
            "boundary_radius": self.boundary_radius,
            "probe_step": self.probe_step,
        }


# reports ------------------------------------------------------------------


def _jsonable(v: Any) -> Any:
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, dict):
        return {k: _jsonable(w) for k, w in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(w) for w in v]
    return v


@dataclass
class Condition:
    name: str
    description: str
    advisory: bool = False
    # side checks (positive definiteness) do not decide vacuity
    core: bool = True
    checked: int = 0
    violations: int = 0
    worst_margin: float = -math.inf
    points: list[State] = field(default_factory=list)

    @property
    def vacuous(self) -> bool:
        return self.checked == 0

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def record(self, x: Sequence[float], margin: float, scale: float = 0.0,
               strict: bool = False) -> bool:
        """Record ``margin <= 0`` (or ``margin < 0`` when ``strict``) at ``x``."""
        self.checked += 1
        if margin > self.worst_margin or (math.isnan(margin)):
            self.worst_margin = margin
        bad = (margin >= 0) if strict else (math.isnan(margin) or violates(margin, scale))
        if bad:
            self.violations += 1
            if len(self.points) < MAX_LISTED:
                self.points.append(tuple(x))
        return not bad

    def to_dict(self) -> dict[str, Any]:
        return _jsonable({
            "name": self.name,
            "description": self.description,
            "advisory": self.advisory,
            "checked": self.checked,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "vacuous": self.vacuous,
            "points": [list(p) for p in self.points],
        })


@dataclass
class CertificateReport:
    check: str
    conditions: list[Condition] = field(default_factory=list)
    parameters: dict[str, Any] = field(default_factory=dict)
    assumptions: list[str] = field(default_factory=list)
    samples: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return VIOLATED if any(not c.ok and not c.advisory for c in self.conditions) else PASSED

    @property
    def passed(self) -> bool:
        return self.verdict == PASSED

    @property
    def vacuous(self) -> bool:
        return all(c.vacuous for c in self.conditions if c.core and not c.advisory)

    def condition(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def add(self, name: str, description: str, advisory: bool = False,
            core: bool = True) -> Condition:
        c = Condition(name, description, advisory, core)
        self.conditions.append(c)
        return c

    def failed(self) -> list[str]:
        return [c.name for c in self.conditions if not c.ok and not c.advisory]

    def merge(self, other: CertificateReport, prefix: str = "") -> None:
        for c in other.conditions:
            c.name = prefix + c.name
            self.conditions.append(c)
        for a in other.assumptions:
            if a not in self.assumptions:
                self.assumptions.append(a)
        self.notes.extend(other.notes)

    def to_dict(self) -> dict[str, Any]:
        return _jsonable({
            "check": self.check,
            "verdict": self.verdict,
            "vacuous": self.vacuous,
            "samples": self.samples,
            "parameters": self.parameters,
            "conditions": [c.to_dict() for c in self.conditions],
            "assumptions": list(self.assumptions),
            "notes": list(self.notes),
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    def summary(self) -> str:
        lines = [f"{self.check}: {self.verdict}"
                 + (" (vacuous: no relevant samples)" if self.vacuous else ""),
                 f"  sampled states: {self.samples}"]
        if self.parameters:
            params = ", ".join(f"{k}={v}" for k, v in sorted(self.parameters.items()))
            lines.append(f"  parameters: {params}")
        for c in self.conditions:
            tag = "ok" if c.ok else ("advisory" if c.advisory else "VIOLATED")
            lines.append(
                f"  [{tag}] {c.name}: {c.description} "
                f"(checked {c.checked}, violations {c.violations}, worst margin {c.worst_margin:.6g})"
            )
            for p in c.points[:3]:
                lines.append(f"      at x = {p}")
        for a in self.assumptions:
            lines.append(f"  assumed: {a}")
        for n in self.notes:
            lines.append(f"  note: {n}")
        return "\n".join(lines)


# derivative surrogates ----------------------------------------------------


def u_c(system: HybridSystem, cert: ScalarCertificate, x: Sequence[float]) -> float:
    """Largest rate of change of ``cert`` over the flow selections at ``x``;
    ``-inf`` outside the flow set."""
    if not system.flow_selections or not system.in_flow(x):
        return -math.inf
    g = cert.grad(x)
    v0 = cert(x) if cert.nonsmooth else 0.0
    h = 1e-6 * (1.0 + max(abs(v) for v in x))
    best = -math.inf
    for eta in system.flows(x):
        rate = sum(a * b for a, b in zip(g, eta))
        if cert.nonsmooth:
            xh = [a + h * b for a, b in zip(x, eta)]
            rate = max(rate, (cert(xh) - v0) / h)
        best = max(best, rate)
    return best


def u_d(system: HybridSystem, cert: ScalarCertificate, x: Sequence[float]) -> float:
    """Largest change of ``cert`` over the jump selections at ``x``; ``-inf``
    outside the jump set."""
    if not system.jump_selections or not system.in_jump(x):
        return -math.inf
    v = cert(x)
    return max(cert(z) - v for z in system.jumps(x))


def settling_bound(v0: float, mode: str, c1: float | None = None, c2: float | None = None,
                   c: float | None = None) -> float | int:
    """Upper bound on flow time (``mode='flow'``) or jump count (``'jump'``)
    needed to reach the set where the certificate vanishes."""
    if not v0 >= 0:
        raise BadParameters("V0 must be nonnegative")
    if mode == "flow":
        _flow_params(c1, c2)
        if v0 == 0:
            return 0.0
        return v0 ** (1.0 - c2) / (c1 * (1.0 - c2))
    if mode == "jump":
        if c is None or not c > 0:
            raise BadParameters("jump mode needs c > 0")
        return int(math.ceil(v0 / c))
    raise BadParameters(f"unknown mode {mode!r}")


def _flow_params(c1, c2) -> None:
    if c1 is None or not c1 > 0:
        raise BadParameters("c1 must be positive")
    if c2 is None or not 0 <= c2 < 1:
        raise BadParameters("c2 must lie in [0, 1)")


# helpers ------------------------------------------------------------------


class _Ctx:
    """Samples restricted to the state space, with cached memberships."""

    def __init__(self, system: HybridSystem, sampler: Sampler, props: PropositionSet | None,
                 p: str | None, region: Pred | None):
        if sampler.dim != system.dim:
            raise BadParameters(f"sampler has {sampler.dim} coordinates, system {system.dim}")
        self.system = system
        self.sampler = sampler
        self.props = props
        self.region = region
        self.points = [x for x in sampler.points() if system.in_space(x)]
        self.in_n = [region is None or bool(region(x)) for x in self.points]
        self.in_c = [bool(system.flow_selections) and system.in_flow(x) for x in self.points]
        self.in_d = [bool(system.jump_selections) and system.in_jump(x) for x in self.points]
        self.in_k = [props.holds(p, x) for x in self.points] if p is not None else None

    def in_set(self, name: str, x: Sequence[float]) -> bool:
        return self.props.holds(name, x)


def _report(name: str, ctx: _Ctx, **params) -> CertificateReport:
    r = CertificateReport(name, parameters={k: v for k, v in params.items() if v is not None},
                          samples=len(ctx.points))
    r.parameters["sampler"] = ctx.sampler.to_dict()
    return r


def _positive_definite(report: CertificateReport, ctx: _Ctx, cert: ScalarCertificate) -> None:
    nonneg = report.add("V_nonnegative", "V(x) >= 0 on sampled states in N", core=False)
    off_k = report.add("V_positive_off_K", "V(x) > 0 on sampled states in N outside K",
                       core=False)
    on_k = report.add("V_zero_on_K", "V(x) = 0 on sampled states in K", advisory=True,
                      core=False)
    for x, n, k in zip(ctx.points, ctx.in_n, ctx.in_k):
        if not n:
            continue
        v = cert(x)
        nonneg.record(x, -v, v)
        if k:
            on_k.record(x, abs(v), 0.0)
        else:
            off_k.record(x, -v, strict=True)


def _region_invariance(report: CertificateReport, ctx: _Ctx) -> None:
    if ctx.region is None:
        return
    c = report.add("G_maps_N_into_N", "every jump from D in N lands in N (spot check)")
    for x, n, d in zip(ctx.points, ctx.in_n, ctx.in_d):
        if n and d:
            for z in ctx.system.jumps(x):
                c.record(x, 0.0 if ctx.region(z) else 1.0)


_HORIZON_FLOW = ("every maximal solution from N outside K flows long enough to reach K "
                 "(horizon condition; not checked numerically)")
_HORIZON_JUMP = ("every maximal solution from N outside K jumps often enough to reach K "
                 "(horizon condition; not checked numerically)")
_K_CLOSED = "K is closed"
_N_OPEN = "N is an open neighborhood of K contained in X with G(N) inside N"


# barrier checks -----------------------------------------------------------


def check_barrier_candidate(cert: ScalarCertificate, p: str, system: HybridSystem,
                            sampler: Sampler, props: PropositionSet) -> CertificateReport:
    ctx = _Ctx(system, sampler, props, p, None)
    report = _report("barrier_candidate", ctx)
    _barrier_candidate(report, ctx, cert, p)
    return report


def _barrier_candidate(report: CertificateReport, ctx: _Ctx, cert: ScalarCertificate,
                       p: str) -> None:
    on_k = report.add("B_nonpositive_on_K", "B(x) <= 0 on sampled K")
    off_k = report.add("B_positive_off_K", "B(x) > 0 on sampled (C u D u G(D)) outside K")
    for x, k, c, d in zip(ctx.points, ctx.in_k, ctx.in_c, ctx.in_d):
        b = cert(x)
        if k:
            on_k.record(x, b, b)
        elif c or d:
            off_k.record(x, -b, strict=True)
        if d:
            for z in ctx.system.jumps(x):
                if ctx.system.in_space(z) and not ctx.props.holds(p, z):
                    off_k.record(z, -cert(z), strict=True)


def _near_boundary(ctx: _Ctx, p: str, x: Sequence[float]) -> bool:
    radius = ctx.sampler.boundary_radius
    margin = ctx.props.get(p).margin
    if margin is not None:
        try:
            m = margin(x)
        except ArithmeticError:
            m = math.inf
        if 0 < m <= radius:
            return True
    for i in range(len(x)):
        for s in (radius, -radius):
            y = list(x)
            y[i] += s
            if ctx.system.in_space(y) and ctx.props.holds(p, y):
                return True
    return False


def certify_always(system: HybridSystem, p: str, cert: ScalarCertificate, sampler: Sampler,
                   props: PropositionSet) -> CertificateReport:
    """Invariance of K through a barrier function (flow band, jumps from K,
    and viability of jumps from K)."""
    ctx = _Ctx(system, sampler, props, p, None)
    report = _report("always", ctx, boundary_radius=sampler.boundary_radius)
    _barrier_candidate(report, ctx, cert, p)
    band = report.add("flow_band", "<grad B(x), eta> <= 0 for x in C near the boundary of K "
                      "and outside K, for flow directions tangent to C")
    jump_k = report.add("jump_from_K", "B(g) <= 0 for every jump g from D inside K")
    viable = report.add("jump_viable", "every jump from D inside K lands in C or D")
    h = sampler.probe_step
    for x, k, c, d in zip(ctx.points, ctx.in_k, ctx.in_c, ctx.in_d):
        if c and not k and _near_boundary(ctx, p, x):
            g = cert.grad(x)
            for eta in system.flows(x):
                if not system.in_flow([a + h * b for a, b in zip(x, eta)]):
                    continue
                rate = sum(a * b for a, b in zip(g, eta))
                band.record(x, rate, max(abs(a * b) for a, b in zip(g, eta)))
        if d and k:
            for z in system.jumps(x):
                bz = cert(z)
                jump_k.record(x, bz, bz)
                viable.record(x, 0.0 if (system.in_flow(z) or system.in_jump(z)) else 1.0)
    report.assumptions.append(_K_CLOSED)
    report.notes.append("flow directions count as tangent to C when an Euler probe of "
                        f"length {h} stays in C")
    return report


# eventually checks --------------------------------------------------------


def certify_eventually_flow(system: HybridSystem, p: str, cert: ScalarCertificate,
                            c1: float, c2: float, sampler: Sampler, props: PropositionSet,
                            region: Pred | None = None) -> CertificateReport:
    """Finite-time attractivity of K through flows: ``u_C + c1 V^c2 <= 0`` on
    C outside K and ``u_D <= 0`` on D outside K, both inside N."""
    _flow_params(c1, c2)
    ctx = _Ctx(system, sampler, props, p, region)
    report = _report("eventually_flow", ctx, c1=c1, c2=c2)
    _positive_definite(report, ctx, cert)
    flow = report.add("flow_decrease", "u_C(x) + c1 V(x)^c2 <= 0 on (C n N) outside K")
    jump = report.add("jump_nonincrease", "u_D(x) <= 0 on (D n N) outside K")
    for x, n, k, c, d in zip(ctx.points, ctx.in_n, ctx.in_k, ctx.in_c, ctx.in_d):
        if not n or k:
            continue
        if c:
            uc = u_c(system, cert, x)
            term = c1 * max(cert(x), 0.0) ** c2
            flow.record(x, uc + term, max(abs(uc), term))
        if d:
            jump.record(x, u_d(system, cert, x), cert(x))
    _region_invariance(report, ctx)
    report.assumptions += [_HORIZON_FLOW, _K_CLOSED, _N_OPEN]
    return report


def certify_eventually_jump(system: HybridSystem, p: str, cert: ScalarCertificate, c: float,
                            sampler: Sampler, props: PropositionSet, region: Pred | None = None,
                            nonstrict_jump: bool = False, r: float | None = None) -> CertificateReport:
    """Finite-time attractivity of K through jumps: ``u_C <= 0`` on C outside
    K and ``u_D <= -min(c, V)`` on D outside K, both inside N.

    With ``nonstrict_jump`` the jump condition relaxes to ``u_D <= 0``, the
    hypothesis used for attractivity from a sublevel set; ``r`` then adds the
    check that jumps from D inside K stay in ``{V <= r}`` and in C or D.
    """
    if not c > 0:
        raise BadParameters("c must be positive")
    ctx = _Ctx(system, sampler, props, p, region)
    report = _report("eventually_jump", ctx, c=c, r=r, nonstrict_jump=nonstrict_jump)
    _positive_definite(report, ctx, cert)
    flow = report.add("flow_nonincrease", "u_C(x) <= 0 on (C n N) outside K")
    if nonstrict_jump:
        jump = report.add("jump_nonincrease", "u_D(x) <= 0 on (D n N) outside K")
    else:
        jump = report.add("jump_decrease", "u_D(x) <= -min(c, V(x)) on (D n N) outside K")
    for x, n, k, cc, d in zip(ctx.points, ctx.in_n, ctx.in_k, ctx.in_c, ctx.in_d):
        if not n or k:
            continue
        if cc:
            flow.record(x, u_c(system, cert, x), 1.0)
        if d:
            ud = u_d(system, cert, x)
            v = cert(x)
            bound = 0.0 if nonstrict_jump else -min(c, v)
            jump.record(x, ud - bound, max(abs(ud), abs(bound)))
    if r is not None:
        land = report.add("jump_from_K_in_sublevel",
                          "jumps from D inside K land in {V <= r} and in C or D")
        for x, k, d in zip(ctx.points, ctx.in_k, ctx.in_d):
            if k and d:
                for z in system.jumps(x):
                    ok = cert(z) <= r and (system.in_flow(z) or system.in_jump(z))
                    land.record(x, 0.0 if ok else 1.0)
    _region_invariance(report, ctx)
    report.assumptions += [_HORIZON_JUMP, _K_CLOSED, _N_OPEN]
    if nonstrict_jump:
        report.assumptions.append("every maximal solution from the sublevel set is complete")
    return report


def certify_eventually_combined(system: HybridSystem, p: str, cert: ScalarCertificate,
                                c1: float, c2: float, c3: float, sampler: Sampler,
                                props: PropositionSet, region: Pred | None = None) -> CertificateReport:
    """Strict decrease along both flows and jumps outside K."""
    _flow_params(c1, c2)
    if not c3 > 0:
        raise BadParameters("c3 must be positive")
    ctx = _Ctx(system, sampler, props, p, region)
    report = _report("eventually_combined", ctx, c1=c1, c2=c2, c3=c3)
    _positive_definite(report, ctx, cert)
    flow = report.add("flow_decrease", "u_C(x) <= -c1 V(x)^c2 on (C n N) outside K")
    jump = report.add("jump_decrease", "u_D(x) <= -min(c3, V(x)) on (D n N) outside K")
    for x, n, k, c, d in zip(ctx.points, ctx.in_n, ctx.in_k, ctx.in_c, ctx.in_d):
        if not n or k:
            continue
        v = cert(x)
        if c:
            uc = u_c(system, cert, x)
            term = c1 * max(v, 0.0) ** c2
            flow.record(x, uc + term, max(abs(uc), term))
        if d:
            ud = u_d(system, cert, x)
            bound = -min(c3, v)
            jump.record(x, ud - bound, max(abs(ud), abs(bound)))
    _region_invariance(report, ctx)
    report.assumptions += [_HORIZON_FLOW, _K_CLOSED, _N_OPEN]
    return report


# next ---------------------------------------------------------------------


def certify_next(system: HybridSystem, p: str, sampler: Sampler, props: PropositionSet,
                 probe: float = 1e-10) -> CertificateReport:
    """Conditions under which every solution jumps at once and lands in K:
    no flow is possible, jumps land in K and in D, and C lies in D."""
    ctx = _Ctx(system, sampler, props, p, None)
    report = _report("next", ctx, probe=probe)
    no_flow = report.add("no_flow", "Euler probes x + h eta from sampled C leave C")
    lands = report.add("jump_lands_in_K_and_D", "every jump g from sampled D has p(g) and g in D")
    covers = report.add("C_inside_D", "sampled points of C lie in D")
    for x, c, d in zip(ctx.points, ctx.in_c, ctx.in_d):
        if c:
            for eta in system.flows(x):
                y = [a + probe * b for a, b in zip(x, eta)]
                no_flow.record(x, 1.0 if system.in_flow(y) else 0.0)
            covers.record(x, 0.0 if system.in_jump(x) else 1.0)
        if d:
            for z in system.jumps(x):
                ok = props.holds(p, z) and system.in_jump(z)
                lands.record(x, 0.0 if ok else 1.0)
    report.notes.append("every solution starting in C or D has a jump: follows from no_flow "
                        "and C_inside_D")
    return report


# until --------------------------------------------------------------------


def check_weak_until_cover(p: str, q: str, sampler: Sampler, props: PropositionSet,
                           state_space: Pred | None = None) -> CertificateReport:
    pts = [x for x in sampler.points() if state_space is None or state_space(x)]
    report = CertificateReport("weak_until_cover", samples=len(pts),
                               parameters={"sampler": sampler.to_dict()})
    cover = report.add("p_or_q", "every sampled state satisfies p or q")
    for x in pts:
        cover.record(x, 0.0 if (props.holds(p, x) or props.holds(q, x)) else 1.0)
    return report


def certify_until_strong(system: HybridSystem, p: str, q: str, cert: ScalarCertificate,
                         params: dict[str, float], sampler: Sampler, props: PropositionSet,
                         region: Pred | None = None, r: float = math.inf,
                         check_jump_landing: bool = True) -> CertificateReport:
    """``params`` holds ``c1, c2`` (reach Q by flows) or ``c`` (by jumps)."""
    if "c1" in params:
        sub = certify_eventually_flow(system, q, cert, params["c1"], params["c2"], sampler,
                                      props, region)
    elif "c" in params:
        sub = certify_eventually_jump(system, q, cert, params["c"], sampler, props, region)
    else:
        raise BadParameters("until needs flow parameters c1, c2 or the jump parameter c")
    ctx = _Ctx(system, sampler, props, q, region)
    report = _report("until_strong", ctx, r=r, **params)
    nonempty = report.add("Q_nonempty", "some sampled state satisfies q")
    hits = sum(ctx.in_k)
    nonempty.record((), 0.0 if hits else 1.0)
    report.merge(sub, prefix="reach_Q.")
    cover = report.add("sublevel_outside_Q_in_P",
                       "sampled {V <= r} in C or D and outside Q satisfies p")
    for x, k, c, d in zip(ctx.points, ctx.in_k, ctx.in_c, ctx.in_d):
        if (c or d) and not k and cert(x) <= r:
            cover.record(x, 0.0 if props.holds(p, x) else 1.0)
    if check_jump_landing:
        land = report.add("jumps_from_Q_stay",
                          "jumps from D inside Q land in {V <= r} and in C or D")
        for x, k, d in zip(ctx.points, ctx.in_k, ctx.in_d):
            if k and d:
                for z in system.jumps(x):
                    ok = cert(z) <= r and (system.in_flow(z) or system.in_jump(z))
                    land.record(x, 0.0 if ok else 1.0)
    report.assumptions.append("Q is closed")
    report.assumptions.append("initial conditions lie in (P n {V <= r}) u Q")
    return report


# combinations -------------------------------------------------------------


def certify_eventually_always(system: HybridSystem, p: str, sampler: Sampler,
                              props: PropositionSet, mode: str, *,
                              barrier: ScalarCertificate | None = None,
                              lyapunov: ScalarCertificate,
                              c1: float | None = None, c2: float | None = None,
                              c: float | None = None,
                              region: Pred | None = None) -> CertificateReport:
    """Mode ``"A"``: a barrier function for invariance of K plus a Lyapunov
    function for reaching K (flow parameters ``c1, c2`` or jump parameter
    ``c``). Mode ``"B"``: one Lyapunov function whose decrease conditions
    hold on all of C and D inside N, K included."""
    if mode == "A":
        if barrier is None:
            raise BadParameters("mode A needs a barrier certificate")
        ctx = _Ctx(system, sampler, props, p, region)
        report = _report("eventually_always", ctx, mode="A", c1=c1, c2=c2, c=c)
        report.merge(certify_always(system, p, barrier, sampler, props), prefix="always.")
        if c1 is not None:
            sub = certify_eventually_flow(system, p, lyapunov, c1, c2, sampler, props, region)
        elif c is not None:
            sub = certify_eventually_jump(system, p, lyapunov, c, sampler, props, region)
        else:
            raise BadParameters("mode A needs c1, c2 or c")
        report.merge(sub, prefix="eventually.")
        return report
    if mode != "B":
        raise BadParameters(f"unknown mode {mode!r}")
    _flow_params(c1, c2)
    if c is None or not c > 0:
        raise BadParameters("mode B needs c > 0")
    ctx = _Ctx(system, sampler, props, p, region)
    report = _report("eventually_always", ctx, mode="B", c1=c1, c2=c2, c=c)
    _positive_definite(report, ctx, lyapunov)
    flow = report.add("flow_decrease_all", "u_C(x) + c1 V(x)^c2 <= 0 on C n N")
    jump = report.add("jump_decrease_all", "u_D(x) <= -min(c, V(x)) on D n N")
    for x, n, cc, d in zip(ctx.points, ctx.in_n, ctx.in_c, ctx.in_d):
        if not n:
            continue
        v = lyapunov(x)
        if cc:
            uc = u_c(system, lyapunov, x)
            term = c1 * max(v, 0.0) ** c2
            flow.record(x, uc + term, max(abs(uc), term))
        if d:
            ud = u_d(system, lyapunov, x)
            bound = -min(c, v)
            jump.record(x, ud - bound, max(abs(ud), abs(bound)))
    _region_invariance(report, ctx)
    report.assumptions += [_HORIZON_FLOW, _K_CLOSED, _N_OPEN]
    return report


def points_in(points: Iterable[Sequence[float]], pred: Pred) -> list[State]:
    return [tuple(x) for x in points if pred(x)]
