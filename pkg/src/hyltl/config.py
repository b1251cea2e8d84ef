"""System configuration documents and the built-in example registry.

A configuration is a JSON object::

    {
      "name": "bouncing_ball",
      "dim": 2,
      "constants": {"g": 1, "lam": 0.5},
      "state_space": "true",
      "flow_set": "x1 >= 0",
      "jump_set": "x1 == 0 and x2 <= 0",
      "flow_selections": [["x2", "-g"]],
      "jump_selections": [["0", "-lam*x2"]],
      "propositions": {"x2_le_0": "x2 <= 0",
                       "p": {"expr": "...", "margin": "..."}},
      "certificates": {"V": {"expr": "abs(x2)", "gradient": ["0", "sgn(x2)"],
                             "role": "lyapunov", "nonsmooth": true,
                             "prop": "x2_le_0", "params": {"c1": "g", "c2": 0}}},
      "region": "optional boolean expression for the neighborhood N",
      "sampler": {"bounds": [[0, 2], [-3, 3]], "counts": [100, 100]}
    }

Constants may be numbers or expressions over earlier constants. Parameter
values may be numbers or expressions over the constants. Propositions
without an explicit margin get one derived from their comparisons when
possible.
"""

from __future__ import annotations

import copy
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from .certificates import BadParameters, CertificateError, Sampler, ScalarCertificate, check_gradient
from .expr import (
    BOOL, NUM, ExprError, ExprTypeError, UnboundVariable, Var, compile_expression,
    margin_expression, parse_expression, variables,
)
from .hybrid import HybridError, HybridSystem, PropositionSet


class ConfigError(HybridError):
    pass


def _parse(text: Any, want: str, dim: int, constants: Mapping[str, float], what: str):
    if isinstance(text, bool):
        text = "true" if text else "false"
    if isinstance(text, (int, float)):
        text = repr(float(text)) if not float(text).is_integer() else str(int(text))
    if not isinstance(text, str):
        raise ConfigError(f"{what}: expected an expression string, got {text!r}")
    try:
        node = parse_expression(text)
    except ExprError as exc:
        raise ConfigError(f"{what}: {exc}") from None
    if node.type != want:
        raise ConfigError(f"{what}: expected a {want} expression, got {node.type}")
    for name in variables(node):
        idx = Var(name).index
        if idx is not None and idx < dim:
            continue
        if name not in constants:
            raise ConfigError(f"{what}: unbound name {name!r}")
    return node


def eval_constant(text: Any, constants: Mapping[str, float], what: str = "value") -> float:
    if isinstance(text, bool):
        raise ConfigError(f"{what}: expected a number")
    if isinstance(text, (int, float)):
        return float(text)
    if isinstance(text, str) and text.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    node = _parse(text, NUM, 0, constants, what)
    try:
        return float(compile_expression(node, 0, constants)(()))
    except ExprError as exc:
        raise ConfigError(f"{what}: {exc}") from None


@dataclass
class CertificateSpec:
    cert: ScalarCertificate
    prop: str | None
    params: dict[str, float]
    barrier: str | None = None


@dataclass
class SystemConfig:
    """A parsed configuration: the hybrid system plus its propositions,
    certificates, sampler defaults and optional neighborhood N."""

    name: str
    dim: int
    constants: dict[str, float]
    system: HybridSystem
    props: PropositionSet
    certificates: dict[str, CertificateSpec]
    sampler: Sampler | None
    region: Callable[[Sequence[float]], bool] | None
    raw: dict[str, Any] = field(repr=False, default_factory=dict)

    def with_constants(self, overrides: Mapping[str, Any]) -> SystemConfig:
        raw = copy.deepcopy(self.raw)
        consts = raw.setdefault("constants", {})
        for k, v in overrides.items():
            if k not in consts:
                raise ConfigError(f"unknown constant {k!r}")
            consts[k] = v
        return load_config(raw)

    def trace_meta(self) -> dict[str, Any]:
        return {
            "system": self.name,
            "constants": dict(self.constants),
            "propositions": {n: self.props.get(n).source for n in self.props},
        }


def load_config(data: Mapping[str, Any], check_gradients: bool = True) -> SystemConfig:
    raw = copy.deepcopy(dict(data))
    try:
        name = str(raw.get("name", "system"))
        dim = int(raw["dim"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("config needs an integer 'dim'") from None
    if dim < 1:
        raise ConfigError("dim must be positive")
    constants: dict[str, float] = {}
    for k, v in (raw.get("constants") or {}).items():
        if Var(k).index is not None:
            raise ConfigError(f"constant name {k!r} clashes with a state coordinate")
        constants[k] = eval_constant(v, constants, f"constant {k}")

    def boolean(key: str, default: str) -> tuple[Callable, Callable | None]:
        node = _parse(raw.get(key, default), BOOL, dim, constants, key)
        pred = compile_expression(node, dim, constants)
        m = margin_expression(node)
        return pred, (compile_expression(m, dim, constants) if m is not None else None)

    flow_set, flow_margin = boolean("flow_set", "false")
    jump_set, jump_margin = boolean("jump_set", "false")
    space, space_margin = boolean("state_space", "true")

    def selections(key: str) -> tuple[Callable, ...]:
        out = []
        for i, sel in enumerate(raw.get(key) or []):
            if len(sel) != dim:
                raise ConfigError(f"{key}[{i}] needs {dim} components")
            fs = [compile_expression(_parse(e, NUM, dim, constants, f"{key}[{i}]"), dim, constants)
                  for e in sel]
            out.append(lambda x, fs=fs: tuple(f(x) for f in fs))
        return tuple(out)

    try:
        system = HybridSystem(
            dim=dim, flow_set=flow_set, jump_set=jump_set,
            flow_selections=selections("flow_selections"),
            jump_selections=selections("jump_selections"),
            state_space=space, flow_margin=flow_margin, jump_margin=jump_margin,
            state_margin=space_margin, name=name,
        )
    except HybridError as exc:
        raise ConfigError(str(exc)) from None

    props = build_propositions(raw.get("propositions") or {}, dim, constants)

    region = None
    if raw.get("region") is not None:
        region = compile_expression(_parse(raw["region"], BOOL, dim, constants, "region"),
                                    dim, constants)

    sampler = None
    if raw.get("sampler"):
        s = raw["sampler"]
        try:
            sampler = Sampler(
                bounds=tuple(tuple(b) for b in s["bounds"]),
                mode=s.get("mode", "grid"),
                counts=tuple(s["counts"]) if s.get("counts") else None,
                budget=int(s.get("budget", 10_000)),
                seed=int(s.get("seed", 0)),
                boundary_radius=float(s.get("boundary_radius", 0.05)),
                probe_step=float(s.get("probe_step", 1e-6)),
            )
        except (KeyError, TypeError, BadParameters) as exc:
            raise ConfigError(f"sampler: {exc}") from None

    certs: dict[str, CertificateSpec] = {}
    for cname, c in (raw.get("certificates") or {}).items():
        what = f"certificate {cname}"
        node = _parse(c["expr"], NUM, dim, constants, what)
        grad = None
        if c.get("gradient"):
            if len(c["gradient"]) != dim:
                raise ConfigError(f"{what}: gradient needs {dim} components")
            gs = [compile_expression(_parse(e, NUM, dim, constants, f"{what} gradient"), dim,
                                     constants) for e in c["gradient"]]
            grad = lambda x, gs=gs: [g(x) for g in gs]  # noqa: E731
        try:
            cert = ScalarCertificate(
                func=compile_expression(node, dim, constants), gradient=grad,
                role=c.get("role", "lyapunov"), nonsmooth=bool(c.get("nonsmooth", False)),
                name=cname, source=str(node),
            )
        except CertificateError as exc:
            raise ConfigError(f"{what}: {exc}") from None
        if check_gradients and grad is not None and sampler is not None:
            bad = check_gradient(cert, sampler.bounds, n=100, seed=sampler.seed)
            if bad:
                x, i, a, b = bad[0]
                raise ConfigError(f"{what}: gradient component {i + 1} is {a} at {x}, "
                                  f"finite differences give {b}")
        params = {k: eval_constant(v, constants, f"{what} parameter {k}")
                  for k, v in (c.get("params") or {}).items()}
        prop = c.get("prop")
        if prop is not None and prop not in props:
            raise ConfigError(f"{what}: unknown proposition {prop!r}")
        certs[cname] = CertificateSpec(cert, prop, params, c.get("barrier"))

    return SystemConfig(name, dim, constants, system, props, certs, sampler, region, raw)


def build_propositions(spec: Mapping[str, Any], dim: int,
                       constants: Mapping[str, float]) -> PropositionSet:
    props = PropositionSet()
    for pname, p in spec.items():
        if isinstance(p, Mapping):
            text, mtext = p["expr"], p.get("margin")
        else:
            text, mtext = p, None
        node = _parse(text, BOOL, dim, constants, f"proposition {pname}")
        if mtext is not None:
            mnode = _parse(mtext, NUM, dim, constants, f"proposition {pname} margin")
        else:
            mnode = margin_expression(node)
        pred = compile_expression(node, dim, constants)
        margin = compile_expression(mnode, dim, constants) if mnode is not None else None
        props.add(pname, pred, margin, str(node))
    return props


def propositions_from_meta(meta: Mapping[str, Any], dim: int) -> PropositionSet:
    try:
        return build_propositions(meta.get("propositions") or {}, dim, meta.get("constants") or {})
    except (ExprTypeError, UnboundVariable) as exc:
        raise ConfigError(str(exc)) from None


def read_config(path: str) -> SystemConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return load_config(data)


def resolve_system(name_or_path: str) -> SystemConfig:
    reg = BUILTINS
    if name_or_path in reg:
        return load_config(reg[name_or_path])
    if os.path.exists(name_or_path):
        return read_config(name_or_path)
    raise ConfigError(f"unknown system {name_or_path!r} (not a built-in and not a file); "
                      f"built-ins: {', '.join(sorted(reg))}")


# built-in examples ------------------------------------------------------------

BUILTINS: dict[str, dict[str, Any]] = {
    "bouncing_ball": {
        "name": "bouncing_ball",
        "dim": 2,
        "constants": {"g": 1, "lam": 0.5},
        "state_space": "true",
        "flow_set": "x1 >= 0",
        "jump_set": "x1 == 0 and x2 <= 0",
        "flow_selections": [["x2", "-g"]],
        "jump_selections": [["0", "-lam*x2"]],
        "propositions": {
            "p_energy": "x1 >= 0 and 2*g*x1 + (x2 - 1)*(x2 + 1) <= 0",
            "x2_le_0": "x2 <= 0",
            "x2_ge_0": "x2 >= 0",
            "x2_le_m1": "x2 <= -1",
        },
        "certificates": {
            "B": {"expr": "2*g*x1 + (x2 - 1)*(x2 + 1)", "gradient": ["2*g", "2*x2"],
                  "role": "barrier", "prop": "p_energy"},
            "V": {"expr": "abs(x2)", "gradient": ["0", "sgn(x2)"], "role": "lyapunov",
                  "nonsmooth": True, "prop": "x2_le_0", "params": {"c1": "g", "c2": 0}},
        },
        "sampler": {"bounds": [[0, 2], [-3, 3]], "counts": [100, 100]},
    },
    "timer": {
        "name": "timer",
        "dim": 2,
        "constants": {"T": 1},
        "state_space": "x1 >= 0 and (x2 == 0 or x2 == 1)",
        "flow_set": "x1 >= 0 and x1 <= T",
        "jump_set": "x1 >= T",
        "flow_selections": [["1", "0"]],
        "jump_selections": [["0", "1 - x2"]],
        "propositions": {
            "p_timer": "x1 >= 0 and x1 <= T",
            "tau_le_0": "x1 <= 0",
        },
        "certificates": {
            "B": {"expr": "x1 - T", "gradient": ["1", "0"], "role": "barrier",
                  "prop": "p_timer"},
        },
        "sampler": {"bounds": [[0, 2], [0, 1]], "counts": [101, 2]},
    },
    "fta_scalar": {
        "name": "fta_scalar",
        "dim": 2,
        "constants": {"k": 1, "alpha": 0.5},
        "state_space": "true",
        "flow_set": "x2 >= 0 and x2 <= 1",
        "jump_set": "x2 == 1",
        "flow_selections": [["-k*abs(x1)^alpha*sgn(x1)", "1"]],
        "jump_selections": [["-x1", "0"]],
        "propositions": {"z_zero": "x1 == 0"},
        "certificates": {
            "V": {"expr": "0.5*x1^2", "gradient": ["x1", "0"], "role": "lyapunov",
                  "prop": "z_zero",
                  "params": {"c1": "2^((1 + alpha)/2)*k", "c2": "(1 + alpha)/2", "c": 0.1}},
            "Bz": {"expr": "x1^2", "gradient": ["2*x1", "0"], "role": "barrier",
                   "prop": "z_zero"},
        },
        "sampler": {"bounds": [[-2, 2], [0, 1]], "counts": [101, 11]},
    },
    "firefly": {
        "name": "firefly",
        "dim": 2,
        "constants": {"gam": 1, "eps": 0.2, "kf": "eps/(2 + eps)", "m": 0.4},
        "state_space": "true",
        "flow_set": "x1 >= 0 and x1 <= 1 and x2 >= 0 and x2 <= 1",
        "jump_set": "x1 >= 0 and x1 <= 1 and x2 >= 0 and x2 <= 1 and max(x1, x2) == 1",
        "flow_selections": [["gam", "gam"]],
        "jump_selections": [
            ["ite((1 + eps)*x1 < 1, (1 + eps)*x1, 0)", "ite((1 + eps)*x2 < 1, (1 + eps)*x2, 0)"],
            ["ite((1 + eps)*x1 <= 1, (1 + eps)*x1, 0)", "ite((1 + eps)*x2 <= 1, (1 + eps)*x2, 0)"],
        ],
        "propositions": {
            "sync": {"expr": "x1 >= 0 and x1 <= 1 and x2 >= 0 and x2 <= 1 and x1 == x2",
                     "margin": "abs(x1 - x2)"},
        },
        "certificates": {
            "V": {"expr": "min(abs(x1 - x2), 1 + kf - abs(x1 - x2))", "role": "lyapunov",
                  "nonsmooth": True, "prop": "sync", "params": {"c": 0.1}},
        },
        "region": "min(abs(x1 - x2), 1 + kf - abs(x1 - x2)) < m",
        "sampler": {"bounds": [[0, 1], [0, 1]], "counts": [51, 51]},
    },
    "sgn_jump": {
        "name": "sgn_jump",
        "dim": 1,
        "constants": {},
        "state_space": "true",
        "flow_set": "false",
        "jump_set": "true",
        "flow_selections": [],
        "jump_selections": [["sgn(x1)"]],
        "propositions": {"p_unit": "abs(x1) == 1", "p_one": "x1 == 1"},
        "certificates": {},
        "sampler": {"bounds": [[-2, 2]], "counts": [41]},
    },
}


def builtin_examples() -> dict[str, SystemConfig]:
    return {name: load_config(data) for name, data in BUILTINS.items()}
