"""Command-line front end.

Exit codes: 0 success or property true, 1 usage or data error, 2 property
false or certificate violated.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

from . import automata, certificates as certs
from .config import (
    BUILTINS, ConfigError, SystemConfig, eval_constant, propositions_from_meta, resolve_system,
)
from .expr import ExprError, ExprSyntaxError
from .hybrid import HybridError, read_trace, write_csv, write_trace
from .ltl import FormulaSyntaxError, check as check_formula, parse_formula
from .simulate import SimOptions, simulate

EXIT_OK, EXIT_ERROR, EXIT_FALSE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 by default
        raise UsageError(message)


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _point(text: str) -> tuple[float, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"--at expects t,j, got {text!r}")
    try:
        return float(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"--at expects t,j, got {text!r}") from None


def _overrides(items: Sequence[str] | None) -> dict[str, str]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--set expects name=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _load(args) -> SystemConfig:
    cfg = resolve_system(args.system)
    over = _overrides(getattr(args, "set", None))
    return cfg.with_constants(over) if over else cfg


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hyltl", description="Simulate hybrid systems, check LTL formulas on "
                "their traces, and check sampled certificate conditions.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("simulate", help="simulate a system and write a trace")
    s.add_argument("--system", required=True, help="built-in name or config file")
    s.add_argument("--x0", required=True, help="initial state, comma separated")
    s.add_argument("--tmax", type=float, default=10.0)
    s.add_argument("--jmax", type=int, default=100)
    s.add_argument("--step", type=float, default=1e-3)
    s.add_argument("--event-tol", type=float, default=1e-10)
    s.add_argument("--zeno-gap", type=float, default=1e-9)
    s.add_argument("--zeno-run", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--priority", choices=["jump_first", "flow_first", "random"],
                   default="jump_first")
    s.add_argument("--selection", choices=["first", "random"], default="first")
    s.add_argument("--set", action="append", metavar="NAME=VALUE", help="override a constant")
    s.add_argument("--out", help="trace file to write")
    s.add_argument("--csv", help="also write the samples as CSV")

    c = sub.add_parser("check", help="evaluate a formula on a trace")
    c.add_argument("--trace", required=True)
    c.add_argument("--formula", required=True)
    where = c.add_mutually_exclusive_group()
    where.add_argument("--at", help="sample point t,j (default 0,0)")
    where.add_argument("--all", action="store_true", help="check at every sample")
    c.add_argument("--system", help="take propositions from this system instead of the trace")
    c.add_argument("--tol", type=float, help="margin slack for propositions")
    c.add_argument("--json", action="store_true", help="print the verdict as JSON")

    k = sub.add_parser("certify", help="check sampled certificate conditions")
    k.add_argument("kind", choices=["always", "barrier", "eventually", "next", "until",
                                    "weak-until", "eventually-always"])
    k.add_argument("--system", required=True)
    k.add_argument("--cert", help="certificate name in the system config")
    k.add_argument("--barrier", help="barrier certificate for eventually-always mode A")
    k.add_argument("--prop", help="proposition p (defaults to the certificate's)")
    k.add_argument("--q", help="proposition q for until checks")
    k.add_argument("--mode", choices=["flow", "jump", "combined", "A", "B"])
    for name in ("c", "c1", "c2", "c3", "r"):
        k.add_argument(f"--{name}", help="number or expression over the constants")
    k.add_argument("--nonstrict-jump", action="store_true")
    k.add_argument("--no-region", action="store_true", help="ignore the config's region N")
    k.add_argument("--bounds", help="sampler box as lo:hi,lo:hi,...")
    k.add_argument("--counts", help="grid counts per coordinate, comma separated")
    k.add_argument("--sampler-mode", choices=["grid", "random"])
    k.add_argument("--budget", type=int)
    k.add_argument("--seed", type=int)
    k.add_argument("--radius", type=float, help="boundary band width")
    k.add_argument("--set", action="append", metavar="NAME=VALUE")
    k.add_argument("--out", help="write the report as JSON")
    k.add_argument("--json", action="store_true", help="print the report as JSON")

    a = sub.add_parser("automaton", help="build the automaton of a co-safe formula")
    a.add_argument("--formula", required=True)
    a.add_argument("--run", help="observation word, comma separated")
    a.add_argument("--out", help="write the automaton as JSON")
    a.add_argument("--dot", help="write a graph description")

    e = sub.add_parser("export", help="convert a trace to CSV")
    e.add_argument("--trace", required=True)
    e.add_argument("--csv", required=True)

    sub.add_parser("list", help="list built-in systems")
    return p


def cmd_simulate(args) -> int:
    cfg = _load(args)
    x0 = _floats(args.x0, "--x0")
    if len(x0) != cfg.dim:
        raise UsageError(f"--x0 needs {cfg.dim} values for {cfg.name}")
    opts = SimOptions(t_max=args.tmax, j_max=args.jmax, step=args.step, event_tol=args.event_tol,
                      zeno_gap=args.zeno_gap, zeno_run=args.zeno_run, priority=args.priority,
                      seed=args.seed, selection_policy=args.selection)
    res = simulate(cfg.system, x0, opts)
    meta = cfg.trace_meta()
    meta.update({"termination": res.termination, "x0": x0,
                 "options": {k: getattr(opts, k) for k in opts.__dataclass_fields__},
                 "jump_log": [{"t": r.t, "j": r.j, "x_pre": list(r.x_pre),
                               "x_post": list(r.x_post), "selection": r.selection}
                              for r in res.jump_log]})
    if args.out:
        write_trace(args.out, res.arc, meta)
    if args.csv:
        write_csv(args.csv, res.arc)
    t, j, x = res.arc.final
    print(f"system: {cfg.name}")
    print(f"termination: {res.termination}")
    print(f"samples: {len(res.arc)}, jumps: {len(res.jump_log)}")
    for r in res.jump_log[:5]:
        print(f"jump {r.j}: t={r.t:.10g} x_pre={_fmt(r.x_pre)} x_post={_fmt(r.x_post)}")
    if len(res.jump_log) > 5:
        print(f"... {len(res.jump_log) - 5} more jumps")
    print(f"final: t={t:.10g} j={j} x={_fmt(x)}")
    return EXIT_OK


def _fmt(x) -> str:
    return "(" + ", ".join(f"{v:.10g}" for v in x) + ")"


def cmd_check(args) -> int:
    f = parse_formula(args.formula)
    arc, meta = read_trace(args.trace)
    if args.system:
        props = _load(args).props
    else:
        props = propositions_from_meta(meta, arc.dim)
    at = None if args.all else (_point(args.at) if args.at else (0.0, 0))
    verdict = check_formula(f, arc, props, at, tol=args.tol)
    print(json.dumps(verdict.to_dict(), indent=1) if args.json else verdict.summary())
    return EXIT_OK if verdict.value else EXIT_FALSE


def _sampler(args, cfg: SystemConfig) -> certs.Sampler:
    base = cfg.sampler
    bounds = base.bounds if base else None
    if args.bounds:
        try:
            bounds = tuple(tuple(float(v) for v in b.split(":")) for b in args.bounds.split(","))
        except ValueError:
            raise UsageError("--bounds expects lo:hi,lo:hi,...") from None
    if bounds is None:
        raise UsageError(f"{cfg.name} has no sampler defaults; pass --bounds")
    counts = base.counts if base and not args.bounds else None
    if args.counts:
        counts = tuple(int(v) for v in _floats(args.counts, "--counts"))
    return certs.Sampler(
        bounds=bounds,
        mode=args.sampler_mode or (base.mode if base else "grid"),
        counts=counts,
        budget=args.budget or (base.budget if base else 10_000),
        seed=args.seed if args.seed is not None else (base.seed if base else 0),
        boundary_radius=args.radius if args.radius is not None else
        (base.boundary_radius if base else 0.05),
        probe_step=base.probe_step if base else 1e-6,
    )


def cmd_certify(args) -> int:
    cfg = _load(args)
    sampler = _sampler(args, cfg)
    spec = None
    if args.cert:
        if args.cert not in cfg.certificates:
            raise UsageError(f"{cfg.name} has no certificate {args.cert!r}; "
                             f"available: {', '.join(cfg.certificates) or 'none'}")
        spec = cfg.certificates[args.cert]
    params = dict(spec.params) if spec else {}
    given = {}
    for name in ("c", "c1", "c2", "c3", "r"):
        v = getattr(args, name)
        if v is not None:
            given[name] = eval_constant(v, cfg.constants, f"--{name}")
    params.update(given)
    p = args.prop or (spec.prop if spec else None)
    region = None if args.no_region else cfg.region

    def need_cert():
        if spec is None:
            raise UsageError(f"certify {args.kind} needs --cert")
        return spec.cert

    def need(name):
        if name not in params:
            raise UsageError(f"missing parameter --{name}")
        return params[name]

    if p is None and args.kind not in ("weak-until",):
        raise UsageError("no proposition: pass --prop")
    kind = args.kind
    if kind == "barrier":
        report = certs.check_barrier_candidate(need_cert(), p, cfg.system, sampler, cfg.props)
    elif kind == "always":
        report = certs.certify_always(cfg.system, p, need_cert(), sampler, cfg.props)
    elif kind == "eventually":
        mode = args.mode or ("combined" if "c3" in given else
                             "jump" if "c" in given and "c1" not in given else
                             "flow" if "c1" in params else "jump")
        if mode == "flow":
            report = certs.certify_eventually_flow(cfg.system, p, need_cert(), need("c1"),
                                                   need("c2"), sampler, cfg.props, region)
        elif mode == "jump":
            report = certs.certify_eventually_jump(cfg.system, p, need_cert(), need("c"), sampler,
                                                   cfg.props, region, args.nonstrict_jump,
                                                   params.get("r"))
        elif mode == "combined":
            report = certs.certify_eventually_combined(cfg.system, p, need_cert(), need("c1"),
                                                       need("c2"), need("c3"), sampler,
                                                       cfg.props, region)
        else:
            raise UsageError(f"--mode {mode} does not apply to eventually")
    elif kind == "next":
        report = certs.certify_next(cfg.system, p, sampler, cfg.props)
    elif kind == "weak-until":
        if p is None or args.q is None:
            raise UsageError("weak-until needs --prop and --q")
        report = certs.check_weak_until_cover(p, args.q, sampler, cfg.props,
                                              cfg.system.state_space)
    elif kind == "until":
        if args.q is None:
            raise UsageError("until needs --q")
        sub = {k: params[k] for k in ("c1", "c2") if k in params}
        if args.mode == "jump" or not sub:
            sub = {"c": need("c")}
        report = certs.certify_until_strong(cfg.system, p, args.q, need_cert(), sub, sampler,
                                            cfg.props, region, params.get("r", math.inf))
    elif kind == "eventually-always":
        mode = args.mode or ("A" if args.barrier or (spec and spec.barrier) else "B")
        if mode not in ("A", "B"):
            raise UsageError("eventually-always takes --mode A or B")
        barrier = None
        if mode == "A":
            bname = args.barrier or (spec.barrier if spec else None)
            if bname not in cfg.certificates:
                raise UsageError("mode A needs --barrier naming a certificate")
            barrier = cfg.certificates[bname].cert
            flow = "c1" in params and args.mode != "jump"
            report = certs.certify_eventually_always(
                cfg.system, p, sampler, cfg.props, "A", barrier=barrier, lyapunov=need_cert(),
                c1=params.get("c1") if flow else None, c2=params.get("c2") if flow else None,
                c=None if flow else need("c"), region=region)
        else:
            report = certs.certify_eventually_always(
                cfg.system, p, sampler, cfg.props, "B", lyapunov=need_cert(), c1=need("c1"),
                c2=need("c2"), c=need("c"), region=region)
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(kind)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json() + "\n")
    print(report.to_json() if args.json else report.summary())
    return EXIT_OK if report.passed else EXIT_FALSE


def cmd_automaton(args) -> int:
    fsa = automata.build_automaton(parse_formula(args.formula))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(fsa.to_json() + "\n")
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(fsa.to_dot() + "\n")
    print(f"formula: {fsa.formula}")
    print(f"states: {', '.join(fsa.states)}; initial {fsa.initial}; "
          f"accepting {', '.join(sorted(fsa.accepting))}")
    for (s, o), t in sorted(fsa.transitions.items(),
                            key=lambda kv: (fsa.states.index(kv[0][0]),
                                            fsa.observations.index(kv[0][1]))):
        print(f"  delta({s}, {o}) = {t}")
    if fsa.sink:
        print(f"  all other pairs go to {fsa.sink}")
    if args.run is None:
        return EXIT_OK
    word = [w.strip() for w in args.run.split(",") if w.strip()]
    run, accepted = automata.run_automaton(fsa, word)
    print(f"run: {' '.join(run)}")
    print("accepted" if accepted else "rejected")
    return EXIT_OK if accepted else EXIT_FALSE


def cmd_export(args) -> int:
    arc, _ = read_trace(args.trace)
    write_csv(args.csv, arc)
    print(f"wrote {len(arc)} samples to {args.csv}")
    return EXIT_OK


def cmd_list(args) -> int:
    for name in sorted(BUILTINS):
        cfg = BUILTINS[name]
        print(f"{name}: dim {cfg['dim']}, propositions {', '.join(cfg['propositions'])}; "
              f"certificates {', '.join(cfg['certificates']) or 'none'}")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "check": cmd_check, "certify": cmd_certify,
            "automaton": cmd_automaton, "export": cmd_export, "list": cmd_list}


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"hyltl: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (HybridError, ConfigError, ExprError, FormulaSyntaxError, OSError, ValueError,
            KeyError, json.JSONDecodeError) as exc:
        print(f"hyltl: error: {exc}", file=sys.stderr)
        if isinstance(exc, (FormulaSyntaxError, ExprSyntaxError)) and exc.text:
            print(exc.caret(), file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run_cli())
