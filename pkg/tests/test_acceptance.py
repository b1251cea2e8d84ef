"""Acceptance criteria, one test each.

Every criterion function returns a one-line detail string and the list of
artifacts (trace dumps, report documents) it produced; the determinism
criterion reruns the others and compares those artifacts byte for byte.
Run ``python tests/test_acceptance.py`` for the pass/fail lines alone.
"""

import contextlib
import io
import os
import random
import time

import numpy as np
import pytest

from hyltl.automata import build_automaton, run_automaton, word_arc, words
from hyltl.certificates import (
    certify_always, certify_eventually_flow, certify_eventually_jump, certify_next,
    certify_until_strong, settling_bound, u_c, u_d,
)
from hyltl.cli import run_cli
from hyltl.config import builtin_examples, read_config
from hyltl.expr import ExprSyntaxError, parse_expression, to_text as expr_text
from hyltl.hybrid import dump_trace
from hyltl.ltl import (
    Always, Eventually, FormulaSyntaxError, Not, Or, UntilStrong, UntilWeak, direct_evaluate,
    evaluate, evaluate_all, holds_for_all_times, parse_formula, to_text,
)
from hyltl.simulate import SimOptions, measure_settling_time, simulate

from helpers import atom_props, random_arc, random_expr, random_formula

HERE = os.path.dirname(os.path.abspath(__file__))
EX = builtin_examples()


def _grid_points_in(cfg, prop, rng, n):
    pts = [x for x in cfg.sampler.points() if cfg.props.holds(prop, x)]
    return rng.sample(pts, n)


def criterion_1():
    ball = EX["bouncing_ball"]
    rep = certify_always(ball.system, "p_energy", ball.certificates["B"].cert, ball.sampler,
                         ball.props)
    assert rep.passed, rep.summary()
    assert ball.sampler.counts == (100, 100) and ball.sampler.bounds == ((0, 2), (-3, 3))
    rng = random.Random(1)
    arts = [rep.to_json()]
    for x0 in _grid_points_in(ball, "p_energy", rng, 50):
        res = simulate(ball.system, x0, SimOptions(t_max=4, j_max=20))
        assert holds_for_all_times(parse_formula("G p_energy"), res.arc, ball.props, tol=1e-6), x0
        arts.append(dump_trace(res.arc))
    return f"certify_always passed on {rep.samples} samples; G p_energy on 50 runs", arts


def criterion_2():
    fta = EX["fta_scalar"]
    c1, c2 = 2 ** 0.75, 0.75
    rep = certify_eventually_flow(fta.system, "z_zero", fta.certificates["V"].cert, c1, c2,
                                  fta.sampler, fta.props)
    assert rep.passed, rep.summary()
    res = simulate(fta.system, (1, 0), SimOptions(t_max=3))
    t, j = measure_settling_time(res.arc, fta.props, "z_zero", 1e-4)
    bound = settling_bound(0.5, "flow", c1=c1, c2=c2)
    assert abs(bound - 2.0) <= 1e-12
    assert abs(t - 2.0) <= 0.02, t
    assert t <= bound + 1e-9, (t, bound)
    return f"t*={t:.6f} (j*={j}), bound={bound:.6f}", [rep.to_json(), dump_trace(res.arc)]


def criterion_3():
    dec = read_config(os.path.join(HERE, "configs", "decrement.json"))
    res = simulate(dec.system, (2.5,), SimOptions(t_max=1, j_max=10))
    t, j = measure_settling_time(res.arc, dec.props, "zero")
    bound = settling_bound(2.5, "jump", c=1)
    assert (t, j) == (0.0, 3) and bound == 3
    assert [r.x_post[0] for r in res.jump_log[:3]] == [1.5, 0.5, 0.0]
    rep = certify_eventually_jump(dec.system, "zero", dec.certificates["V"].cert, 1.0,
                                  dec.sampler, dec.props)
    assert rep.passed
    return f"reached 0 after j*={j} jumps = ceil(2.5/1)", [dump_trace(res.arc), rep.to_json()]


def _ball_runs(n, seed):
    ball = EX["bouncing_ball"]
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        x0 = (float(rng.uniform(0, 2)), float(rng.uniform(-3, 3)))
        out.append(simulate(ball.system, x0, SimOptions(t_max=100, j_max=5)))
    return out


def criterion_4():
    ball = EX["bouncing_ball"]
    rep = certify_eventually_flow(ball.system, "x2_le_0", ball.certificates["V"].cert,
                                  ball.constants["g"], 0.0, ball.sampler, ball.props)
    assert rep.passed, rep.summary()
    f = parse_formula("F x2_le_0")
    arts = [rep.to_json()]
    for res in _ball_runs(20, 4):
        assert evaluate(f, res.arc, ball.props, (0.0, 0))
        assert holds_for_all_times(f, res.arc, ball.props)
        arts.append(dump_trace(res.arc))
    return "certify_eventually_flow passed; F x2_le_0 at every sample of 20 runs", arts


def criterion_5():
    ball = EX["bouncing_ball"]
    rep = certify_until_strong(ball.system, "x2_ge_0", "x2_le_0", ball.certificates["V"].cert,
                               {"c1": ball.constants["g"], "c2": 0.0}, ball.sampler, ball.props)
    assert rep.passed, rep.summary()
    assert rep.condition("jumps_from_Q_stay").checked > 0
    f = parse_formula("x2_ge_0 U x2_le_0")
    arts = [rep.to_json()]
    for res in _ball_runs(20, 5):
        assert holds_for_all_times(f, res.arc, ball.props)
        arts.append(dump_trace(res.arc))
    return "certify_until_strong passed incl. jump landing; p U q on 20 runs", arts


def criterion_6():
    sgn = EX["sgn_jump"]
    rep = certify_next(sgn.system, "p_unit", sgn.sampler, sgn.props)
    assert rep.passed, rep.summary()
    f = parse_formula("X p_unit")
    arts = [rep.to_json()]
    for x0 in (-0.5, 0.3, 2.0):
        res = simulate(sgn.system, (x0,), SimOptions(t_max=1, j_max=8))
        v = evaluate_all(f, res.arc, sgn.props)
        # the final sample is where the run was truncated and has no successor
        assert v[:-1].all() and len(v) > 2, (x0, v)
        arts.append(dump_trace(res.arc))
    with contextlib.redirect_stdout(io.StringIO()):
        code = run_cli(["certify", "next", "--system", "bouncing_ball", "--prop", "x2_le_0"])
    assert code == 2
    return "certify_next passed on sgn_jump; X p_unit on 3 runs; ball exit 2", arts


def criterion_7():
    rng = random.Random(7)
    props = atom_props()
    for _ in range(1000):
        arc = random_arc(rng, 200)
        f = random_formula(rng, 4)
        g = random_formula(rng, 4)
        ev = lambda h: evaluate_all(h, arc, props)  # noqa: E731
        assert np.array_equal(ev(f), direct_evaluate(f, arc, props)), to_text(f)
        assert np.array_equal(ev(Not(Eventually(f))), ev(Always(Not(f))))
        assert np.array_equal(ev(Not(Always(f))), ev(Eventually(Not(f))))
        assert np.array_equal(ev(UntilWeak(f, g)), ev(Or(UntilStrong(f, g), Always(f))))
    return "1000 cases: scan == brute force, dualities, W expansion", []


def criterion_8():
    f = parse_formula("F p3 & (p1 U p2)")
    a = build_automaton(f, ("p1", "p2", "p3"))
    listed = {(s, o): a.step(s, o) for s in ("s0", "s1", "s2") for o in ("p1", "p2", "p3")}
    expected = {("s0", "p1"): "s0", ("s0", "p2"): "s2", ("s2", "p3"): "s1"}
    for o in ("p1", "p2"):
        expected["s2", o] = "s2"
    for o in ("p1", "p2", "p3"):
        expected["s1", o] = "s1"
    expected["s0", "p3"] = a.sink
    assert listed == expected and a.accepting == {"s1"}
    n = 0
    for w in words(("p1", "p2", "p3"), 6):
        if not w:
            continue
        arc, props = word_arc(w, ("p1", "p2", "p3"))
        assert run_automaton(a, w)[1] == bool(direct_evaluate(f, arc, props)[0]), w
        n += len(w) == 6
    assert n == 729
    return "table reproduced; agreement on all words of length 1..6 (729 of length 6)", \
        [a.to_json()]


def criterion_9():
    ff = EX["firefly"]
    assert ff.constants["eps"] == 0.2
    v = ff.certificates["V"].cert
    rng = np.random.default_rng(9)
    starts = []
    while len(starts) < 20:
        x = (float(rng.uniform(0, 1)), float(rng.uniform(0, 1)))
        if v(x) <= 0.4 and (ff.system.in_flow(x) or ff.system.in_jump(x)):
            starts.append(x)
    arts, worst = [], (0.0, 0)
    for x0 in starts:
        res = simulate(ff.system, x0, SimOptions(t_max=10, j_max=50))
        hit = next(((t, j) for t, j, x in zip(res.arc.times, res.arc.jumps, res.arc.states)
                    if v(x) <= 1e-4), None)
        assert hit is not None and hit[0] <= 10 and hit[1] <= 50, (x0, res.termination)
        worst = max(worst, hit, key=lambda p: p[0] + p[1])
        arts.append(dump_trace(res.arc))
    rep = certify_eventually_jump(ff.system, "sync", v, ff.certificates["V"].params["c"],
                                  ff.sampler, ff.props, ff.region, nonstrict_jump=True)
    assert rep.passed, rep.summary()
    pts = [x for x in ff.sampler.points() if ff.region(x) and not ff.props.holds("sync", x)]
    ucs = [u_c(ff.system, v, x) for x in pts if ff.system.in_flow(x)]
    uds = [u_d(ff.system, v, x) for x in pts if ff.system.in_jump(x)]
    assert ucs and max(abs(u) for u in ucs) <= 1e-6
    assert uds and max(uds) <= 1e-9
    arts.append(rep.to_json())
    return f"20 runs synchronize (latest at t={worst[0]:.3f}, j={worst[1]}); " \
        f"u_C=0 on {len(ucs)}, u_D<=0 on {len(uds)} samples", arts


def criterion_10():
    rng = random.Random(10)
    for _ in range(500):
        f = random_formula(rng, 4)
        assert parse_formula(to_text(f)) == f
        assert to_text(parse_formula(to_text(f))) == to_text(f)
        e = random_expr(rng, 4)
        assert parse_expression(expr_text(e)) == e
        assert expr_text(parse_expression(expr_text(e))) == expr_text(e)
    bad_formulas = ["U p", "p U", "(p & q", "p q", "G", "p )", "p & | q", "X"]
    bad_exprs = ["x1 + and", "(x1", "x1 $ 2", "1 +", "max(x1,", "x1 <= <= 2"]
    for text in bad_formulas:
        with pytest.raises(FormulaSyntaxError) as info:
            parse_formula(text)
        assert 0 <= info.value.pos <= len(text) and "position" in str(info.value)
    for text in bad_exprs:
        with pytest.raises(ExprSyntaxError) as info:
            parse_expression(text)
        assert 0 <= info.value.pos <= len(text) and "position" in str(info.value)
    return "500 formulas and 500 expressions round-trip; " \
        f"{len(bad_formulas) + len(bad_exprs)} syntax errors positioned", []


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9]


def criterion_11():
    for crit in CRITERIA:
        if crit is criterion_7:
            continue  # produces no artifacts; its inputs come from a seeded generator
        _, a = crit()
        _, b = crit()
        assert a == b, crit.__name__
    return "criteria 1-6, 8, 9 rerun with identical traces and reports", []


LIMITS = {1: 10.0, 2: 5.0, 7: 30.0}


def _run(num, record_property):
    fn = globals()[f"criterion_{num}"]
    t0 = time.perf_counter()
    detail, _ = fn()
    dt = time.perf_counter() - t0
    record_property("detail", f"{detail} [{dt:.2f} s]")
    if num in LIMITS:
        assert dt < LIMITS[num], f"took {dt:.2f} s, limit {LIMITS[num]} s"


@pytest.mark.parametrize("num", range(1, 12), ids=lambda n: f"{n:02d}")
def test_criterion_(num, record_property):
    _run(num, record_property)


if __name__ == "__main__":
    for num in range(1, 12):
        t0 = time.perf_counter()
        try:
            detail, _ = globals()[f"criterion_{num}"]()
            ok = num not in LIMITS or time.perf_counter() - t0 < LIMITS[num]
        except AssertionError as exc:
            ok, detail = False, f"assertion failed: {str(exc)[:120]}"
        print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail} "
              f"[{time.perf_counter() - t0:.2f} s]")
