import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyltl.ltl import kernels
from hyltl.ltl import _kernels_py

bits = st.lists(st.integers(0, 1), min_size=0, max_size=300)


def arr(v):
    return np.ascontiguousarray(v, dtype=np.uint8)


needs_ext = pytest.mark.skipif(kernels.compiled_backend is None,
                               reason="compiled kernels not built")


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


@needs_ext
@settings(max_examples=300, deadline=None)
@given(st.data())
def test_compiled_matches_python(data):
    n = data.draw(st.integers(0, 300))
    a, b, pj = (arr(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
                for _ in range(3))
    c, p = kernels.compiled_backend, kernels.python_backend
    assert np.array_equal(c.eventually(a), p.eventually(a))
    assert np.array_equal(c.always(a), p.always(a))
    for weak in (False, True):
        assert np.array_equal(c.until(a, b, weak), p.until(a, b, weak))
    assert np.array_equal(c.next_op(a, pj), p.next_op(a, pj))


@given(bits)
def test_python_scans_against_definitions(v):
    a = arr(v)
    ev = _kernels_py.eventually(a)
    al = _kernels_py.always(a)
    for i in range(len(a)):
        assert ev[i] == int(a[i:].any())
        assert al[i] == int(a[i:].all())


def test_pure_python_switch():
    import os
    import subprocess
    import sys
    code = ("from hyltl.ltl import kernels, parse_formula, evaluate_all\n"
            "from hyltl.config import builtin_examples\n"
            "from hyltl.simulate import simulate, SimOptions\n"
            "b = builtin_examples()['bouncing_ball']\n"
            "arc = simulate(b.system, (1, 0), SimOptions(t_max=3, j_max=2)).arc\n"
            "v = evaluate_all(parse_formula('x2_ge_0 U x2_le_0'), arc, b.props)\n"
            "print(kernels.BACKEND, int(v.sum()), len(v))\n")

    def run(**env):
        env = {k: v for k, v in os.environ.items() if k != "HYLTL_PURE_PYTHON"} | env
        return subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                              text=True, check=True).stdout.split()

    pure, default = run(HYLTL_PURE_PYTHON="1"), run()
    assert pure[0] == "python" and default[0] == kernels.BACKEND
    assert pure[1:] == default[1:]
