"""Time the compiled scan kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--n 200000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from hyltl.ltl import kernels


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    a, b, pj = (np.ascontiguousarray(rng.integers(0, 2, args.n), dtype=np.uint8)
                for _ in range(3))
    backends = {"python": kernels.python_backend}
    if kernels.compiled_backend is not None:
        backends["cython"] = kernels.compiled_backend
    else:
        print("compiled kernels not built; timing the fallback only")
    cases = {
        "eventually": lambda k: k.eventually(a),
        "always": lambda k: k.always(a),
        "until": lambda k: k.until(a, b, False),
        "next": lambda k: k.next_op(a, pj),
    }
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<12}" + "".join(f"{name:>12}" for name in backends) + "     speedup")
    for label, fn in cases.items():
        times = {name: min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
                 for name, k in backends.items()}
        row = f"{label:<12}" + "".join(f"{times[name] * 1e3:>10.2f}ms" for name in backends)
        if "cython" in times:
            row += f"  {times['python'] / times['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
