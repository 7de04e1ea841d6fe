#!/usr/bin/env python3
"""Benchmark the compiled core against the pure NumPy fallback.

Times the three hot kernels (rhs, jacobian, mass_flux) on dense states for
a range of truncation sizes, plus one end-to-end integration, and prints a
comparison table.  Run as ``python3 benchmarks/bench_core.py``.
"""

import argparse
import importlib.util
import time

import numpy as np

from coagfrag import RateLaws, SolverConfig, TruncatedSystem, builtin_example, integrate
from coagfrag import _core_np
from coagfrag.experiments import build_system, initial_state, scenario_output_grid


def available_backends():
    backends = {"numpy": _core_np}
    if importlib.util.find_spec("coagfrag._core_cy") is not None:
        from coagfrag import _core_cy

        backends["cython"] = _core_cy
    return backends


def time_call(fn, min_time=0.2):
    fn()  # warm up
    n, elapsed = 0, 0.0
    start = time.perf_counter()
    while elapsed < min_time:
        fn()
        n += 1
        elapsed = time.perf_counter() - start
    return elapsed / n


def bench_kernels(sizes):
    backends = available_backends()
    ex = builtin_example(1)
    rng = np.random.default_rng(0)
    print(f"{'N':>6} {'op':>10} " + " ".join(f"{name:>12}" for name in backends))
    for n in sizes:
        sys_ = TruncatedSystem(n, ex.frag, ex.coag, RateLaws(a=1.0, frag_exp=1.0))
        u = rng.random(n) * 10.0
        out = np.empty(n)
        jac = np.empty((n, n))
        ops = {
            "rhs": lambda core: core.rhs_core(
                u, sys_._g, sys_._d, sys_._theta, sys_.frag_gain, sys_.k, out
            ),
            "jacobian": lambda core: core.jacobian_core(u, sys_.linear_jacobian, sys_.k, jac),
            "mass_flux": lambda core: core.mass_flux_core(
                u, sys_._g, sys_._d, sys_._s, sys_._a, sys_.mass_defect
            ),
        }
        for op_name, op in ops.items():
            times = [time_call(lambda core=core: op(core)) for core in backends.values()]
            row = " ".join(f"{t * 1e6:>10.1f}us" for t in times)
            print(f"{n:>6} {op_name:>10} {row}")


def bench_integration():
    import os

    ex = builtin_example(1)
    print("\nend-to-end: example 1 (N=200, t in [0, 1], default tolerances)")
    for name in available_backends():
        os.environ["COAGFRAG_BACKEND"] = name
        # subprocess keeps the backend selection clean (it happens at import)
        import subprocess
        import sys

        code = (
            "import time, numpy as np\n"
            "from coagfrag import builtin_example, integrate\n"
            "from coagfrag.experiments import build_system, initial_state, scenario_output_grid\n"
            "import coagfrag\n"
            "ex = builtin_example(1)\n"
            "sys_ = build_system(ex)\n"
            "t0 = time.perf_counter()\n"
            "tr = integrate(sys_, initial_state(ex.initial, ex.N), (0.0, ex.t_end), ex.solver,\n"
            "               scenario_output_grid(ex))\n"
            "t1 = time.perf_counter()\n"
            "print(f'  {coagfrag.BACKEND:>8}: {t1-t0:6.2f}s  '\n"
            "      f'({tr.stats.steps_accepted} steps, {tr.stats.rhs_evaluations} rhs evals)')\n"
        )
        subprocess.run([sys.executable, "-c", code], env={**os.environ}, check=True)
    os.environ.pop("COAGFRAG_BACKEND", None)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="50,100,200,400", help="comma-separated N values")
    parser.add_argument("--skip-integration", action="store_true")
    args = parser.parse_args()
    sizes = [int(tok) for tok in args.sizes.split(",")]
    bench_kernels(sizes)
    if not args.skip_integration:
        bench_integration()


if __name__ == "__main__":
    main()
