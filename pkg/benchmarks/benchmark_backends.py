#!/usr/bin/env python3
"""Compare the compiled kernel against the numpy fallback.

Times the raw velocity-field evaluation at several swarm sizes, and then a
full circle-formation run, on both backends.  The workloads are fixed-seed
and identical across backends, so the numbers differ only by implementation.

Usage: python3 benchmarks/benchmark_backends.py [--sizes 12,50,200] [--steps 2000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import swarmshape as ss
from swarmshape.backend import get_backend, has_compiled
from swarmshape.shapes import shape_code


def time_field(impl, m: int, repeats: int) -> float:
    state = ss.init_swarm(ss.InitSpec(count=m, seed=7))
    p = np.array(state.positions)
    dirs = np.stack([ss.initial_direction(i, m) for i in range(m)])
    code, s0, s1 = shape_code(ss.Circle(4.0))
    args = (p, dirs, 0.1, 2.0, 3.5, 1.2, 0.1, code, s0, s1, 0.0, 0.0)
    impl.velocity_field(*args)  # warm up
    best = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeats):
            impl.velocity_field(*args)
        best = min(best, (time.perf_counter() - t0) / repeats)
    return best


def time_run(backend_name: str, steps: int) -> float:
    cfg = ss.IntegratorConfig(
        max_steps=steps,
        convergence=ss.Convergence(vel_tol=0.0, shape_tol=0.0, window=10),
    )
    state = ss.init_swarm(ss.InitSpec(count=12, seed=7))
    t0 = time.perf_counter()
    ss.run(state, ss.DynamicsParams(), ss.Circle(4.0), cfg, backend=backend_name)
    return time.perf_counter() - t0


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="12,50,200", help="comma-separated swarm sizes")
    parser.add_argument("--steps", type=int, default=2000, help="steps for the full-run timing")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if not has_compiled():
        print("compiled backend not built; only timing the numpy fallback\n")
    backends = ["python"] + (["compiled"] if has_compiled() else [])

    print(f"{'M':>6}  " + "".join(f"{name + ' (us)':>16}" for name in backends) + f"{'speedup':>10}")
    for m in sizes:
        repeats = max(20, 20000 // max(m, 1))
        per = {name: time_field(get_backend(name), m, repeats) for name in backends}
        row = f"{m:>6}  " + "".join(f"{per[name] * 1e6:>16.2f}" for name in backends)
        if len(backends) == 2:
            row += f"{per['python'] / per['compiled']:>10.1f}x"
        print(row)

    print(f"\nfull run, M=12, {args.steps} steps:")
    for name in backends:
        elapsed = time_run(name, args.steps)
        print(f"  {name:>8}: {elapsed * 1e3:8.1f} ms  ({args.steps / elapsed:,.0f} steps/s)")


if __name__ == "__main__":
    main()
