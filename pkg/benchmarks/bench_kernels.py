"""Benchmark the compiled kernels against the reference NumPy lane.

Runs each block kernel on a representative workload in both lanes and
prints wall times, speedups, and the maximum deviation between lanes.

Usage: python benchmarks/bench_kernels.py [--steps N] [--trials M]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from tickwork.kernels import get_impl


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _states(m, names, seed=0):
    rng = np.random.default_rng(seed)
    return {n: rng.uniform(0.05, 0.3, m) for n in names}


def bench_case(name, make_args, out_names, steps, trials):
    rng = np.random.default_rng(42)
    dw = rng.standard_normal((trials, steps)) * np.sqrt(1e-3)
    results = {}
    for lane in ("reference", "compiled"):
        try:
            impl = get_impl(lane)
        except ImportError:
            print(f"{name:<16} {lane}: unavailable")
            continue
        states, args = make_args()
        outs = [np.empty((trials, steps)) for _ in out_names]
        fn = getattr(impl, name)

        def run():
            st = {k: v.copy() for k, v in states.items()}
            fn(*st.values(), *args, dw, *outs)

        results[lane] = (_time(run), [o.copy() for o in outs])
    if "compiled" in results and "reference" in results:
        t_ref, o_ref = results["reference"]
        t_fast, o_fast = results["compiled"]
        dev = max(np.max(np.abs(a - b)) for a, b in zip(o_ref, o_fast))
        print(f"{name:<18} reference {t_ref*1e3:9.2f} ms   compiled "
              f"{t_fast*1e3:9.2f} ms   speedup {t_ref/t_fast:6.1f}x   "
              f"max|diff| {dev:.3g}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--trials", type=int, default=64)
    ns = ap.parse_args()
    steps, trials = ns.steps, ns.trials
    print(f"workload: {trials} trials x {steps} steps per kernel")

    bench_case(
        "pendulum_block",
        lambda: (_states(trials, ["x", "y"]),
                 (0.1, 0.1, 0.1, np.sqrt(0.99), 0.14, 1e-3)),
        ("x", "y", "k"), steps, trials)
    bench_case(
        "phase_block",
        lambda: (_states(trials, ["psi"]), (1.0, 0.08, 0.1, 0.0, 1e-3)),
        ("psi", "k"), steps, trials)
    bench_case(
        "quartz_block",
        lambda: (_states(trials, ["v", "x", "y"]),
                 (0.1, 8.0, 1.0, 1.0, 1.0, 5.0, 0.05, 1e-3)),
        ("v", "x", "y"), steps, trials)
    def sme_states():
        rng = np.random.default_rng(3)
        # stay inside the Bloch ball: (a-1/2)^2 + |c|^2 <= 1/4
        return ({"a": rng.uniform(0.2, 0.8, trials),
                 "cre": rng.uniform(-0.05, 0.05, trials),
                 "cim": rng.uniform(-0.05, 0.05, trials)},
                (1.0, 0.19, 0.09, 0.5, np.sqrt(0.5), 1e-3))

    bench_case("sme_block", sme_states, ("z", "cre", "cim", "i"),
               steps, trials)

    # the shuttle ODE and the jump process take no per-step noise
    for lane in ("reference", "compiled"):
        impl = get_impl(lane)
        st = _states(trials, ["n", "x", "y"])
        outs = [np.empty((trials, steps)) for _ in range(3)]

        def run():
            s = {k: v.copy() for k, v in st.items()}
            impl.shuttle_ode_block(s["n"], s["x"], s["y"], 0.5, 0.5, 0.3,
                                   1.0, 1.0, 0.05, 1e-3, *outs)

        t = _time(run)
        print(f"{'shuttle_ode_block':<18} {lane:<9} {t*1e3:9.2f} ms")


if __name__ == "__main__":
    main()
