"""Benchmark: compiled stepper extension vs the pure-Python fallback.

Runs the same holonomy initial value problems through both kernels and
reports wall time per integration plus the speedup.  Usage:

    python benchmarks/bench_stepper.py [--t-end 1e4] [--repeat 5]
"""

import argparse
import time

from holoflow._kernel import _stepper_py

try:
    from holoflow._kernel import _stepper as _compiled
except ImportError:
    _compiled = None

from holoflow.flow import derive_flow
from holoflow.homogeneous import m_model, q_model
from holoflow.integrate import IntegratorConfig, OrbitSpec, _compile_terms, series_start


def problem(kind, orbit, values, t_end):
    model = q_model(1, 1, 1) if kind == "Q" else m_model(1, 1)
    sys = derive_flow(model)
    spec = OrbitSpec(kind, orbit, values)
    start, _ = series_start(sys, spec)
    coeffs, exps, owner, nstate = _compile_terms(sys)
    y0 = [start.values[n] for n in sys.state] + [start.primitive]
    watch = [True] * len(sys.state) + [False]
    args = (
        coeffs, exps, owner, nstate, y0, start.t, t_end,
        1e-10, 1e-12, 0.0, 0.0, 0.9, 0.2, 5.0, watch, 2_000_000,
    )
    return f"{kind}/{orbit} to t={t_end:g}", args


def bench(mod, args, repeat):
    best = float("inf")
    steps = 0
    for _ in range(repeat):
        t0 = time.perf_counter()
        status, ts, *_ = mod.solve(*args)
        best = min(best, time.perf_counter() - t0)
        steps = len(ts) - 1
        assert status == "done", status
    return best, steps


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--t-end", type=float, default=1e4)
    ap.add_argument("--repeat", type=int, default=5)
    opts = ap.parse_args()

    problems = [
        problem("Q", "s2xs2", {"b": 1, "c": 1}, opts.t_end),
        problem("Q", "s2xs2xs2", {"a": 1, "b": 1, "c": 1}, opts.t_end),
        problem("M", "cp2", {"a": 1}, opts.t_end),
    ]
    print(f"{'problem':<28} {'steps':>6} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for name, args in problems:
        t_py, steps = bench(_stepper_py, args, opts.repeat)
        if _compiled is not None:
            t_c, steps_c = bench(_compiled, args, opts.repeat)
            assert steps_c == steps
            print(
                f"{name:<28} {steps:>6} {t_py * 1e3:>8.2f}ms {t_c * 1e3:>8.2f}ms "
                f"{t_py / t_c:>7.1f}x"
            )
        else:
            print(f"{name:<28} {steps:>6} {t_py * 1e3:>8.2f}ms {'n/a':>10} {'n/a':>8}")


if __name__ == "__main__":
    main()
