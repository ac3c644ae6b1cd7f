"""Time the numba kernels against their fallbacks on the reference scenario.

    python benchmarks/bench_kernels.py [--repeat 5] [--horizon 30]

The numba column excludes compilation: every kernel is called once first.
"""
import argparse
import time

import numpy as np

from sinfreq import drem, kernels
from sinfreq._jit import USE_NUMBA
from sinfreq.estimator import EstimatorConfig, run_estimator
from sinfreq.regressor import RegressorBank
from sinfreq.signal_gen import SignalSpec, sample


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--horizon", type=float, default=30.0)
    ap.add_argument("--dt", type=float, default=1e-3)
    args = ap.parse_args(argv)

    t = np.arange(int(round(args.horizon / args.dt)) + 1) * args.dt
    y = sample(SignalSpec.linear_chirp(2.0, 1.0, 1.0, 0.05), t)
    bank = RegressorBank([1.0, 2.0, 3.0])
    regs = bank.run(y, t, backend=kernels.bank_numpy)
    delta, ymix = drem.mix_series(regs, backend=kernels.mix_numpy)
    cfg = EstimatorConfig()

    cases = {
        "filter bank": (
            lambda: bank.run(y, t, backend=kernels.bank_numba),
            lambda: bank.run(y, t, backend=kernels.bank_numpy),
        ),
        "3x3 mixing": (
            lambda: drem.mix_series(regs, backend=kernels.mix_numba),
            lambda: drem.mix_series(regs, backend=kernels.mix_numpy),
        ),
        "estimator": (
            lambda: run_estimator(delta, ymix, args.dt, cfg, backend=kernels.estimate_numba),
            lambda: run_estimator(delta, ymix, args.dt, cfg, backend=kernels.estimate_python),
        ),
    }
    print(f"{len(t)} steps, best of {args.repeat}; numba active: {USE_NUMBA}")
    print(f"{'kernel':<12} {'numba [ms]':>11} {'fallback [ms]':>14} {'speedup':>8}")
    for name, (fast, slow) in cases.items():
        fast()  # compile or load from cache
        tf = best_of(fast, args.repeat)
        ts = best_of(slow, args.repeat)
        print(f"{name:<12} {tf * 1e3:11.2f} {ts * 1e3:14.2f} {ts / tf:7.1f}x")


if __name__ == "__main__":
    main()
