"""Time the running-bound kernels: compiled, numpy fallback and a scalar loop.

    python3 benchmarks/bench_kernels.py --rounds 40000 --repeat 5
"""
import argparse
import time

import numpy as np

from qsv import _kernels_py
from qsv.statistics import Inconclusive, delta_from_counts, epsilon_from_confidence

try:
    from qsv import _kernels
except ImportError:
    _kernels = None


def scalar_delta(accepts, epsilon, f):
    m, out = 0, []
    for n, a in enumerate(accepts, 1):
        m += int(a)
        try:
            out.append(delta_from_counts(n, m, epsilon, f))
        except Inconclusive:
            out.append(float("nan"))
    return out


def scalar_epsilon(accepts, delta, f):
    m, out = 0, []
    for n, a in enumerate(accepts, 1):
        m += int(a)
        try:
            out.append(epsilon_from_confidence(n, m, delta, f))
        except Inconclusive:
            out.append(float("nan"))
    return out


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rounds", type=int, default=40000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--reject-rate", type=float, default=0.01)
    ap.add_argument("--skip-scalar", action="store_true")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    accepts = (rng.random(args.rounds) >= args.reject_rate).astype(np.uint8)
    f = 2 / 3

    backends = [("numpy", _kernels_py.running_delta, _kernels_py.running_epsilon)]
    if _kernels is not None:
        backends.insert(0, ("cython", _kernels.running_delta, _kernels.running_epsilon))
    if not args.skip_scalar:
        backends.append(("scalar", scalar_delta, scalar_epsilon))

    print(f"{args.rounds} rounds, reject rate {args.reject_rate}, best of {args.repeat}")
    print(f"{'backend':<8} {'delta (s)':>11} {'epsilon (s)':>12}")
    for name, run_delta, run_eps in backends:
        repeat = 1 if name == "scalar" else args.repeat
        t_delta = best_of(run_delta, (accepts, 0.01, f), repeat)
        t_eps = best_of(run_eps, (accepts, 0.05, f), repeat)
        print(f"{name:<8} {t_delta:>11.4f} {t_eps:>12.4f}")
    if _kernels is None:
        print("compiled extension not built; rebuild with pip install -e . --no-build-isolation")


if __name__ == "__main__":
    main()
