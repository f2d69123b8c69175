"""Compare the numba and numpy residual kernels on su(2)^4.

    python3 benchmarks/bench_kernels.py [--batch 2000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from hcx.liealg import su2_power
from hcx.search import kernels
from hcx.search.harness import CONDITION_CAP, base_triple, sample_conjugator, trial_rng


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--batch", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sweeps", type=int, default=20)
    args = ap.parse_args()

    g = su2_power(4)
    st = kernels.Structure.from_algebra(g)
    Q = base_triple(12)
    Ps = np.stack([sample_conjugator(trial_rng(0, i)) for i in range(args.batch)])
    M = Ps[0] @ Q[0] @ np.linalg.inv(Ps[0])

    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    # warm up jit caches so compile time is not counted
    for b in backends:
        kernels.triple_residuals(Ps[:2], Q, st, CONDITION_CAP, b)
        kernels.descend(Ps[:1], Q, st, 1, cap=CONDITION_CAP, backend=b)

    print(f"{'kernel':<28}{'backend':<8}{'per item':>14}")
    results = {}
    for b in backends:
        t, r = best_of(lambda: [kernels.structure_residual(M, st, b) for _ in range(200)], args.repeat)
        print(f"{'single-structure residual':<28}{b:<8}{t / 200 * 1e6:>11.1f} us")
        t, r = best_of(lambda: kernels.triple_residuals(Ps, Q, st, CONDITION_CAP, b), args.repeat)
        results[b] = r
        print(f"{'triple residual (batched)':<28}{b:<8}{t / args.batch * 1e6:>11.1f} us")
        n = 4
        t, _ = best_of(lambda: kernels.descend(Ps[:n], Q, st, args.sweeps, cap=CONDITION_CAP, backend=b), 1)
        print(f"{'descent sweep':<28}{b:<8}{t / (n * args.sweeps) * 1e3:>11.2f} ms")
    if len(results) == 2:
        rel = np.max(np.abs(results["numba"] - results["numpy"]) / results["numpy"])
        print(f"max relative difference between backends: {rel:.2e}")


if __name__ == "__main__":
    main()
