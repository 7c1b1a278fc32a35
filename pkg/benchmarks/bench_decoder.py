"""Time the compiled and NumPy successive-cancellation kernels side by side.

    python benchmarks/bench_decoder.py --n 64 256 1024 --users 1 2 --trials 512
"""
import argparse
import time

import numpy as np

from macpolar import kernels
from macpolar.channels import bsc, noisy, xor2
from macpolar.code import channel_likelihoods, kronecker_encode, sample_channel


def workload(m, n, trials, rng):
    mac = bsc(0.11) if m == 1 else noisy(xor2(), 0.2)
    q = 1 << m
    u = rng.integers(0, q, size=(trials, n))
    y = sample_channel(mac, kronecker_encode(u), rng)
    free = np.full(n, q - 1)
    free[: n // 2] = 0
    frozen = np.where(free == 0, u[0], 0)
    u[:, : n // 2] = u[0, : n // 2]
    return channel_likelihoods(mac, y), free, frozen


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[64, 256, 1024])
    ap.add_argument("--users", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--trials", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    have = sorted(kernels.BACKENDS)
    print(f"backends available: {', '.join(have)}")
    print(f"{'m':>2} {'n':>6} " + " ".join(f"{b + ' [ms/blk]':>18}" for b in have)
          + f" {'speedup':>8} {'equal':>6}")
    rng = np.random.default_rng(args.seed)
    for m in args.users:
        for n in args.n:
            lik, free, frozen = workload(m, n, args.trials, rng)
            res = {}
            for b in have:
                t, dec = best_of(lambda: kernels.sc_decode_batch(lik, free, frozen, backend=b),
                                 args.repeat)
                res[b] = (t * 1e3 / args.trials, dec)
            same = len({r[1].tobytes() for r in res.values()}) == 1
            speed = (res["python"][0] / res["cython"][0]) if "cython" in res else float("nan")
            print(f"{m:>2} {n:>6} " + " ".join(f"{res[b][0]:>18.4f}" for b in have)
                  + f" {speed:>8.1f} {str(same):>6}")


if __name__ == "__main__":
    main()
