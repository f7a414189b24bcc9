"""Benchmark the numba kernels against the pure-numpy fallback.

Run directly:  python3 benchmarks/bench_kernels.py
Force the fallback everywhere with TENTOPT_FORCE_NUMPY=1 to sanity-check
that the flag works end to end.
"""

import argparse
import time

import numpy as np

from tentopt import _kernels
from tentopt.hypergraphs import make_tent, make_turan_graph


def cases():
    return [
        ("triangle", make_tent(2, 1)),
        ("tent(5,2)", make_tent(5, 2)),
        ("turan r=3 n=12", make_turan_graph(3, 12)),
        ("turan r=4 n=16", make_turan_graph(4, 16)),
    ]


def bench(fn, *args, repeats=5, **kwargs):
    fn(*args, **kwargs)  # warm up (includes jit compilation)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args, **kwargs)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--starts", type=int, default=200)
    ap.add_argument("--iters", type=int, default=2000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"active backend: {_kernels.backend_name()}")
    header = f"{'case':<18} {'kernel':<12} {'numpy':>10} {'active':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))

    for name, H in cases():
        edges = np.array(H.sorted_edges, dtype=np.int64)
        pts = rng.dirichlet(np.ones(H.n), size=args.starts)

        t_np = bench(_kernels._edge_poly_batch_np, edges, pts,
                     repeats=args.repeats)
        t_ac = bench(_kernels.edge_poly_batch, edges, pts,
                     repeats=args.repeats)
        print(f"{name:<18} {'edge-poly':<12} {t_np:>9.4f}s {t_ac:>9.4f}s "
              f"{t_np / t_ac:>7.1f}x")

        t_np = bench(_kernels._replicator_batch_np, edges, H.n, pts,
                     args.iters, 1e-12, repeats=args.repeats)
        t_ac = bench(_kernels.replicator_batch, edges, H.n, pts,
                     iters=args.iters, tol=1e-12, repeats=args.repeats)
        print(f"{name:<18} {'replicator':<12} {t_np:>9.4f}s {t_ac:>9.4f}s "
              f"{t_np / t_ac:>7.1f}x")


if __name__ == "__main__":
    main()
