"""Time the compiled and numpy screening kernels on the same profile search.

    python benchmarks/bench_kernels.py [--k 3] [--grid 50] [--repeat 3]
"""

import argparse
import time

import numpy as np

from segprice import _kernels_py
from segprice.distributions import affine_survival
from segprice.market import MarketInstance, _profit
from segprice.screening import ScreeningInstance, _tail_table, threshold_candidates

try:
    from segprice import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def problem(K, grid, seed=0):
    rng = np.random.default_rng(seed)
    segs = []
    for _ in range(K):
        mid = float(rng.uniform(0.1, 0.9))
        segs.append((1.0 / K, affine_survival([0.0, mid, 1.0], [1.0, float(rng.uniform(0.2, 0.9)), 0.0])))
    s = ScreeningInstance(MarketInstance(segs), grid=grid)
    pts = threshold_candidates(s)
    A = _tail_table(s, pts)
    R = np.array([w * np.asarray(_profit(d, 0.0, pts), dtype=float) for w, d in s.market.segments])
    return A, R, s.market.weights


def best_time(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--grid", type=int, default=50)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    A, R, alpha = problem(args.k, args.grid)
    n_prof = A.shape[1] ** args.k
    print(f"K={args.k}  candidates={A.shape[1]}  profiles={n_prof}")
    t_py, res_py = best_time(lambda: _kernels_py.search_profiles(A, R, alpha, 1e-12), args.repeat)
    print(f"python   {t_py * 1e3:9.2f} ms   value={res_py[0]:.15g}")
    if _compiled is None:
        print("compiled extension not built")
        return
    t_c, res_c = best_time(lambda: _compiled.search_profiles(A, R, alpha, 1e-12), args.repeat)
    same = res_c[0] == res_py[0] and list(res_c[1]) == list(res_py[1])
    print(f"compiled {t_c * 1e3:9.2f} ms   value={res_c[0]:.15g}")
    print(f"speedup  {t_py / t_c:9.1f}x   identical={same}")


if __name__ == "__main__":
    main()
