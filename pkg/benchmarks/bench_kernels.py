#!/usr/bin/env python3
"""Benchmark the compiled statistic kernels against the NumPy fallback.

Times each kernel on workloads shaped like the Monte Carlo suites (ADF
with BIC lag selection at n=200/400, the plain residual DF statistic,
KPSS with automatic bandwidth) plus one end-to-end search, and prints the
per-call time for both backends with the speedup.

Run:  python benchmarks/bench_kernels.py [--repeat 200]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cointsearch._kernels import _pure

try:
    from cointsearch._kernels import _core
except ImportError:
    _core = None


def timeit(fn, args_iter, repeat):
    best = float("inf")
    for args in args_iter[:3]:
        fn(*args)  # warm up
    t0 = time.perf_counter()
    for i in range(repeat):
        fn(*args_iter[i % len(args_iter)])
    return (time.perf_counter() - t0) / repeat


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=500)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    walks_200 = [np.cumsum(rng.standard_normal(200)) for _ in range(32)]
    walks_400 = [np.cumsum(rng.standard_normal(400)) for _ in range(32)]
    resid = [rng.standard_normal(200) for _ in range(32)]

    cases = [
        ("adf_best_lag n=200 (BIC over 0..14)",
         "adf_best_lag", [(w, 1, 14) for w in walks_200]),
        ("adf_best_lag n=400 (BIC over 0..16)",
         "adf_best_lag", [(w, 1, 16) for w in walks_400]),
        ("adf_tstat n=400 lag=4", "adf_tstat", [(w, 1, 4) for w in walks_400]),
        ("residual DF (no det) n=200", "adf_tstat",
         [(w, 0, 0) for w in walks_200]),
        ("kpss_statistic n=200 bw=8", "kpss_statistic",
         [(e, 8) for e in resid]),
        ("nw_bandwidth n=200", "nw_bandwidth", [(e,) for e in resid]),
    ]

    print(f"{'kernel workload':<38}{'pure':>12}{'compiled':>12}{'speedup':>9}")
    for label, name, argsets in cases:
        t_pure = timeit(getattr(_pure, name), argsets, args.repeat)
        if _core is None:
            print(f"{label:<38}{t_pure * 1e6:>10.1f}us{'-':>12}{'-':>9}")
            continue
        t_core = timeit(getattr(_core, name), argsets, args.repeat)
        print(f"{label:<38}{t_pure * 1e6:>10.1f}us{t_core * 1e6:>10.1f}us"
              f"{t_pure / t_core:>8.1f}x")

    # end-to-end: one full levels search under each backend
    import os
    import subprocess
    import sys
    code = (
        "import time,sys;"
        "sys.path.insert(0, 'tests');"
        "from conftest import cointegrated_dataset;"
        "from cointsearch.config import SearchConfig;"
        "from cointsearch.generator import run_search;"
        "from cointsearch import KERNEL_BACKEND;"
        "data = cointegrated_dataset(seed=1);"
        "cfg = SearchConfig(target='y', predictors=['x1','x2','x3','x4','x5']);"
        "t0=time.perf_counter();"
        "[run_search(data, cfg) for _ in range(3)];"
        "print(f'{KERNEL_BACKEND}: {(time.perf_counter()-t0)/3:.3f}s per search')"
    )
    print("\nfull 186-candidate search (3-run average):")
    for env_val in ("0", "1"):
        env = dict(os.environ, COINTSEARCH_PURE_PYTHON=env_val)
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True)
        print(" ", out.stdout.strip() or out.stderr.strip())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
