#!/usr/bin/env python3
"""Compare the jit-compiled kernels against the pure-numpy fallback.

Each backend runs in its own subprocess (the backend is chosen at import via
RTRMT_NUMBA), timing the symmetric eigensolver on random Laplacians and the
exhaustive tour search at desk scale. Usage: python3 benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys

WORKER = r"""
import json, os, time
import numpy as np
from rtrmt import kernels

rng = np.random.default_rng(0)

def laplacian(n):
    adj = (rng.random((n, n)) < 0.3).astype(float)
    adj = np.triu(adj, 1)
    adj = adj + adj.T
    return np.diag(adj.sum(axis=1)) - adj

def bench(fn, reps):
    fn()  # warm-up / jit compile outside the timed region
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps

mats = [laplacian(45) for _ in range(20)]
cost8 = rng.uniform(0.1, 5.0, size=(9, 9))

results = {
    "backend": "numba" if kernels.USING_NUMBA else "numpy",
    "eig_45x45_x20_ms": bench(lambda: [kernels.eigvalsh_small(m) for m in mats], 10) * 1e3,
    "tour_8_tasks_k3_ms": bench(lambda: kernels.tour_search(cost8, 3), 5) * 1e3,
}
print(json.dumps(results))
"""


def run_backend(flag: str) -> dict:
    env = dict(os.environ, RTRMT_NUMBA=flag)
    proc = subprocess.run(
        [sys.executable, "-c", WORKER], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> int:
    rows = [run_backend("0"), run_backend("1")]
    keys = [k for k in rows[0] if k != "backend"]
    width = max(len(k) for k in keys) + 2
    print(f"{'kernel':<{width}}" + "".join(f"{r['backend']:>12}" for r in rows) + f"{'speedup':>10}")
    for k in keys:
        a, b = rows[0][k], rows[1][k]
        print(f"{k:<{width}}" + f"{a:>10.2f}ms" + f"{b:>10.2f}ms" + f"{a / b:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
