#!/usr/bin/env python3
"""Time the compiled Wick kernel against the numpy fallback.

Runs the real hashing workload (mu and sigma for a batch of N-mode inputs
through one circuit) with each backend, checks the results are
bit-identical, and prints a small table. Thread counts only affect the
compiled kernel.

    python benchmarks/bench_backends.py --n 16 --inputs 512 --threads 1 4
"""

import argparse
import json
import os
import time

import numpy as np

from gbshash import _backend, _wick_py, compose_unitary, sample_circuit
from gbshash.gaussian import correlation_stats_for_inputs


def _timed(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--inputs", type=int, default=512)
    ap.add_argument("--threads", type=int, nargs="+", default=[1, os.cpu_count() or 1])
    ap.add_argument("--repeat", type=int, default=2)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--json", help="also write results to this file")
    args = ap.parse_args(argv)

    U = compose_unitary(sample_circuit(args.n, args.n, seed=args.seed))
    rng = np.random.default_rng(args.seed)
    bits = rng.integers(0, 2, size=(args.inputs, args.n))

    compiled = _backend.wick_sum if _backend.BACKEND == "cython" else None
    rows = []
    try:
        _backend.wick_sum = _wick_py.wick_sum
        t_py, ref = _timed(lambda: correlation_stats_for_inputs(U, bits, nthreads=1), args.repeat)
        rows.append({"backend": "python", "threads": 1, "seconds": t_py, "identical": True})
        if compiled is not None:
            _backend.wick_sum = compiled
            for th in args.threads:
                t, out = _timed(lambda: correlation_stats_for_inputs(U, bits, nthreads=th), args.repeat)
                same = all(np.array_equal(a, b) for a, b in zip(out, ref))
                rows.append({"backend": "cython", "threads": th, "seconds": t, "identical": same})
    finally:
        if compiled is not None:
            _backend.wick_sum = compiled

    print(f"N={args.n}, {args.inputs} inputs, mu+sigma (best of {args.repeat})")
    print(f"{'backend':<8} {'threads':>7} {'seconds':>9} {'speedup':>8} identical")
    for r in rows:
        print(f"{r['backend']:<8} {r['threads']:>7} {r['seconds']:>9.3f} {t_py / r['seconds']:>7.1f}x {r['identical']}")
    if compiled is None:
        print("compiled extension not built; only the fallback was timed")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"n": args.n, "inputs": args.inputs, "rows": rows}, fh, indent=1)
    return 0 if all(r["identical"] for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
