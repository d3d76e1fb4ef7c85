"""Compiled vs pure-Python annealing kernels.

    python benchmarks/bench_backends.py [--sizes 100 400 800] [--iterations 4000]

Both backends run the same seeded problem; the script checks that their
energy traces agree before reporting timings.
"""

import argparse
import time

import numpy as np

from inc_anneal import _backend
from inc_anneal.annealer import AnnealConfig, anneal
from inc_anneal.model import random_pm1_model


def _time(model, cfg, method, repeat):
    best = np.inf
    res = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = anneal(model, cfg, method)
        best = min(best, time.perf_counter() - t0)
    return best, res


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 400, 800])
    ap.add_argument("--iterations", type=int, default=4000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--evaluator", choices=["ideal", "crossbar"], default="ideal")
    args = ap.parse_args(argv)

    if _backend.compiled is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")

    print(f"{'method':<9} {'n':>6} {'iters':>7} {'cython s':>10} {'python s':>10} {'speedup':>8}")
    for method in ("insitu", "baseline"):
        for n in args.sizes:
            model = random_pm1_model(n, n)
            iters = args.iterations if method == "insitu" else max(args.iterations // 10, 70)
            kw = dict(total_iterations=iters, seed=1, evaluator=args.evaluator)
            tc, rc = _time(model, AnnealConfig(backend="cython", **kw), method, args.repeat)
            tp, rp = _time(model, AnnealConfig(backend="python", **kw), method, args.repeat)
            if not np.array_equal(rc.energy_trace, rp.energy_trace) or rc.op_counters != rp.op_counters:
                raise SystemExit(f"backends disagree for {method} n={n}")
            print(f"{method:<9} {n:>6} {iters:>7} {tc:>10.4f} {tp:>10.4f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
