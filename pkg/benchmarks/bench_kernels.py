"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints the best wall time per kernel and backend, plus the speedup.
"""

import argparse
import timeit

import numpy as np

from tailex import kernels
from tailex.estimators import Estimator

CODES = np.array([e.value for e in Estimator], dtype=np.int64)


def pareto_logs(rows, n, seed=0):
    rng = np.random.default_rng(seed)
    lg = -np.log(1.0 - rng.uniform(size=(rows, n))) + np.log(50.0)
    lg.sort(axis=1)
    return np.ascontiguousarray(lg[:, ::-1])


def cases(impl):
    batch = pareto_logs(256, 100)
    big = pareto_logs(64, 10_000, seed=1)
    scan_logs = np.ascontiguousarray(pareto_logs(1, 2515, seed=2)[0])
    return {
        "correction_factors(n=1e6)": lambda: impl.correction_factors(1_000_000),
        "estimate_batch(256 x 100)": lambda: impl.estimate_batch(batch, CODES, 0.97, 0.96),
        "estimate_batch(64 x 10000)": lambda: impl.estimate_batch(big, CODES, 0.999, 0.998),
        "scan(n=2515, m>=3)": lambda: impl.scan(scan_logs, 3, 2515, CODES),
        "kml_weight_sum(64 x 10000)": lambda: impl.kml_weight_sum(big),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = kernels.available_backends()
    timings = {}
    for name, impl in sorted(backends.items()):
        for label, fn in cases(impl).items():
            fn()  # warm caches
            timings[(label, name)] = min(timeit.repeat(fn, number=1, repeat=args.repeat))

    labels = list(cases(next(iter(backends.values()))))
    names = sorted(backends)
    print(f"{'kernel':<30}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label in labels:
        line = f"{label:<30}" + "".join(f"{timings[(label, n)] * 1e3:>10.2f}ms" for n in names)
        if len(names) == 2:
            line += f"{timings[(label, 'python')] / timings[(label, 'cython')]:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
