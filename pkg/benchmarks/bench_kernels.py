"""Compare the compiled and numpy kernels on the workloads the systems generate.

Usage: ``python benchmarks/bench_kernels.py [--repeat R]``
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from klab.kernels import compiled_available, get_backend


def workloads(rng: np.random.Generator):
    s = rng.standard_normal(4096)
    rows = rng.standard_normal((8, 4096))
    x = rng.uniform(0.0, 1.0, 4097)
    return {
        "interp (4097 points)": lambda k: k.interp(s, True, x),
        "orbit_sum order 16806": lambda k: k.orbit_sum(rows, 16806, 0, 16806, 1),
        "orbit_sum order 2**20": lambda k: k.orbit_sum(rows, 2**20, 0, 2**20, 3),
        "winding_gather w=1728": lambda k: k.winding_gather(s, 1728, 4096, 4097),
    }


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = ["python"] + (["cython"] if compiled_available() else [])
    rng = np.random.default_rng(0)
    print(f"{'kernel':28s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, fn in workloads(rng).items():
        times = []
        for name in names:
            k = get_backend(name)
            times.append(min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)))
        row = f"{label:28s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
