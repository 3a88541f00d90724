"""Time the sampler kernels under both backends.

    python3 benchmarks/bench_kernels.py --N 100000 --repeat 5

Each timing is the best of ``--repeat`` runs after one warm-up call (so
numba compile time is excluded and reported separately).  Both backends
must produce identical maps and hulls for the same seed.
"""

import argparse
import time

import numpy as np

from hullstats.mc.sampler import hull_decompose, map_from_tree, rng_for, tree_from_rng


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(N, repeat, seed, d):
    word, inc = tree_from_rng(N, rng_for(seed, 0), "numpy")
    report = {}
    for backend in ("numpy", "numba"):
        t0 = time.perf_counter()
        qmap = map_from_tree(word, inc, backend)
        hull_decompose(qmap, d, backend)
        first = time.perf_counter() - t0
        t_tree, _ = _best(lambda: tree_from_rng(N, rng_for(seed, 0), backend), repeat)
        t_map, qmap = _best(lambda: map_from_tree(word, inc, backend), repeat)
        t_hull, obs = _best(lambda: hull_decompose(qmap, d, backend), repeat)
        report[backend] = dict(first=first, tree=t_tree, map=t_map, hull=t_hull, qmap=qmap, obs=obs)
    a, b = report["numpy"], report["numba"]
    same = (a["qmap"].k == b["qmap"].k and a["obs"] == b["obs"]
            and np.array_equal(a["qmap"].dist, b["qmap"].dist))
    return report, same


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--N", type=int, default=100_000)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--d", type=int, default=3)
    a = p.parse_args()
    report, same = run(a.N, a.repeat, a.seed, a.d)
    print(f"N={a.N} d={a.d} repeat={a.repeat}")
    print(f"{'stage':<8}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for stage in ("tree", "map", "hull"):
        x, y = report["numpy"][stage], report["numba"][stage]
        print(f"{stage:<8}{x:12.4f}{y:12.4f}{x / y:10.1f}")
    print(f"first call incl. compile: numpy {report['numpy']['first']:.2f}s, numba {report['numba']['first']:.2f}s")
    print("backends agree" if same else "BACKENDS DISAGREE")
    return 0 if same else 1


if __name__ == "__main__":
    raise SystemExit(main())
