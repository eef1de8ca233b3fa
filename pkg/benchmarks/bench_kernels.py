"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json]
"""
import argparse
import json
import sys
import timeit

import numpy as np

from geoprox import kernels
from geoprox.spaces import MetricTree


def random_tree(n_vertices, rng):
    edges = [(int(rng.integers(0, v)), v, float(rng.uniform(0.5, 2.0))) for v in range(1, n_vertices)]
    return MetricTree(list(range(n_vertices)), edges)


def cases(rng):
    tree = random_tree(64, rng)
    n = 20_000
    X = tree.sample(rng, n)
    Y = tree.sample(rng, n)
    t = rng.uniform(0, 1, n)
    e1, o1 = X[:, 0].astype(np.int64), np.ascontiguousarray(X[:, 1])
    e2, o2 = Y[:, 0].astype(np.int64), np.ascontiguousarray(Y[:, 1])
    tables = (tree.ea, tree.eb, tree.elen, tree.D)
    polys = [rng.standard_normal((40, 6)) + 3.0 for _ in range(200)]
    return {
        "tree_dist (20k pairs)": lambda k: k.tree_dist(e1, o1, e2, o2, *tables),
        "tree_combine (20k pairs)": lambda k: k.tree_combine(e1, o1, e2, o2, t, *tables, tree.nxt, tree.edge_of),
        "min_norm_point (200 x 40 pts)": lambda k: [k.min_norm_point(P) for P in polys],
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    if not kernels.compiled_available():
        print("compiled kernels are not built; only the numpy backend is available", file=sys.stderr)
    backends = ["python"] + (["cython"] if kernels.compiled_available() else [])
    rows = []
    for name, fn in cases(np.random.default_rng(0)).items():
        row = {"kernel": name}
        for b in backends:
            mod = kernels.get_backend(b)
            row[b] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        if "cython" in row:
            row["speedup"] = row["python"] / row["cython"]
        rows.append(row)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'kernel':32s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for r in rows:
        cy = f"{r['cython']:11.4f}" if "cython" in r else f"{'-':>11s}"
        sp = f"{r['speedup']:7.1f}x" if "speedup" in r else f"{'-':>8s}"
        print(f"{r['kernel']:32s} {r['python']:11.4f} {cy} {sp}")


if __name__ == "__main__":
    main()
