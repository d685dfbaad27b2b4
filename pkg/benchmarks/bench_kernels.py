"""Compare the compiled and pure-Python kernel backends.

Times blocked Floyd-Warshall, Dijkstra, batched queries and CRC-64 on the
same inputs with each available backend, checks that both backends return
identical results, and prints a table (or CSV with --csv).

    python benchmarks/bench_kernels.py --fw-n 256 --grid 128
"""

import argparse
import csv
import sys
import time

import numpy as np

from planar_oracle import _backend
from planar_oracle.graph import WeightModel, generate_grid
from planar_oracle.oracle import build_oracle
from planar_oracle.shortest_paths import adjacency_matrix
from planar_oracle.verify import random_pairs


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def bench(args):
    g = generate_grid(args.grid, args.grid, WeightModel.integer(1, 9), seed=args.seed)
    fw_graph = generate_grid(1, args.fw_n, WeightModel.integer(1, 9), seed=args.seed)
    D0 = adjacency_matrix(fw_graph)
    # a few random chords so the matrix is not a path
    rng = np.random.default_rng(args.seed)
    i, j = rng.integers(0, args.fw_n, (2, 4 * args.fw_n))
    D0[i, j] = D0[j, i] = rng.integers(1, 50, len(i))
    np.fill_diagonal(D0, 0)
    o = build_oracle(g, args.k, seed=args.seed)
    perm = o.permutation[random_pairs(g.n, args.queries, args.seed)]
    u1 = np.ascontiguousarray(perm[:, 0])
    u2 = np.ascontiguousarray(perm[:, 1])
    blob = np.random.default_rng(args.seed).integers(0, 256, args.crc_bytes, dtype=np.uint8)
    sources = np.arange(min(args.sources, g.n), dtype=np.int64)

    rows, results = [], {}
    for name in _backend.available():
        k = _backend.get(name)

        def fw():
            D = D0.copy()
            k.floyd_warshall(D, 64)
            return D

        def dij():
            out = np.empty((len(sources), g.n))
            k.dijkstra_rows(g.indptr, g.indices, g.weights, sources, out)
            return out

        def qry():
            out = np.empty(len(u1))
            k.query_many(*o.kernel_args(), u1, u2, out)
            return out

        cases = [
            (f"floyd_warshall n={args.fw_n}", fw),
            (f"dijkstra x{len(sources)} n={g.n}", dij),
            (f"query x{args.queries} k={args.k}", qry),
            (f"crc64 {args.crc_bytes} B", lambda: k.crc64(blob)),
        ]
        for label, fn in cases:
            sec, out = best_of(fn, args.repeat)
            rows.append({"kernel": label, "backend": name, "seconds": sec})
            results.setdefault(label, []).append(out)

    for label, outs in results.items():
        if any(not np.array_equal(outs[0], x) for x in outs[1:]):
            sys.exit(f"backends disagree on {label}")
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fw-n", type=int, default=256, help="Floyd-Warshall matrix size")
    ap.add_argument("--grid", type=int, default=96, help="side of the square test grid")
    ap.add_argument("--k", type=int, default=24)
    ap.add_argument("--queries", type=int, default=2000)
    ap.add_argument("--sources", type=int, default=20, help="Dijkstra sources")
    ap.add_argument("--crc-bytes", type=int, default=1 << 18)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", action="store_true")
    args = ap.parse_args(argv)

    rows = bench(args)
    if args.csv:
        w = csv.DictWriter(sys.stdout, ["kernel", "backend", "seconds"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return
    base = {r["kernel"]: r["seconds"] for r in rows if r["backend"] == "python"}
    print(f"{'kernel':34s} {'backend':8s} {'seconds':>10s} {'vs python':>10s}")
    for r in rows:
        ratio = base[r["kernel"]] / r["seconds"] if r["seconds"] else float("inf")
        print(f"{r['kernel']:34s} {r['backend']:8s} {r['seconds']:10.4f} {ratio:9.1f}x")


if __name__ == "__main__":
    main()
