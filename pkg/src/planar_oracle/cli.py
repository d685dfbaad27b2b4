"""Command-line front end: generate, preprocess, query, verify, bench."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from . import _backend
from .graph import (
    FORMATS,
    GraphError,
    WeightModel,
    generate_grid,
    generate_triangulated_grid,
    load_graph,
    save_graph,
)
from .oracle import build_oracle
from .query import query
from .storage import OracleFileError, load_oracle, save_oracle
from .verify import all_pairs, random_pairs, verify_oracle

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VERIFY = 3

BENCH_COLUMNS = [
    "k", "p", "status", "n", "boundary_total", "bg_edges",
    "partition_s", "component_apsp_s", "boundary_s", "stored_entries",
    "queries", "mean_minplus_ops", "mean_query_us", "transfer_bytes",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_k(n):
    """``ceil(sqrt(n))``: balances per-component tables against the boundary tables."""
    return max(1, math.isqrt(n - 1) + 1) if n > 1 else 1


def _grid_dims(text):
    try:
        r, c = text.lower().split("x")
        r, c = int(r), int(c)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS, got {text!r}") from None
    if r < 1 or c < 1:
        raise argparse.ArgumentTypeError(f"grid dimensions must be positive, got {text!r}")
    return r, c


def _int_list(text):
    if not text.strip():
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _lo_hi(text):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}") from None
    return lo, hi


def build_parser():
    p = _Parser(prog="planar-oracle", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic planar graph")
    g.add_argument("--grid", type=_grid_dims, required=True, metavar="ROWSxCOLS")
    g.add_argument("--triangulated", action="store_true", help="add one diagonal per cell")
    w = g.add_mutually_exclusive_group()
    w.add_argument("--unit", action="store_true", help="all weights 1 (default)")
    w.add_argument("--uniform", type=_lo_hi, metavar="LO,HI")
    w.add_argument("--integer", type=_lo_hi, metavar="LO,HI")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--format", choices=FORMATS, default="edge-list")

    pre = sub.add_parser("preprocess", help="build an oracle file")
    pre.add_argument("-i", "--input", required=True)
    pre.add_argument("-o", "--output", required=True)
    pre.add_argument("--format", choices=FORMATS, default="edge-list")
    pre.add_argument("--k", type=int, help="components (default ceil(sqrt(n)))")
    pre.add_argument("-p", "--workers", type=int, default=1)
    pre.add_argument("--seed", type=int, default=0)
    pre.add_argument("--partition-out", help="also write 'vertex component boundary_flag' lines")

    q = sub.add_parser("query", help="answer distance queries from an oracle file")
    q.add_argument("-i", "--input", required=True, help="oracle file")
    q.add_argument("--pair", nargs=2, type=int, action="append", metavar=("V1", "V2"))
    q.add_argument("--pairs", metavar="FILE", help="file of 'v1 v2' lines")
    q.add_argument("--random-pairs", type=int, metavar="N")
    q.add_argument("-p", "--workers", type=int, default=1)
    q.add_argument("--seed", type=int, default=0)

    v = sub.add_parser("verify", help="check an oracle against Dijkstra")
    v.add_argument("-i", "--input", required=True, help="graph file")
    v.add_argument("--oracle", required=True)
    v.add_argument("--format", choices=FORMATS, default="edge-list")
    v.add_argument("--pairs", metavar="FILE")
    v.add_argument("--random-pairs", type=int, metavar="N",
                   help="sample N pairs (default: every pair when n <= 2000, else 10000)")
    v.add_argument("--seed", type=int, default=0)

    b = sub.add_parser("bench", help="sweep k (and p) and emit CSV measurements")
    b.add_argument("-i", "--input", required=True)
    b.add_argument("--format", choices=FORMATS, default="edge-list")
    b.add_argument("--sweep-k", type=_int_list, required=True, metavar="LIST")
    b.add_argument("--sweep-p", type=_int_list, default=[1], metavar="LIST")
    b.add_argument("--random-pairs", type=int, default=1000, metavar="N")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("-o", "--output", help="CSV path (default stdout)")
    return p


def _read_pairs(path):
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.split("#", 1)[0].split()
            if not s:
                continue
            if len(s) != 2:
                raise UsageError(f"{path}:{lineno}: expected 'v1 v2'")
            pairs.append((int(s[0]), int(s[1])))
    return pairs


def _fmt(d):
    return "inf" if math.isinf(d) else f"{d:.17g}"


def cmd_generate(args, out):
    if args.uniform:
        model = WeightModel.uniform(*args.uniform)
    elif args.integer:
        model = WeightModel.integer(*args.integer)
    else:
        model = WeightModel.unit()
    rows, cols = args.grid
    gen = generate_triangulated_grid if args.triangulated else generate_grid
    g = gen(rows, cols, model, args.seed)
    save_graph(g, args.output, args.format)
    print(json.dumps({"n": g.n, "m": g.m, "output": args.output}), file=out)


def cmd_preprocess(args, out):
    g = load_graph(args.input, args.format)
    k = args.k if args.k is not None else default_k(g.n)
    if not 1 <= k <= g.n:
        raise UsageError(f"--k must be in 1..{g.n}, got {k}")
    if args.workers < 1:
        raise UsageError(f"--workers must be >= 1, got {args.workers}")
    o = build_oracle(g, k, args.workers, args.seed)
    t = time.perf_counter()
    save_oracle(o, args.output)
    if args.partition_out:
        with open(args.partition_out, "w") as fh:
            fh.write(o.partition.to_text())
    elapsed = dict(o.stats, save_s=time.perf_counter() - t)
    stats = {
        "n": g.n,
        "k": k,
        "p": o.placement.p,
        "boundary_total": o.b,
        "bg_edges": o.boundary_graph.num_edges,
        "stored_entries": o.stored_entries,
        "peak_table_entries_per_worker": int(o.table_entries_per_worker().max()),
        "elapsed": {key: round(val, 6) for key, val in elapsed.items()},
        "backend": _backend.BACKEND,
    }
    print(json.dumps(stats, indent=2), file=out)


def cmd_query(args, out):
    o = load_oracle(args.input, args.workers)
    pairs = [tuple(p) for p in args.pair or []]
    if args.pairs:
        pairs += _read_pairs(args.pairs)
    if args.random_pairs:
        pairs += [tuple(p) for p in random_pairs(o.n, args.random_pairs, args.seed).tolist()]
    if not pairs:
        raise UsageError("no query pairs: use --pair, --pairs or --random-pairs")
    for v1, v2 in pairs:
        if not (0 <= v1 < o.n and 0 <= v2 < o.n):
            raise UsageError(f"vertex id out of range 0..{o.n - 1} in pair ({v1}, {v2})")
    for v1, v2 in pairs:
        r = query(o, v1, v2)
        print(f"{v1} {v2} {_fmt(r.distance)} {r.stats.minplus_ops} {r.stats.transfer_entries}",
              file=out)


def cmd_verify(args, out):
    g = load_graph(args.input, args.format)
    o = load_oracle(args.oracle)
    if o.n != g.n:
        raise UsageError(f"oracle has n={o.n} but graph has n={g.n}")
    if args.pairs:
        pairs = np.array(_read_pairs(args.pairs), dtype=np.int64).reshape(-1, 2)
        if len(pairs) and (pairs.min() < 0 or pairs.max() >= g.n):
            raise UsageError(f"vertex id out of range 0..{g.n - 1}")
    elif args.random_pairs is not None:
        pairs = random_pairs(g.n, args.random_pairs, args.seed)
    elif g.n <= 2000:
        pairs = all_pairs(g.n)
    else:
        pairs = random_pairs(g.n, 10_000, args.seed)
    report = verify_oracle(g, o, pairs)
    print(json.dumps(report.to_dict(), indent=2), file=out)
    return EXIT_OK if report.ok else EXIT_VERIFY


def bench_rows(g, ks, ps, n_pairs=1000, seed=0):
    """One dict per (k, p); invalid configurations carry an error status."""
    pairs = random_pairs(g.n, n_pairs, seed)
    rows = []
    for k in ks:
        if not 1 <= k <= g.n:
            rows += [{"k": k, "p": p, "status": f"error: k must be in 1..{g.n}"} for p in ps]
            continue
        base = None
        for p in ps:
            if not 1 <= p <= k:
                rows.append({"k": k, "p": p, "status": f"error: p must be in 1..{k}"})
                continue
            if base is None:
                base = build_oracle(g, k, p, seed)
            o = base.with_placement(p)
            ops = transfer = 0
            t = time.perf_counter()
            for v1, v2 in pairs.tolist():
                r = query(o, v1, v2)
                ops += r.stats.minplus_ops
                transfer += r.stats.transfer_entries
            elapsed = time.perf_counter() - t
            rows.append({
                "k": k, "p": p, "status": "ok", "n": g.n,
                "boundary_total": o.b,
                "bg_edges": o.boundary_graph.num_edges,
                "partition_s": round(o.stats["partition_s"], 6),
                "component_apsp_s": round(o.stats["component_apsp_s"], 6),
                "boundary_s": round(o.stats["boundary_s"], 6),
                "stored_entries": o.stored_entries,
                "queries": len(pairs),
                "mean_minplus_ops": ops / len(pairs) if len(pairs) else 0.0,
                "mean_query_us": round(1e6 * elapsed / len(pairs), 3) if len(pairs) else 0.0,
                "transfer_bytes": 8 * transfer,
            })
    return rows


def cmd_bench(args, out):
    g = load_graph(args.input, args.format)
    rows = bench_rows(g, args.sweep_k, args.sweep_p, args.random_pairs, args.seed)
    fh = open(args.output, "w", newline="") if args.output else out
    try:
        w = csv.DictWriter(fh, BENCH_COLUMNS, restval="", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.output:
            fh.close()


COMMANDS = {
    "generate": cmd_generate,
    "preprocess": cmd_preprocess,
    "query": cmd_query,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out) or EXIT_OK
    except UsageError as exc:
        print(f"planar-oracle: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, OracleFileError, GraphError) as exc:
        print(f"planar-oracle: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
