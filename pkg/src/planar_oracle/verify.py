"""Ground-truth checks of a built oracle against per-source Dijkstra."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .query import batch_distances, check_compatible
from .shortest_paths import dijkstra_rows, dijkstra_sssp

BOUNDARY_CHECK_LIMIT = 2000


@dataclass
class VerifyReport:
    pairs_checked: int = 0
    mismatches: int = 0
    boundary_checked: bool = False
    boundary_pairs: int = 0
    boundary_violations: int = 0
    examples: list = field(default_factory=list)

    @property
    def ok(self):
        return self.mismatches == 0 and self.boundary_violations == 0

    def to_dict(self):
        d = asdict(self)
        d["ok"] = self.ok
        return d


def all_pairs(n):
    v = np.arange(n, dtype=np.int64)
    return np.stack(np.meshgrid(v, v, indexing="ij"), axis=-1).reshape(-1, 2)


def random_pairs(n, count, seed=0):
    return np.random.default_rng(seed).integers(0, n, size=(count, 2), dtype=np.int64)


def check_queries(g, o, pairs, report=None, max_examples=10):
    """Compare oracle answers with Dijkstra from each distinct source."""
    report = report or VerifyReport()
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    got = batch_distances(o, pairs)
    order = np.argsort(pairs[:, 0], kind="stable")
    sources, starts = np.unique(pairs[order, 0], return_index=True)
    bounds = np.append(starts, len(order))
    for s, lo, hi in zip(sources.tolist(), bounds[:-1], bounds[1:]):
        idx = order[lo:hi]
        truth = dijkstra_sssp(g, s)[pairs[idx, 1]]
        bad = idx[got[idx] != truth]
        report.mismatches += len(bad)
        for i in bad[: max(0, max_examples - len(report.examples))]:
            report.examples.append(
                {"v1": int(pairs[i, 0]), "v2": int(pairs[i, 1]),
                 "oracle": float(got[i]), "truth": float(truth[pairs[idx, 1] == pairs[i, 1]][0])}
            )
    report.pairs_checked += len(pairs)
    return report


def check_boundary_distances(g, o, report=None):
    """BG distances between boundary vertices must equal distances in ``g``."""
    report = report or VerifyReport()
    bg = o.boundary_graph
    if bg.b == 0:
        report.boundary_checked = True
        return report
    originals = o.partition.inverse_permutation[bg.global_of]
    truth = dijkstra_rows(g, originals)[:, originals]
    report.boundary_checked = True
    report.boundary_pairs += bg.b * bg.b
    report.boundary_violations += int(np.count_nonzero(truth != o.boundary_tables.matrix))
    return report


def verify_oracle(g, o, pairs=None, *, boundary_limit=BOUNDARY_CHECK_LIMIT):
    """Full check: every pair when ``pairs`` is None, plus boundary-distance checks on small BGs."""
    check_compatible(o, g)
    if pairs is None:
        pairs = all_pairs(g.n)
    report = check_queries(g, o, pairs)
    if o.b <= boundary_limit:
        check_boundary_distances(g, o, report)
    return report
