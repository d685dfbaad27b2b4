"""In-process simulation of the multi-worker deployment.

Each worker owns the tables of its components. A query runs at the owner of
the source's component; when the target's component lives elsewhere, the
boundary prefix of the target's column is requested from that owner through
its message queue and the transfer is logged.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import itertools
import queue
import threading
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .query import QueryResult, _locate, _stats

POLICIES = ("round-robin", "pairs-per-gpu")
ENTRY_BYTES = 8


@dataclass(frozen=True, eq=False)
class Placement:
    p: int
    owner: np.ndarray

    @property
    def k(self):
        return len(self.owner)

    @property
    def components_of(self):
        return [np.flatnonzero(self.owner == w).tolist() for w in range(self.p)]

    def __eq__(self, other):
        if not isinstance(other, Placement):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.owner, other.owner)

    __hash__ = None


def place_components(k, p, policy="round-robin"):
    """Assign ``k`` components to ``p`` workers.

    ``round-robin`` gives worker ``i`` components ``i, i+p, i+2p, ...``;
    ``pairs-per-gpu`` gives each worker a contiguous run (two components
    each when ``k == 2p``). Either way worker loads differ by at most one.
    """
    if not 1 <= p <= k:
        raise ValueError(f"need 1 <= p <= k, got p={p}, k={k}")
    c = np.arange(k, dtype=np.int64)
    if policy == "round-robin":
        owner = c % p
    elif policy == "pairs-per-gpu":
        owner = c * p // k
    else:
        raise ValueError(f"unknown placement policy {policy!r}; expected one of {POLICIES}")
    return Placement(p, owner)


# ------------------------------------------------------------------ ledger


@dataclass(frozen=True)
class TransferRecord:
    query_id: int
    src_worker: int
    dst_worker: int
    entries: int

    @property
    def bytes(self):
        return self.entries * ENTRY_BYTES


@dataclass
class TransferLedger:
    records: list = field(default_factory=list)

    def add(self, rec):
        self.records.append(rec)

    @property
    def total_entries(self):
        return sum(r.entries for r in self.records)

    @property
    def total_bytes(self):
        return sum(r.bytes for r in self.records)

    def __len__(self):
        return len(self.records)

    def to_csv(self, fh=None):
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["query_id", "src_worker", "dst_worker", "entries", "bytes"])
        for r in self.records:
            w.writerow([r.query_id, r.src_worker, r.dst_worker, r.entries, r.bytes])
        return out.getvalue() if fh is None else None


@dataclass(frozen=True)
class LatencyModel:
    """Cost model for one routed query, in seconds.

    With overlap, the transfer runs while the first stitching loop computes.
    """

    op_s: float = 1e-9
    link_latency_s: float = 5e-6
    bandwidth_Bps: float = 5e9

    def estimate(self, stats):
        nb1, nb2 = stats.boundary_sizes
        first = nb1 * nb2 * self.op_s
        second = nb2 * self.op_s
        transfer = 0.0
        if stats.transfer_entries:
            transfer = self.link_latency_s + stats.transfer_entries * ENTRY_BYTES / self.bandwidth_Bps
        return {
            "overlapped_s": max(first, transfer) + second,
            "sequential_s": first + transfer + second,
        }


# ----------------------------------------------------------------- workers


class _Worker:
    def __init__(self, wid, oracle, comps):
        self.wid = wid
        self.comps = set(comps)
        self._ct = {c: oracle.component_tables[c] for c in comps}
        self._bt = {c: oracle.boundary_tables[c] for c in comps}
        self.requests = queue.Queue()
        self.store = queue.Queue()
        self._threads = [
            threading.Thread(target=self._serve_queries, daemon=True),
            threading.Thread(target=self._serve_columns, daemon=True),
        ]

    def start(self, cluster):
        self.cluster = cluster
        for t in self._threads:
            t.start()

    def stop(self):
        self.requests.put(None)
        self.store.put(None)
        for t in self._threads:
            t.join()

    def _serve_columns(self):
        while (msg := self.store.get()) is not None:
            c, local, count, reply = msg
            reply.put(np.ascontiguousarray(self._ct[c][:count, local]))

    def _serve_queries(self):
        while (msg := self.requests.get()) is not None:
            qid, u1, u2, reply = msg
            try:
                reply.put(self._answer(qid, u1, u2))
            except Exception as exc:  # surfaced to the caller
                reply.put(exc)

    def _answer(self, qid, u1, u2):
        o = self.cluster.oracle
        k = _backend.kernels
        lay = o.layout
        c1, c2 = int(o._comp_of[u1]), int(o._comp_of[u2])
        l1, l2 = u1 - int(lay.offsets[c1]), u2 - int(lay.offsets[c2])
        nb1, nb2 = int(lay.nboundary[c1]), int(lay.nboundary[c2])
        g2 = int(o._bg_offsets[c2])
        ct1 = self._ct[c1]
        via = k.stitch_boundary(np.ascontiguousarray(ct1[l1, :nb1]),
                                np.ascontiguousarray(self._bt[c1][:, g2:g2 + nb2]))
        record = None
        owner2 = int(self.cluster.placement.owner[c2])
        if owner2 == self.wid:
            column = np.ascontiguousarray(self._ct[c2][:nb2, l2])
        else:
            reply = queue.Queue(maxsize=1)
            self.cluster.workers[owner2].store.put((c2, l2, nb2, reply))
            column = reply.get()
            record = TransferRecord(qid, owner2, self.wid, len(column))
        best = k.min_plus_combine(via, column)
        if c1 == c2:
            best = min(best, float(ct1[l1, l2]))
        return float(best), record


class Cluster:
    """Workers holding disjoint component tables; queries routed to the source's owner."""

    def __init__(self, oracle, placement=None):
        if placement is None:
            placement = oracle.placement
        if placement.k != oracle.k:
            raise ValueError(f"placement covers {placement.k} components, oracle has {oracle.k}")
        if placement != oracle.placement:
            oracle = dataclasses.replace(oracle, placement=placement)
        self.oracle = oracle
        self.placement = placement
        self.ledger = TransferLedger()
        self._ids = itertools.count()
        self._lock = threading.Lock()
        self.workers = [_Worker(w, self.oracle, comps)
                        for w, comps in enumerate(placement.components_of)]
        for w in self.workers:
            w.start(self)

    def close(self):
        for w in self.workers:
            w.stop()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def routed_query(self, v1, v2):
        o = self.oracle
        u1, u2 = _locate(o, v1, v2)
        qid = next(self._ids)
        owner1 = int(self.placement.owner[o._comp_of[u1]])
        reply = queue.Queue(maxsize=1)
        self.workers[owner1].requests.put((qid, u1, u2, reply))
        got = reply.get()
        if isinstance(got, Exception):
            raise got
        dist, record = got
        if record is not None:
            with self._lock:
                self.ledger.add(record)
        return QueryResult(dist, _stats(o, u1, u2)), record

    def run_batch(self, pairs):
        return [self.routed_query(int(a), int(b))[0] for a, b in pairs]


def routed_query(o, pl, v1, v2):
    """One query through a throwaway cluster; returns ``(result, record or None)``."""
    with Cluster(o, pl) as cl:
        return cl.routed_query(v1, v2)


# --------------------------------------------------------------- schedules


@dataclass(frozen=True)
class BuildSchedule:
    loads: np.ndarray
    makespan: float
    mean_load: float

    @property
    def gap(self):
        return self.makespan - self.mean_load


def simulate_build_schedule(k, p, component_costs, policy="round-robin"):
    """Per-worker summed cost when each worker processes the components it owns."""
    costs = np.asarray(component_costs, dtype=np.float64)
    if len(costs) != k:
        raise ValueError(f"expected {k} costs, got {len(costs)}")
    if np.any(costs < 0):
        raise ValueError("costs must be nonnegative")
    pl = place_components(k, p, policy)
    loads = np.bincount(pl.owner, weights=costs, minlength=p)
    return BuildSchedule(loads, float(loads.max()), float(loads.mean()))
