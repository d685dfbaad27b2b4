import csv
import io
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import grid_2x3, partition_2x3
from planar_oracle.cluster import (
    Cluster,
    LatencyModel,
    TransferLedger,
    TransferRecord,
    place_components,
    routed_query,
    simulate_build_schedule,
)
from planar_oracle.graph import WeightModel, generate_grid, generate_triangulated_grid
from planar_oracle.oracle import build_oracle
from planar_oracle.query import query
from planar_oracle.verify import random_pairs


@pytest.fixture(scope="module")
def o23():
    g = grid_2x3()
    return build_oracle(g, 2, partition=partition_2x3(g))


@pytest.fixture(scope="module")
def medium():
    g = generate_triangulated_grid(16, 16, WeightModel.integer(1, 9), seed=2)
    return g, build_oracle(g, 12, seed=1)


def test_round_robin_k8_p4():
    pl = place_components(8, 4)
    assert pl.components_of == [[0, 4], [1, 5], [2, 6], [3, 7]]


def test_k_equals_p():
    for policy in ("round-robin", "pairs-per-gpu"):
        assert place_components(5, 5, policy).owner.tolist() == [0, 1, 2, 3, 4]


def test_k5_p2_sizes():
    for policy in ("round-robin", "pairs-per-gpu"):
        sizes = sorted(len(c) for c in place_components(5, 2, policy).components_of)
        assert sizes == [2, 3]


def test_pairs_per_gpu_contiguous():
    assert place_components(8, 4, "pairs-per-gpu").components_of == [[0, 1], [2, 3], [4, 5], [6, 7]]


def test_placement_errors():
    with pytest.raises(ValueError):
        place_components(3, 4)
    with pytest.raises(ValueError):
        place_components(3, 0)
    with pytest.raises(ValueError):
        place_components(3, 2, "random")


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 200), st.data(), st.sampled_from(["round-robin", "pairs-per-gpu"]))
def test_placement_balanced(k, data, policy):
    p = data.draw(st.integers(1, k))
    pl = place_components(k, p, policy)
    counts = np.bincount(pl.owner, minlength=p)
    assert counts.sum() == k
    assert counts.max() - counts.min() <= 1


def test_routed_query_2x3(o23):
    pl = place_components(2, 2)
    r, rec = routed_query(o23, pl, 0, 5)
    assert r.distance == 3
    assert rec.entries == 2 and rec.bytes == 16
    assert (rec.src_worker, rec.dst_worker) == (1, 0)


def test_routed_query_single_worker(o23):
    r, rec = routed_query(o23, place_components(2, 1), 0, 5)
    assert r.distance == 3 and rec is None


def test_routed_query_same_component(o23):
    r, rec = routed_query(o23, place_components(2, 2), 0, 4)
    assert r.distance == 2 and rec is None


def test_routing_never_changes_answers(medium):
    g, o = medium
    pairs = random_pairs(g.n, 300, seed=3)
    expect = [query(o, a, b).distance for a, b in pairs.tolist()]
    for p, policy in [(1, "round-robin"), (3, "round-robin"), (6, "pairs-per-gpu"), (12, "round-robin")]:
        with Cluster(o, place_components(o.k, p, policy)) as cl:
            got = [r.distance for r in cl.run_batch(pairs)]
        assert got == expect


def test_ledger_accounting_identity(medium):
    g, o = medium
    pairs = random_pairs(g.n, 500, seed=4)
    for p in (1, 2, 5):
        pl = place_components(o.k, p)
        with Cluster(o, pl) as cl:
            cl.run_batch(pairs)
            ledger = cl.ledger
        a = o.partition.assignment
        nb = o.partition.boundary_sizes
        expect = sum(int(nb[a[v2]]) for v1, v2 in pairs.tolist()
                     if pl.owner[a[v1]] != pl.owner[a[v2]])
        assert ledger.total_bytes == 8 * expect
        if p == 1:
            assert len(ledger) == 0


def test_concurrent_queries_do_not_deadlock(medium):
    g, o = medium
    pairs = random_pairs(g.n, 400, seed=8)
    expect = [query(o, a, b).distance for a, b in pairs.tolist()]
    got = [None] * len(pairs)
    with Cluster(o, place_components(o.k, 4)) as cl:
        def run(lo):
            for i in range(lo, len(pairs), 8):
                got[i] = cl.routed_query(*map(int, pairs[i]))[0].distance
        threads = [threading.Thread(target=run, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join(timeout=60)
        assert not any(t.is_alive() for t in threads)
        assert len({r.query_id for r in cl.ledger.records}) == len(cl.ledger)
    assert got == expect


def test_cluster_placement_mismatch(o23):
    with pytest.raises(ValueError):
        Cluster(o23, place_components(3, 1))


def test_ledger_csv():
    led = TransferLedger()
    led.add(TransferRecord(0, 1, 0, 2))
    led.add(TransferRecord(3, 2, 1, 5))
    rows = list(csv.reader(io.StringIO(led.to_csv())))
    assert rows[0] == ["query_id", "src_worker", "dst_worker", "entries", "bytes"]
    assert rows[1:] == [["0", "1", "0", "2", "16"], ["3", "2", "1", "5", "40"]]
    assert led.total_entries == 7 and led.total_bytes == 56


def test_latency_model(o23):
    lm = LatencyModel(op_s=1.0, link_latency_s=0.0, bandwidth_Bps=8.0)
    r = query(o23, 0, 5)
    local = lm.estimate(r.stats)
    assert local["overlapped_s"] == local["sequential_s"] == 6.0
    remote = lm.estimate(query(o23.with_placement(2), 0, 5).stats)
    # first loop 4, transfer 2 entries * 8 B / 8 B/s = 2, second loop 2
    assert remote["sequential_s"] == 8.0
    assert remote["overlapped_s"] == 6.0


def test_schedule_equal_costs():
    s = simulate_build_schedule(8, 4, [1.0] * 8)
    assert s.makespan == 2.0 and s.gap == 0


def test_schedule_dominant_cost():
    s = simulate_build_schedule(4, 4, [10, 1, 1, 1])
    assert s.makespan == 10


def test_schedule_from_measured_boundary_costs():
    g = generate_grid(64, 64)
    o = build_oracle(g, 16, seed=0)
    costs = o.partition.boundary_sizes * o.boundary_graph.num_edges
    s = simulate_build_schedule(16, 4, costs)
    assert s.loads.sum() == costs.sum()
    assert s.makespan >= s.mean_load
    assert s.gap == s.makespan - s.mean_load


def test_schedule_errors():
    with pytest.raises(ValueError):
        simulate_build_schedule(3, 2, [1, 2])
    with pytest.raises(ValueError):
        simulate_build_schedule(2, 2, [1, -1])
