import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_force_distance, cycle_graph, grid_2x3, partition_2x3, scipy_apsp
from planar_oracle.graph import Graph, WeightModel, generate_grid, generate_triangulated_grid
from planar_oracle.oracle import build_oracle
from planar_oracle.partition import make_partition
from planar_oracle.query import (
    OracleMismatchError,
    batch_distances,
    batch_query,
    check_compatible,
    query,
    query_parallel_inner,
)
from planar_oracle.verify import all_pairs, random_pairs

inf = np.inf


@pytest.fixture
def o23():
    g = grid_2x3()
    return build_oracle(g, 2, partition=partition_2x3(g))


def test_query_2x3(o23, backend):
    r = query(o23, 0, 5, backend=backend)
    assert r.distance == 3 == brute_force_distance(grid_2x3(), 0, 5)
    assert r.stats.boundary_sizes == (2, 2)
    assert r.stats.minplus_ops == 2 * 2 + 2
    assert not r.stats.same_component


def test_query_diagonal(o23, backend):
    for v in range(6):
        assert query(o23, v, v, backend=backend).distance == 0


def test_query_unreachable(backend):
    g = Graph.from_edges(2, [])
    o = build_oracle(g, 2, partition=make_partition(g, [0, 1], 2), backend=backend)
    r = query(o, 0, 1, backend=backend)
    assert r.distance == inf
    assert r.stats.minplus_ops == 0


def test_query_out_of_range(o23):
    with pytest.raises(IndexError):
        query(o23, 0, 6)
    with pytest.raises(IndexError):
        query(o23, -1, 0)
    with pytest.raises(IndexError):
        batch_distances(o23, [(0, 99)])


def test_weighted_cycle_matches_brute_force(backend):
    # the cheap way round from 1 to 2 leaves component {0..3}
    g = cycle_graph(8, {(1, 2): 10.0})
    o = build_oracle(g, 2, partition=make_partition(g, [0, 0, 0, 0, 1, 1, 1, 1], 2),
                     backend=backend)
    for v1 in range(8):
        for v2 in range(8):
            assert query(o, v1, v2, backend=backend).distance == brute_force_distance(g, v1, v2)
    assert query(o, 1, 2, backend=backend).distance == 7


def test_same_component_detour_through_other_component(backend):
    # 0 and 2 share a component but their shortest route runs through vertex 1
    g = Graph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)])
    o = build_oracle(g, 2, partition=make_partition(g, [0, 1, 0], 2), backend=backend)
    r = query(o, 0, 2, backend=backend)
    assert r.distance == 2
    assert r.stats.same_component


@pytest.mark.parametrize("k", [1, 2, 3, 7, 30])
def test_exhaustive_small(k, backend):
    g = generate_triangulated_grid(5, 6, WeightModel.integer(1, 9), seed=k)
    o = build_oracle(g, k, seed=1, backend=backend)
    D = scipy_apsp(g)
    got = batch_distances(o, all_pairs(g.n), backend=backend).reshape(g.n, g.n)
    assert np.array_equal(got, D)


def test_disconnected_graph_exhaustive(backend):
    g = Graph.from_edges(8, [(0, 1, 1.0), (1, 2, 2.0), (4, 5, 1.0), (5, 6, 1.0), (6, 7, 3.0)])
    o = build_oracle(g, 3, seed=2, backend=backend)
    got = batch_distances(o, all_pairs(8), backend=backend).reshape(8, 8)
    assert np.array_equal(got, scipy_apsp(g))


def test_symmetry(backend):
    g = generate_grid(9, 9, WeightModel.integer(1, 5), seed=3)
    o = build_oracle(g, 6, backend=backend)
    pairs = random_pairs(g.n, 300, seed=4)
    a = batch_distances(o, pairs, backend=backend)
    b = batch_distances(o, pairs[:, ::-1], backend=backend)
    assert np.array_equal(a, b)


def test_parallel_inner_matches_sequential(o23):
    for w in (1, 2, 8):
        r = query_parallel_inner(o23, 0, 5, w)
        assert r == query(o23, 0, 5)
    g = generate_triangulated_grid(12, 12, WeightModel.integer(1, 9), seed=1)
    o = build_oracle(g, 6, seed=3)
    for v1, v2 in random_pairs(g.n, 200, seed=5).tolist():
        seq = query(o, v1, v2)
        for w in (1, 3, 8, 1000):
            assert query_parallel_inner(o, v1, v2, w) == seq


def test_batch_query(o23):
    pairs = [(0, 5), (4, 4), (5, 0)]
    res = batch_query(o23, pairs)
    assert [r.distance for r in res] == [3, 0, 3]
    assert res[0] == query(o23, 0, 5)
    assert batch_query(o23, []) == []
    assert len(batch_distances(o23, np.empty((0, 2), dtype=int))) == 0


def test_batch_worker_counts_agree():
    g = generate_grid(30, 30, WeightModel.integer(1, 9), seed=6)
    o = build_oracle(g, 10, seed=2)
    pairs = random_pairs(g.n, 2000, seed=7)
    base = batch_distances(o, pairs)
    for w in (2, 4, 7):
        assert np.array_equal(batch_distances(o, pairs, workers=w), base)
    assert [r.distance for r in batch_query(o, pairs[:50], workers=3)] == base[:50].tolist()


def test_batch_matches_single_queries(backend):
    g = generate_triangulated_grid(14, 9, WeightModel.uniform(0.1, 3.0), seed=2)
    o = build_oracle(g, 5, backend=backend)
    pairs = random_pairs(g.n, 400, seed=9)
    got = batch_distances(o, pairs, backend=backend)
    single = [query(o, a, b, backend=backend).distance for a, b in pairs.tolist()]
    assert got.tolist() == single


@pytest.mark.slow
def test_sampled_against_dijkstra_256_k16():
    from planar_oracle.shortest_paths import dijkstra_sssp
    g = generate_grid(256, 256)
    o = build_oracle(g, 16, seed=0)
    pairs = random_pairs(g.n, 10_000, seed=1)
    got = batch_distances(o, pairs)
    # unit-weight grid: distance is the Manhattan distance
    r1, c1 = np.divmod(pairs[:, 0], 256)
    r2, c2 = np.divmod(pairs[:, 1], 256)
    assert np.array_equal(got, np.abs(r1 - r2) + np.abs(c1 - c2))
    for s in np.unique(pairs[:50, 0]):
        m = pairs[:, 0] == s
        assert np.array_equal(got[m], dijkstra_sssp(g, int(s))[pairs[m, 1]])


def test_check_compatible():
    g = grid_2x3()
    o = build_oracle(g, 2, partition=partition_2x3(g))
    check_compatible(o, g)
    with pytest.raises(OracleMismatchError):
        check_compatible(o, generate_grid(3, 3))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.data(), st.booleans())
def test_exact_for_random_graphs_and_partitions(rows, cols, data, tri):
    n = rows * cols
    k = data.draw(st.integers(1, n))
    seed = data.draw(st.integers(0, 1000))
    gen = generate_triangulated_grid if tri else generate_grid
    g = gen(rows, cols, WeightModel.integer(0, 7), seed)
    assignment = data.draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    o = build_oracle(g, k, partition=make_partition(g, assignment, k))
    got = batch_distances(o, all_pairs(n)).reshape(n, n)
    assert np.array_equal(got, scipy_apsp(g))
