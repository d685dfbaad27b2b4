"""Shortest-distance oracle for planar-style graphs.

Preprocessing splits the graph into k components, stores all-pairs
distances inside each component and between all boundary vertices, and
answers point-to-point queries by stitching those tables together.
"""

from ._backend import BACKEND
from .cluster import (
    Cluster,
    LatencyModel,
    Placement,
    TransferLedger,
    place_components,
    routed_query,
    simulate_build_schedule,
)
from .graph import (
    Graph,
    WeightModel,
    generate_grid,
    generate_triangulated_grid,
    load_graph,
    save_graph,
    validate,
)
from .oracle import Oracle, boundary_apsp, build_boundary_graph, build_oracle
from .partition import Partition, compute_boundary, partition_graph, reorder_vertices
from .query import QueryResult, batch_query, query, query_parallel_inner
from .shortest_paths import apsp_dense, dijkstra_sssp, min_plus_combine
from .storage import load_oracle, save_oracle

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Cluster",
    "Graph",
    "LatencyModel",
    "Oracle",
    "Partition",
    "Placement",
    "QueryResult",
    "TransferLedger",
    "WeightModel",
    "apsp_dense",
    "batch_query",
    "boundary_apsp",
    "build_boundary_graph",
    "build_oracle",
    "compute_boundary",
    "dijkstra_sssp",
    "generate_grid",
    "generate_triangulated_grid",
    "load_graph",
    "load_oracle",
    "min_plus_combine",
    "partition_graph",
    "place_components",
    "query",
    "query_parallel_inner",
    "reorder_vertices",
    "routed_query",
    "save_graph",
    "save_oracle",
    "simulate_build_schedule",
    "validate",
]
