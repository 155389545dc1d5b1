"""Graph statistics: components, exact diameter, degrees, and entropies."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse import csgraph

from .rtg import TransitionGraph, largest_component

_BFS_BATCH = 256


@dataclass(frozen=True)
class RtgMetrics:
    """Summary statistics of one transition graph.

    diameter is measured on the largest connected component; everything else
    covers the full graph. Entropies are in nats.
    """

    node_count: int
    edge_count: int
    component_count: int
    largest_component_size: int
    avg_degree: float
    max_degree: int
    diameter: int
    entropy_uniform: float
    entropy_empirical: float


def _to_csr(graph: TransitionGraph) -> csr_matrix:
    n = graph.node_count
    indptr = np.zeros(n + 1, dtype=np.int64)
    for i, adj in enumerate(graph.adjacency):
        indptr[i + 1] = indptr[i] + len(adj)
    indices = np.fromiter(
        (j for adj in graph.adjacency for j in adj), dtype=np.int64, count=indptr[-1]
    )
    data = np.ones(indptr[-1], dtype=np.int8)
    return csr_matrix((data, indices, indptr), shape=(n, n))


def connected_components(graph: TransitionGraph) -> tuple[int, np.ndarray]:
    """Component count and a dense label per node.

    Labels start at 0 and are assigned in order of each component's smallest
    node_id, so the labeling is independent of the underlying traversal.
    """
    if graph.node_count == 0:
        raise ValueError("graph has no nodes")
    n_comp, raw = csgraph.connected_components(_to_csr(graph), directed=False)
    # normalize: rank raw labels by first occurrence over increasing node_id
    order = {}
    for label in raw:
        if label not in order:
            order[label] = len(order)
    labels = np.array([order[label] for label in raw], dtype=np.int64)
    return int(n_comp), labels


def diameter(graph: TransitionGraph) -> int:
    """Exact diameter: max shortest-path length over all node pairs.

    Runs a breadth-first search from every node (batched through scipy's
    C implementation). Disconnected graphs are rejected; callers pass the
    largest component.
    """
    n = graph.node_count
    if n == 0:
        raise ValueError("graph has no nodes")
    if n == 1:
        return 0
    n_comp, _ = connected_components(graph)
    if n_comp != 1:
        raise ValueError(f"graph is disconnected ({n_comp} components)")
    adj = _to_csr(graph)
    best = 0.0
    for start in range(0, n, _BFS_BATCH):
        sources = np.arange(start, min(start + _BFS_BATCH, n))
        dist = csgraph.shortest_path(
            adj, method="D", unweighted=True, directed=False, indices=sources
        )
        best = max(best, float(dist.max()))
    return int(best)


def degree_stats(graph: TransitionGraph) -> tuple[float, int, dict[int, int]]:
    """(average degree, max degree, histogram keyed by degree)."""
    if graph.node_count == 0:
        raise ValueError("graph has no nodes")
    degrees = [len(adj) for adj in graph.adjacency]
    avg = 2.0 * graph.edge_count / graph.node_count
    hist: dict[int, int] = {}
    for deg in degrees:
        hist[deg] = hist.get(deg, 0) + 1
    return avg, max(degrees), hist


def entropy_uniform(graph: TransitionGraph) -> float:
    """Entropy of a uniform distribution over nodes: ln |V|."""
    if graph.node_count == 0:
        raise ValueError("graph has no nodes")
    return math.log(graph.node_count)


def entropy_empirical(graph: TransitionGraph) -> float:
    """Shannon entropy of the sample-count (volume proxy) distribution."""
    counts = np.array([node.sample_count for node in graph.nodes], dtype=np.float64)
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum())


def compute_metrics(graph: TransitionGraph) -> RtgMetrics:
    """All graph metrics in one pass; diameter on the largest component."""
    n_comp, _ = connected_components(graph)
    if n_comp == 1:
        lcc, lcc_size = graph, graph.node_count
    else:
        lcc_graph, kept = largest_component(graph)
        lcc, lcc_size = lcc_graph, len(kept)
    avg_deg, max_deg, _ = degree_stats(graph)
    return RtgMetrics(
        node_count=graph.node_count,
        edge_count=graph.edge_count,
        component_count=n_comp,
        largest_component_size=lcc_size,
        avg_degree=avg_deg,
        max_degree=max_deg,
        diameter=diameter(lcc),
        entropy_uniform=entropy_uniform(graph),
        entropy_empirical=entropy_empirical(graph),
    )
