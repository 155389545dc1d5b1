"""Degree-based graph pruning with output smoothing over removed regions.

Pruning removes the lowest-degree nodes; the compressed function agrees with
the network on surviving regions and replaces each pruned region's output by
the average of its surviving neighbors' mean outputs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .net import MlpParams, forward, forward_batch
from .rtg import TransitionGraph, _induced_subgraph


class UnknownPatternError(KeyError):
    """Input fell outside every region observed when the graph was built."""


@dataclass(frozen=True)
class CompressionReport:
    """Size and error accounting of one pruning run.

    sup_error is the max absolute deviation between the network and its
    compressed form over the evaluation points; unreachable_pruned_nodes
    counts pruned nodes whose component contains no survivor at all.
    """

    pruned_fraction: float
    surviving_nodes: int
    surviving_edges: int
    sup_error: float
    unreachable_pruned_nodes: int


def prune_by_degree(
    graph: TransitionGraph, fraction: float = 0.5
) -> tuple[TransitionGraph, frozenset[int]]:
    """Remove the floor(fraction * |V|) lowest-degree nodes.

    Nodes are ranked ascending by (degree, pattern); node ids follow pattern
    order, so the id is the deterministic tie-break key. Returns the induced
    subgraph on the survivors (ids re-densified) and the pruned original ids.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be strictly between 0 and 1")
    if graph.node_count < 2:
        raise ValueError("pruning needs at least 2 nodes")
    order = sorted(range(graph.node_count), key=lambda i: (graph.degree(i), i))
    n_prune = math.floor(fraction * graph.node_count)
    pruned = frozenset(order[:n_prune])
    survivors = [i for i in range(graph.node_count) if i not in pruned]
    return _induced_subgraph(graph, survivors), pruned


def _smoothed_value(
    graph: TransitionGraph, pruned: frozenset[int], node_id: int
) -> tuple[float, bool]:
    """Replacement output for a pruned node.

    Mean of surviving neighbors' mean_output; when none survive, a
    breadth-first search walks outward through pruned nodes and averages the
    nearest surviving layer. Returns (value, survivor_found); with no
    survivor reachable the node keeps its own mean_output.
    """
    surviving = [j for j in graph.adjacency[node_id] if j not in pruned]
    if surviving:
        return (
            sum(graph.nodes[j].mean_output for j in surviving) / len(surviving),
            True,
        )
    seen = {node_id}
    frontier = deque([node_id])
    while frontier:
        next_frontier: list[int] = []
        found: list[int] = []
        for i in frontier:
            for j in graph.adjacency[i]:
                if j in seen:
                    continue
                seen.add(j)
                if j in pruned:
                    next_frontier.append(j)
                else:
                    found.append(j)
        if found:
            return sum(graph.nodes[j].mean_output for j in found) / len(found), True
        frontier = deque(next_frontier)
    return graph.nodes[node_id].mean_output, False


def f_core_predict(
    graph: TransitionGraph,
    pruned: frozenset[int],
    x,
    pattern,
    params: MlpParams | None = None,
) -> float:
    """Compressed-function value at x given its activation pattern.

    Surviving region: the exact network output (params required there).
    Pruned region: smoothed neighbor average, independent of x within the
    region. Unknown patterns are rejected.
    """
    pattern = np.asarray(pattern, dtype=np.uint8)
    node_id = graph.node_of_pattern(np.packbits(pattern).tobytes())
    if node_id is None:
        raise UnknownPatternError("pattern was not observed when the graph was built")
    if node_id not in pruned:
        if params is None:
            raise ValueError("params are required to evaluate surviving regions")
        return forward(params, x).output
    value, _ = _smoothed_value(graph, pruned, node_id)
    return value


def _core_values(
    graph: TransitionGraph, pruned: frozenset[int]
) -> tuple[dict[int, float], int]:
    """Smoothed value per pruned node, plus the count with no reachable survivor."""
    values: dict[int, float] = {}
    unreachable = 0
    for node_id in sorted(pruned):
        value, found = _smoothed_value(graph, pruned, node_id)
        values[node_id] = value
        if not found:
            unreachable += 1
    return values, unreachable


def _sup_error_from_samples(
    graph: TransitionGraph,
    pruned: frozenset[int],
    node_ids: np.ndarray,
    outputs: np.ndarray,
) -> tuple[float, int]:
    """Max |f - f_core| over pre-mapped samples; exact 0 on survivors."""
    values, unreachable = _core_values(graph, pruned)
    worst = 0.0
    if values:
        pruned_arr = np.array(sorted(values), dtype=np.int64)
        value_arr = np.array([values[i] for i in pruned_arr])
        mask = np.isin(node_ids, pruned_arr)
        if mask.any():
            idx = np.searchsorted(pruned_arr, node_ids[mask])
            errs = np.abs(outputs[mask] - value_arr[idx])
            worst = float(errs.max())
    return worst, unreachable


def _map_points_to_nodes(
    params: MlpParams, graph: TransitionGraph, points
) -> tuple[np.ndarray, np.ndarray]:
    """(node_id, output) per evaluation point; unknown patterns are rejected."""
    outputs, patterns = forward_batch(params, points)
    packed = np.packbits(patterns, axis=1)
    node_ids = np.empty(len(outputs), dtype=np.int64)
    for i, row in enumerate(packed):
        node_id = graph.node_of_pattern(row.tobytes())
        if node_id is None:
            raise UnknownPatternError(
                f"evaluation point {i} has a pattern outside the graph"
            )
        node_ids[i] = node_id
    return node_ids, outputs


def sup_error(
    params: MlpParams,
    graph: TransitionGraph,
    pruned: frozenset[int],
    points,
) -> float:
    """Max over points of |f(x) - f_core(x)|.

    Points must come from the sample set the graph was built on so every
    pattern resolves to a node.
    """
    node_ids, outputs = _map_points_to_nodes(params, graph, points)
    worst, _ = _sup_error_from_samples(graph, pruned, node_ids, outputs)
    return worst


def compression_report(
    params: MlpParams,
    graph: TransitionGraph,
    points,
    fraction: float = 0.5,
) -> CompressionReport:
    """Prune, smooth, and measure: the full compression pipeline."""
    core, pruned = prune_by_degree(graph, fraction)
    node_ids, outputs = _map_points_to_nodes(params, graph, points)
    worst, unreachable = _sup_error_from_samples(graph, pruned, node_ids, outputs)
    return CompressionReport(
        pruned_fraction=fraction,
        surviving_nodes=core.node_count,
        surviving_edges=core.edge_count,
        sup_error=worst,
        unreachable_pruned_nodes=unreachable,
    )
