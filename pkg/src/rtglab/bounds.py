"""Theoretical bound values and checks against measured graph quantities.

Region-count bounds come in two forms: the per-layer summation form
sum_i C(n,i)^L and the product form (sum_i C(n,i))^L. For L >= 2 the product
form dominates the summation form, so both are computed and reported; checks
default to the summation form, with the product form alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sampler
from .net import MlpParams, forward_batch
from .rtg import TransitionGraph
from .sampler import Domain


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one bound check.

    margin is the signed slack in the bound's own units: bound - empirical
    for upper bounds, empirical - bound for lower bounds, so satisfied is
    always margin >= 0.
    """

    bound_name: str
    theoretical_value: float | int
    empirical_value: float | int
    satisfied: bool
    margin: float


def theorem1_sum_bound(n: int, d: int, L: int) -> int:
    """Region-count bound, summation form: sum_{i=0..d} C(n,i)^L, exact."""
    if n < 1 or d < 1 or L < 1:
        raise ValueError("n, d and L must all be >= 1")
    return sum(math.comb(n, i) ** L for i in range(d + 1))


def theorem1_product_bound(n: int, d: int, L: int) -> int:
    """Region-count bound, product form: (sum_{i=0..d} C(n,i))^L, exact."""
    if n < 1 or d < 1 or L < 1:
        raise ValueError("n, d and L must all be >= 1")
    return sum(math.comb(n, i) for i in range(d + 1)) ** L


def check_theorem1(observed_nodes: int, n: int, d: int, L: int) -> tuple[BoundReport, BoundReport]:
    """Observed node count against both region-count bound forms."""
    if observed_nodes < 1:
        raise ValueError("observed node count must be >= 1")
    reports = []
    for name, bound in (
        ("theorem1_sum", theorem1_sum_bound(n, d, L)),
        ("theorem1_product", theorem1_product_bound(n, d, L)),
    ):
        margin = float(bound - observed_nodes)
        reports.append(
            BoundReport(
                bound_name=name,
                theoretical_value=bound,
                empirical_value=observed_nodes,
                satisfied=margin >= 0.0,
                margin=margin,
            )
        )
    return reports[0], reports[1]


def check_lemma2(entropy: float, avg_degree: float) -> BoundReport:
    """Entropy lower bound: H >= ln(avg_degree + 1), both in nats."""
    if avg_degree < 0:
        raise ValueError("average degree must be >= 0")
    bound = math.log(avg_degree + 1.0)
    margin = entropy - bound
    return BoundReport(
        bound_name="lemma2_entropy",
        theoretical_value=bound,
        empirical_value=entropy,
        satisfied=margin >= 0.0,
        margin=margin,
    )


def vc_proxy(params: MlpParams, seed: int, k: int = 10, domain: Domain | None = None) -> int:
    """Distinct activation patterns over k random input points.

    A shattering proxy: always between 1 and k. Points are drawn uniformly
    from the domain (default [-1, 1]^d) with the given seed.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if domain is None:
        domain = Domain.unit_box(params.spec.input_dim)
    points = sampler.random_points(domain, k, seed)
    _, patterns = forward_batch(params, points)
    return int(np.unique(np.packbits(patterns, axis=1), axis=0).shape[0])


def check_theorem3(vc_proxy_value: int, diameter: int) -> BoundReport:
    """Shattering proxy against the diameter upper bound."""
    margin = float(diameter - vc_proxy_value)
    return BoundReport(
        bound_name="theorem3_vc_diameter",
        theoretical_value=diameter,
        empirical_value=vc_proxy_value,
        satisfied=margin >= 0.0,
        margin=margin,
    )


def lemma3_fraction(graph: TransitionGraph) -> float:
    """Fraction of nodes with degree <= 2 * average degree (always >= 1/2)."""
    if graph.node_count == 0:
        raise ValueError("graph has no nodes")
    threshold = 2.0 * (2.0 * graph.edge_count / graph.node_count)
    ok = sum(1 for adj in graph.adjacency if len(adj) <= threshold)
    return ok / graph.node_count
