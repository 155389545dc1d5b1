"""Exact 2D ground truth for single-hidden-layer networks.

Enumerates the cells of a line arrangement clipped to the domain box by
recursive half-plane polygon clipping, derives facet adjacencies, and
compares both against a sampled transition graph built from the same lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import sampler
from .net import MlpParams, MlpSpec, forward_batch
from .rtg import TransitionGraph, build_rtg
from .sampler import Domain

_CLIP_EPS = 1e-12
AREA_FLOOR = 1e-12
_ANGLE_TOL = 1e-9
_CONCURRENT_TOL = 1e-9
FACET_MIN_LENGTH = 1e-9


class DegenerateArrangementError(ValueError):
    """Line set is not in generic position within the tolerances."""


@dataclass(frozen=True)
class Line2D:
    """Oriented line w . x + b = 0; the positive side is w . x + b > 0."""

    normal: tuple[float, float]
    offset: float

    def __post_init__(self):
        w = np.asarray(self.normal, dtype=np.float64)
        object.__setattr__(self, "normal", (float(w[0]), float(w[1])))
        object.__setattr__(self, "offset", float(self.offset))
        if not np.hypot(*self.normal) > 0.0:
            raise ValueError("line normal must be non-zero")

    def value(self, point) -> float:
        return self.normal[0] * point[0] + self.normal[1] * point[1] + self.offset

    def values(self, points: np.ndarray) -> np.ndarray:
        return points @ np.asarray(self.normal) + self.offset


@dataclass(frozen=True)
class CellRecord:
    """One arrangement cell: per-line sign bits, clipped polygon, area."""

    signs: tuple[int, ...]
    polygon: np.ndarray = field(repr=False)
    area: float


def polygon_area(vertices: np.ndarray) -> float:
    """Shoelace area of a simple polygon."""
    if len(vertices) < 3:
        return 0.0
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def clip_polygon(vertices: np.ndarray, line: Line2D, keep_positive: bool) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon against one half-plane."""
    sign = 1.0 if keep_positive else -1.0
    out: list[np.ndarray] = []
    n = len(vertices)
    values = sign * line.values(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        fa, fb = values[i], values[(i + 1) % n]
        a_in, b_in = fa >= -_CLIP_EPS, fb >= -_CLIP_EPS
        if a_in:
            out.append(a)
        if a_in != b_in and abs(fa - fb) > 0.0:
            t = fa / (fa - fb)
            t = min(1.0, max(0.0, t))
            out.append(a + t * (b - a))
    return np.array(out) if out else np.empty((0, 2))


def _check_generic(lines: list[Line2D]):
    norms = [np.hypot(*ln.normal) for ln in lines]
    n = len(lines)
    crossings = {}
    for i in range(n):
        wi = np.asarray(lines[i].normal)
        for j in range(i + 1, n):
            wj = np.asarray(lines[j].normal)
            cross = wi[0] * wj[1] - wi[1] * wj[0]
            if abs(cross) < _ANGLE_TOL * norms[i] * norms[j]:
                raise DegenerateArrangementError(
                    f"lines {i} and {j} are parallel within tolerance"
                )
            # solve [wi; wj] p = -[bi; bj]
            a = np.array([wi, wj])
            b = -np.array([lines[i].offset, lines[j].offset])
            crossings[(i, j)] = np.linalg.solve(a, b)
    for (i, j), point in crossings.items():
        for k in range(n):
            if k in (i, j):
                continue
            if abs(lines[k].value(point)) / norms[k] < _CONCURRENT_TOL:
                raise DegenerateArrangementError(
                    f"lines {i}, {j} and {k} are concurrent within tolerance"
                )


def _box_polygon(domain: Domain) -> np.ndarray:
    (x0, y0), (x1, y1) = domain.lower, domain.upper
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=np.float64)


def enumerate_cells(lines, domain: Domain | None = None) -> list[CellRecord]:
    """All realizable sign-vector cells of the arrangement within the box.

    Splits the box recursively along each line; a candidate sign vector
    survives iff its polygon keeps area > AREA_FLOOR, which prunes the 2^n
    candidate space to the realizable cells. Non-generic line sets are
    rejected. Output is sorted by sign vector.
    """
    lines = list(lines)
    if not 1 <= len(lines) <= 16:
        raise ValueError("oracle handles between 1 and 16 lines")
    if domain is None:
        domain = Domain.unit_box(2)
    if domain.dim != 2:
        raise ValueError("oracle is two-dimensional")
    _check_generic(lines)

    cells: list[CellRecord] = []

    def split(polygon: np.ndarray, idx: int, signs: tuple[int, ...]):
        if polygon_area(polygon) <= AREA_FLOOR:
            return
        if idx == len(lines):
            cells.append(
                CellRecord(signs=signs, polygon=polygon, area=polygon_area(polygon))
            )
            return
        split(clip_polygon(polygon, lines[idx], False), idx + 1, signs + (0,))
        split(clip_polygon(polygon, lines[idx], True), idx + 1, signs + (1,))

    split(_box_polygon(domain), 0, ())
    cells.sort(key=lambda c: c.signs)
    return cells


def _chord_length(polygon: np.ndarray, line: Line2D) -> float:
    """Length of the segment where a line crosses a convex polygon."""
    w = np.asarray(line.normal)
    direction = np.array([-w[1], w[0]]) / np.hypot(*w)
    values = line.values(polygon)
    n = len(polygon)
    params: list[float] = []
    for i in range(n):
        fa, fb = values[i], values[(i + 1) % n]
        if abs(fa) <= _CLIP_EPS:
            params.append(float(polygon[i] @ direction))
        elif (fa > 0) != (fb > 0) and abs(fb) > _CLIP_EPS:
            t = fa / (fa - fb)
            point = polygon[i] + t * (polygon[(i + 1) % n] - polygon[i])
            params.append(float(point @ direction))
    if len(params) < 2:
        return 0.0
    return max(params) - min(params)


def oracle_adjacency(
    cells: list[CellRecord], lines, domain: Domain | None = None
) -> set[tuple[int, int]]:
    """Facet adjacencies: sign vectors differing in one line that share a
    boundary segment longer than FACET_MIN_LENGTH on that line.

    The shared facet of such a pair is recomputed exactly: clip the box by
    the n-1 common constraints, then measure the differing line's chord.
    """
    lines = list(lines)
    if domain is None:
        domain = Domain.unit_box(2)
    box = _box_polygon(domain)
    edges: set[tuple[int, int]] = set()
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            diff = [
                k for k in range(len(lines)) if cells[i].signs[k] != cells[j].signs[k]
            ]
            if len(diff) != 1:
                continue
            k = diff[0]
            polygon = box
            for other, sign in enumerate(cells[i].signs):
                if other == k:
                    continue
                polygon = clip_polygon(polygon, lines[other], bool(sign))
                if len(polygon) < 3:
                    break
            if len(polygon) >= 3 and _chord_length(polygon, lines[k]) > FACET_MIN_LENGTH:
                edges.add((i, j))
    return edges


def params_from_lines(lines) -> MlpParams:
    """Single-hidden-layer network whose neuron k realizes lines[k].

    The output layer just sums the hidden units; only the hidden
    pre-activation signs matter for pattern comparison.
    """
    lines = list(lines)
    n = len(lines)
    w1 = np.array([ln.normal for ln in lines], dtype=np.float64)
    b1 = np.array([ln.offset for ln in lines], dtype=np.float64)
    w2 = np.ones((1, n), dtype=np.float64)
    b2 = np.zeros(1, dtype=np.float64)
    for arr in (w1, b1, w2, b2):
        arr.flags.writeable = False
    return MlpParams(
        spec=MlpSpec(depth=1, width=n, input_dim=2),
        weights=(w1, w2),
        biases=(b1, b2),
    )


def random_lines(count: int, seed: int, domain: Domain | None = None) -> list[Line2D]:
    """count random lines through the central half of the box, generic
    position enforced by re-drawing (deterministic per seed)."""
    if domain is None:
        domain = Domain.unit_box(2)
    lo = np.asarray(domain.lower)
    hi = np.asarray(domain.upper)
    for attempt in range(64):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(attempt,)))
        angles = rng.uniform(0.0, np.pi, size=count)
        anchors = lo + (0.25 + 0.5 * rng.uniform(size=(count, 2))) * (hi - lo)
        lines = []
        for theta, anchor in zip(angles, anchors):
            w = (math.cos(theta), math.sin(theta))
            lines.append(Line2D(normal=w, offset=float(-np.dot(w, anchor))))
        try:
            _check_generic(lines)
        except DegenerateArrangementError:
            continue
        return lines
    raise DegenerateArrangementError(
        f"no generic arrangement of {count} lines found for seed {seed}"
    )


@dataclass(frozen=True)
class OracleComparison:
    """Sampled graph vs. exact arrangement, as sign-vector sets."""

    grid_resolution: int
    oracle_cells: int
    rtg_nodes: int
    nodes_match: bool
    edges_match: bool
    missing_cells: tuple[tuple[int, ...], ...]
    extra_patterns: tuple[tuple[int, ...], ...]
    missing_edges: int
    extra_edges: int
    minimal_resolution: int | None


def _rtg_sign_sets(
    graph: TransitionGraph,
) -> tuple[set[tuple[int, ...]], set[tuple[tuple[int, ...], tuple[int, ...]]]]:
    node_signs = [tuple(int(b) for b in node.pattern.bits()) for node in graph.nodes]
    edge_set = {
        tuple(sorted((node_signs[i], node_signs[j]))) for i, j in graph.edges()
    }
    return set(node_signs), edge_set


def _sampled_rtg(lines, resolution: int, domain: Domain) -> TransitionGraph:
    params = params_from_lines(lines)
    points = sampler.grid_points(domain, resolution**2)
    outputs, patterns = forward_batch(params, points)
    return build_rtg(points, outputs, patterns)


def oracle_vs_rtg(
    lines,
    grid_resolution: int,
    domain: Domain | None = None,
    max_resolution: int = 4096,
) -> OracleComparison:
    """Compare a grid-sampled transition graph against the exact arrangement.

    Node sets are compared as sign vectors and edge sets as sign-vector
    pairs. Under-sampling shows up as missing cells/edges rather than being
    hidden. Also reports the smallest sufficient resolution found by doubling
    from 2 (None if max_resolution is not enough).
    """
    if domain is None:
        domain = Domain.unit_box(2)
    lines = list(lines)
    cells = enumerate_cells(lines, domain)
    oracle_nodes = {cell.signs for cell in cells}
    oracle_edges = {
        tuple(sorted((cells[i].signs, cells[j].signs)))
        for i, j in oracle_adjacency(cells, lines, domain)
    }

    def compare(resolution: int) -> tuple[bool, bool, set, set]:
        rtg_nodes, rtg_edges = _rtg_sign_sets(_sampled_rtg(lines, resolution, domain))
        return (
            rtg_nodes == oracle_nodes,
            rtg_edges == oracle_edges,
            rtg_nodes,
            rtg_edges,
        )

    nodes_ok, edges_ok, rtg_nodes, rtg_edges = compare(grid_resolution)

    minimal = None
    resolution = 2
    while resolution <= max_resolution:
        if resolution == grid_resolution:
            n_ok, e_ok = nodes_ok, edges_ok
        else:
            n_ok, e_ok, _, _ = compare(resolution)
        if n_ok and e_ok:
            minimal = resolution
            break
        resolution *= 2

    return OracleComparison(
        grid_resolution=grid_resolution,
        oracle_cells=len(cells),
        rtg_nodes=len(rtg_nodes),
        nodes_match=nodes_ok,
        edges_match=edges_ok,
        missing_cells=tuple(sorted(oracle_nodes - rtg_nodes)),
        extra_patterns=tuple(sorted(rtg_nodes - oracle_nodes)),
        missing_edges=len(oracle_edges - rtg_edges),
        extra_edges=len(rtg_edges - oracle_edges),
        minimal_resolution=minimal,
    )
