"""ReLU Transition Graph: region nodes from deduplicated activation patterns,
edges between patterns at Hamming distance 1, and a diffable file format.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field

import numpy as np

FORMAT_VERSION = 1


class GraphFormatError(ValueError):
    """Malformed graph document; message carries the offending location."""


@functools.total_ordering
@dataclass(frozen=True)
class ActivationPattern:
    """Fixed-length bit vector, packed big-endian (bit 0 = MSB of byte 0).

    The packing makes lexicographic order on bits equal to bytewise order on
    `packed`, so patterns sort and compare cheaply.
    """

    m: int
    packed: bytes

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("pattern length must be >= 1")
        if len(self.packed) != (self.m + 7) // 8:
            raise ValueError(f"packed length {len(self.packed)} for m={self.m}")

    @classmethod
    def from_bits(cls, bits) -> "ActivationPattern":
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        return cls(m=arr.size, packed=np.packbits(arr).tobytes())

    @classmethod
    def from_hex(cls, hex_str: str, m: int) -> "ActivationPattern":
        expected = (m + 3) // 4
        if len(hex_str) != expected:
            raise ValueError(f"hex length {len(hex_str)}, expected {expected} for m={m}")
        padded = hex_str + "0" * (-len(hex_str) % 2)
        packed = bytes.fromhex(padded)
        all_bits = np.unpackbits(np.frombuffer(packed, dtype=np.uint8))
        if all_bits[m:].any():
            raise ValueError("padding bits beyond the pattern length must be zero")
        return cls(m=m, packed=packed)

    def bits(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(self.packed, dtype=np.uint8))[: self.m]

    def to_hex(self) -> str:
        """ceil(m/4) hex chars; bit 0 is the most significant bit of char 0."""
        return self.packed.hex()[: (self.m + 3) // 4]

    def __lt__(self, other: "ActivationPattern") -> bool:
        if self.m != other.m:
            raise ValueError(f"pattern length mismatch: {self.m} vs {other.m}")
        return self.packed < other.packed


def hamming(p: ActivationPattern, q: ActivationPattern) -> int:
    """Number of differing bit positions."""
    if p.m != q.m:
        raise ValueError(f"pattern length mismatch: {p.m} vs {q.m}")
    return (
        int.from_bytes(p.packed, "big") ^ int.from_bytes(q.packed, "big")
    ).bit_count()


@dataclass(frozen=True)
class RegionNode:
    """One observed linear region.

    sample_count is the number of input samples that mapped to the pattern
    (the region's volume proxy); representative is the first such sample in
    input order.
    """

    node_id: int
    pattern: ActivationPattern
    sample_count: int
    representative: tuple[float, ...]
    mean_output: float


@dataclass(frozen=True)
class GraphMeta:
    """Network provenance carried into the graph file."""

    input_dim: int
    depth: int
    width: int
    seed: int


@dataclass(eq=False)
class TransitionGraph:
    """Undirected graph over region nodes; every edge flips exactly one bit.

    node_ids are dense in [0, |V|) and assigned in lexicographic pattern
    order. Adjacency lists are sorted. Instances are treated as immutable
    after construction.
    """

    m: int
    nodes: list[RegionNode]
    adjacency: list[list[int]]
    meta: GraphMeta | None = None
    _index: dict[bytes, int] = field(default_factory=dict, repr=False)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edge list with i < j, sorted lexicographically."""
        return [(i, j) for i, adj in enumerate(self.adjacency) for j in adj if i < j]

    def degree(self, node_id: int) -> int:
        return len(self.adjacency[node_id])

    def node_of_pattern(self, packed: bytes) -> int | None:
        """node_id of a packed pattern, or None if unobserved."""
        if not self._index:
            self._index.update(
                {node.pattern.packed: node.node_id for node in self.nodes}
            )
        return self._index.get(packed)


def build_rtg(points, outputs, patterns, meta: GraphMeta | None = None) -> TransitionGraph:
    """Deduplicate sampled activation patterns and connect Hamming-1 pairs.

    points: (N, d) inputs; outputs: (N,) network values; patterns: (N, m)
    uint8 bit rows. One node per unique pattern, ids in lexicographic pattern
    order; for each node every one of its m single-bit flips is probed against
    the node set, so an edge exists iff both Hamming-1 patterns were observed.
    """
    points = np.asarray(points, dtype=np.float64)
    outputs = np.asarray(outputs, dtype=np.float64)
    patterns = np.asarray(patterns, dtype=np.uint8)
    if patterns.ndim != 2 or patterns.shape[1] < 1:
        raise ValueError("patterns must be a non-empty (N, m) bit array")
    n_samples, m = patterns.shape
    if n_samples == 0:
        raise ValueError("at least one sample is required")
    if len(points) != n_samples or len(outputs) != n_samples:
        raise ValueError("points, outputs and patterns must have equal length")

    packed = np.packbits(patterns, axis=1)
    # unique rows come back lexicographically sorted: node order for free
    uniq, inverse, counts = np.unique(
        packed, axis=0, return_inverse=True, return_counts=True
    )
    n_nodes = uniq.shape[0]
    first_idx = np.full(n_nodes, n_samples, dtype=np.int64)
    np.minimum.at(first_idx, inverse, np.arange(n_samples))
    mean_out = np.bincount(inverse, weights=outputs, minlength=n_nodes) / counts

    nodes = []
    for i in range(n_nodes):
        nodes.append(
            RegionNode(
                node_id=i,
                pattern=ActivationPattern(m=m, packed=uniq[i].tobytes()),
                sample_count=int(counts[i]),
                representative=tuple(float(v) for v in points[first_idx[i]]),
                mean_output=float(mean_out[i]),
            )
        )

    # Hamming-1 probe: integer keys keep the m * |V| lookups cheap.
    n_pad_bits = uniq.shape[1] * 8
    keys = [int.from_bytes(row.tobytes(), "big") for row in uniq]
    table = {key: i for i, key in enumerate(keys)}
    masks = [1 << (n_pad_bits - 1 - bit) for bit in range(m)]
    adjacency: list[list[int]] = [[] for _ in range(n_nodes)]
    for i, key in enumerate(keys):
        neighbors = adjacency[i]
        for mask in masks:
            j = table.get(key ^ mask)
            if j is not None:
                neighbors.append(j)
        neighbors.sort()
    return TransitionGraph(m=m, nodes=nodes, adjacency=adjacency, meta=meta)


def _induced_subgraph(graph: TransitionGraph, keep_ids: list[int]) -> TransitionGraph:
    """Subgraph on keep_ids (ascending), node_ids re-densified in that order."""
    remap = {old: new for new, old in enumerate(keep_ids)}
    nodes = []
    adjacency = []
    for new_id, old_id in enumerate(keep_ids):
        old = graph.nodes[old_id]
        nodes.append(
            RegionNode(
                node_id=new_id,
                pattern=old.pattern,
                sample_count=old.sample_count,
                representative=old.representative,
                mean_output=old.mean_output,
            )
        )
        adjacency.append(
            sorted(remap[j] for j in graph.adjacency[old_id] if j in remap)
        )
    return TransitionGraph(m=graph.m, nodes=nodes, adjacency=adjacency, meta=graph.meta)


def largest_component(graph: TransitionGraph) -> tuple[TransitionGraph, list[int]]:
    """Induced subgraph on the largest connected component.

    Ties go to the component containing the smallest node_id. Returns the
    re-densified subgraph and the list mapping new ids to original ids.
    """
    if graph.node_count == 0:
        raise ValueError("graph has no nodes")
    from .metrics import connected_components  # local import, cyclic otherwise

    n_comp, labels = connected_components(graph)
    sizes = np.bincount(labels, minlength=n_comp)
    best = int(np.argmax(sizes))  # argmax takes the first max: smallest label,
    # and labels are assigned in order of smallest contained node_id
    keep = [i for i in range(graph.node_count) if labels[i] == best]
    return _induced_subgraph(graph, keep), keep


def serialize(graph: TransitionGraph) -> bytes:
    """Normative one-node-per-line JSON document (see deserialize).

    Hex pattern encoding and sorted edge order make outputs byte-stable and
    diffable across runs.
    """
    meta = graph.meta
    spec_json = (
        json.dumps(
            {"d": meta.input_dim, "L": meta.depth, "n": meta.width, "seed": meta.seed}
        )
        if meta is not None
        else "null"
    )
    lines = [
        "{",
        f'"format_version": {FORMAT_VERSION},',
        f'"m": {graph.m},',
        f'"spec": {spec_json},',
        '"nodes": [',
    ]
    for node in graph.nodes:
        entry = json.dumps(
            {
                "id": node.node_id,
                "pattern_hex": node.pattern.to_hex(),
                "count": node.sample_count,
                "rep": list(node.representative),
                "mean_out": node.mean_output,
            }
        )
        sep = "," if node.node_id < graph.node_count - 1 else ""
        lines.append(entry + sep)
    lines.append("],")
    lines.append('"edges": [')
    edges = graph.edges()
    for k, (i, j) in enumerate(edges):
        sep = "," if k < len(edges) - 1 else ""
        lines.append(f"[{i}, {j}]{sep}")
    lines.append("]")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _require(condition: bool, where: str, message: str):
    if not condition:
        raise GraphFormatError(f"{where}: {message}")


def deserialize(data: bytes) -> TransitionGraph:
    """Parse and validate a serialized graph; rejects malformed input."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise GraphFormatError(f"not a valid graph document: {exc}") from exc
    _require(isinstance(doc, dict), "document", "top level must be an object")
    _require(
        doc.get("format_version") == FORMAT_VERSION,
        "format_version",
        f"expected {FORMAT_VERSION}, got {doc.get('format_version')!r}",
    )
    m = doc.get("m")
    _require(isinstance(m, int) and m >= 1, "m", f"invalid bit length {m!r}")

    meta = None
    spec = doc.get("spec")
    if spec is not None:
        _require(isinstance(spec, dict), "spec", "must be an object or null")
        missing = {"d", "L", "n", "seed"} - spec.keys()
        _require(not missing, "spec", f"missing keys {sorted(missing)}")
        meta = GraphMeta(
            input_dim=spec["d"], depth=spec["L"], width=spec["n"], seed=spec["seed"]
        )

    raw_nodes = doc.get("nodes")
    _require(isinstance(raw_nodes, list) and raw_nodes, "nodes", "must be a non-empty list")
    nodes = []
    for k, entry in enumerate(raw_nodes):
        where = f"nodes[{k}]"
        _require(isinstance(entry, dict), where, "must be an object")
        _require(entry.get("id") == k, where, f"ids must be dense, got {entry.get('id')!r}")
        try:
            pattern = ActivationPattern.from_hex(entry["pattern_hex"], m)
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"{where}: bad pattern_hex ({exc})") from exc
        count = entry.get("count")
        _require(isinstance(count, int) and count >= 1, where, f"bad count {count!r}")
        rep = entry.get("rep")
        _require(isinstance(rep, list), where, "rep must be a list")
        nodes.append(
            RegionNode(
                node_id=k,
                pattern=pattern,
                sample_count=count,
                representative=tuple(float(v) for v in rep),
                mean_output=float(entry["mean_out"]),
            )
        )
    for k in range(1, len(nodes)):
        _require(
            nodes[k - 1].pattern < nodes[k].pattern,
            f"nodes[{k}]",
            "patterns must be strictly increasing",
        )

    raw_edges = doc.get("edges")
    _require(isinstance(raw_edges, list), "edges", "must be a list")
    adjacency: list[list[int]] = [[] for _ in nodes]
    prev = None
    for k, pair in enumerate(raw_edges):
        where = f"edges[{k}]"
        _require(
            isinstance(pair, list) and len(pair) == 2, where, "must be a pair [i, j]"
        )
        i, j = pair
        _require(
            isinstance(i, int) and isinstance(j, int) and 0 <= i < j < len(nodes),
            where,
            f"invalid endpoints {pair!r}",
        )
        _require(prev is None or prev < (i, j), where, "edges must be sorted, no duplicates")
        _require(
            hamming(nodes[i].pattern, nodes[j].pattern) == 1,
            where,
            "edge endpoints must differ in exactly one bit",
        )
        prev = (i, j)
        adjacency[i].append(j)
        adjacency[j].append(i)
    for adj in adjacency:
        adj.sort()
    return TransitionGraph(m=m, nodes=nodes, adjacency=adjacency, meta=meta)
