"""Fully connected ReLU MLPs: construction, evaluation, activation patterns.

Networks map R^d -> R through L hidden layers of width n. Every hidden
pre-activation is recorded so the on/off pattern of the ReLU units can be
read out alongside the output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class MlpSpec:
    """Architecture of an L-hidden-layer, width-n ReLU MLP with scalar output."""

    depth: int
    width: int
    input_dim: int = 2
    output_dim: int = field(default=1, init=False)

    def __post_init__(self):
        if self.input_dim < 1 or self.depth < 1 or self.width < 1:
            raise ValueError("input_dim, depth and width must all be >= 1")

    @property
    def relu_count(self) -> int:
        """Total number of ReLU units, the activation-pattern bit length."""
        return self.depth * self.width


@dataclass(frozen=True)
class MlpParams:
    """Weights and biases: depth+1 affine layers, hidden ones ReLU-gated."""

    spec: MlpSpec
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def __post_init__(self):
        d, L, n = self.spec.input_dim, self.spec.depth, self.spec.width
        shapes = [(n, d)] + [(n, n)] * (L - 1) + [(1, n)]
        if len(self.weights) != L + 1 or len(self.biases) != L + 1:
            raise ValueError(f"expected {L + 1} weight/bias layers")
        for k, (w, b, shape) in enumerate(zip(self.weights, self.biases, shapes)):
            if w.shape != shape:
                raise ValueError(f"layer {k} weight shape {w.shape}, expected {shape}")
            if b.shape != (shape[0],):
                raise ValueError(f"layer {k} bias shape {b.shape}, expected ({shape[0]},)")
            if not (np.isfinite(w).all() and np.isfinite(b).all()):
                raise ValueError(f"layer {k} has non-finite entries")


@dataclass(frozen=True)
class ForwardResult:
    """Scalar output plus the L hidden pre-activation vectors."""

    output: float
    preactivations: tuple[np.ndarray, ...]


def init_mlp(spec: MlpSpec, seed: int) -> MlpParams:
    """Seeded uniform fan-based initialization.

    Weights are i.i.d. uniform on [-a, a] with a = sqrt(6 / (fan_in + fan_out));
    biases i.i.d. uniform on [-0.1, 0.1]. The same (spec, seed) always produces
    bit-identical parameters (PCG64 stream, fixed draw order).
    """
    rng = np.random.default_rng(seed)
    dims = [spec.input_dim] + [spec.width] * spec.depth + [1]
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        a = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-a, a, size=(fan_out, fan_in))
        b = rng.uniform(-0.1, 0.1, size=fan_out)
        w.flags.writeable = False
        b.flags.writeable = False
        weights.append(w)
        biases.append(b)
    return MlpParams(spec=spec, weights=tuple(weights), biases=tuple(biases))


def _forward_layers(params: MlpParams, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Shared kernel: outputs (N,) and per-layer pre-activations (N, n).

    forward() routes single points through this same code so singleton and
    batched evaluation agree bit-for-bit.
    """
    h = x
    preacts = []
    for w, b in zip(params.weights[:-1], params.biases[:-1]):
        z = h @ w.T + b
        preacts.append(z)
        h = np.maximum(z, 0.0)
    out = h @ params.weights[-1].T + params.biases[-1]
    return out[:, 0], preacts


def forward(params: MlpParams, x) -> ForwardResult:
    """Evaluate the network at one point, recording hidden pre-activations."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params.spec.input_dim,):
        raise ValueError(f"input shape {x.shape}, expected ({params.spec.input_dim},)")
    if not np.isfinite(x).all():
        raise ValueError("input must be finite")
    out, preacts = _forward_layers(params, x[None, :])
    return ForwardResult(output=float(out[0]), preactivations=tuple(z[0] for z in preacts))


def activation_pattern(result: ForwardResult) -> np.ndarray:
    """Bit vector over all ReLU units: bit (layer*n + i) = 1 iff z_i > 0.

    An exactly zero pre-activation maps to 0 (strict inequality).
    """
    return (np.concatenate(result.preactivations) > 0.0).astype(np.uint8)


def forward_batch(params: MlpParams, points) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized forward + pattern extraction over a batch of points.

    Returns (outputs, patterns): outputs has shape (N,), patterns is a
    (N, L*n) uint8 array; row i corresponds to points[i], identical to
    forward() / activation_pattern() on that point.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.spec.input_dim:
        raise ValueError(
            f"points shape {x.shape}, expected (N, {params.spec.input_dim})"
        )
    out, preacts = _forward_layers(params, x)
    n = params.spec.width
    bits = np.empty((x.shape[0], params.spec.relu_count), dtype=np.uint8)
    for k, z in enumerate(preacts):
        bits[:, k * n : (k + 1) * n] = z > 0.0
    return out, bits
