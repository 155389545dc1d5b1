"""Deterministic input point generators: dense lattices and seeded uniform samples."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_MAX_GRID_POINTS = 2**31


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box, lower[k] < upper[k] per axis."""

    lower: tuple[float, ...] = (-1.0, -1.0)
    upper: tuple[float, ...] = (1.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper must have the same dimension")
        if not self.lower:
            raise ValueError("domain must have at least one axis")
        for lo, hi in zip(self.lower, self.upper):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError("domain bounds must be finite")
            if not lo < hi:
                raise ValueError(f"lower bound {lo} must be < upper bound {hi}")

    @property
    def dim(self) -> int:
        return len(self.lower)

    @classmethod
    def unit_box(cls, dim: int) -> "Domain":
        return cls(lower=(-1.0,) * dim, upper=(1.0,) * dim)


def _axis_values(lo: float, hi: float, r: int) -> np.ndarray:
    """r evenly spaced values on [lo, hi], endpoints exact.

    Built from the midpoint so a symmetric interval yields an exactly
    sign-symmetric axis (negating the values permutes them bit-for-bit).
    """
    if r == 1:
        return np.array([(lo + hi) / 2.0])
    c = (lo + hi) / 2.0
    h = (hi - lo) / 2.0
    vals = c + h * (2.0 * np.arange(r) - (r - 1)) / (r - 1)
    vals[0] = lo
    vals[-1] = hi
    return vals


def grid_resolution(target_count: int, dim: int) -> int:
    """Per-axis resolution: smallest r with r**dim >= target_count."""
    if target_count < 1:
        raise ValueError("target_count must be >= 1")
    r = math.ceil(target_count ** (1.0 / dim))
    # float root can land one off on either side; fix up exactly
    while r > 1 and (r - 1) ** dim >= target_count:
        r -= 1
    while r**dim < target_count:
        r += 1
    return r


def grid_points(domain: Domain, target_count: int) -> np.ndarray:
    """Row-major lattice of at least target_count points covering the domain.

    The per-axis resolution is ceil(target_count ** (1/d)), both endpoints
    included, so the returned count r**d may slightly exceed the target
    (e.g. target 100_000 in 2 dims gives 317**2 = 100_489 points).
    """
    r = grid_resolution(target_count, domain.dim)
    if r**domain.dim > _MAX_GRID_POINTS:
        raise OverflowError(f"grid of {r}**{domain.dim} points exceeds platform limits")
    axes = [_axis_values(lo, hi, r) for lo, hi in zip(domain.lower, domain.upper)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, domain.dim)


def random_points(domain: Domain, count: int, seed: int) -> np.ndarray:
    """count i.i.d. uniform points over the domain box, deterministic per seed.

    Uses numpy's PCG64 stream; points are generated point-major, so the first
    k points of a longer draw equal a draw of k points (prefix-stable).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, size=(count, domain.dim))
    lo = np.array(domain.lower)
    hi = np.array(domain.upper)
    return lo + u * (hi - lo)
