"""Random unit projection kernels drawn uniformly from the hypersphere.

Kernel j is generated from its own Philox substream keyed by (seed, j), so the
set is a pure function of (seed, count, patch_side) regardless of evaluation
or thread order. A small binary format allows exact replay by external tools.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

_MAGIC = b"SWCDPROJ"
_VERSION = 1


@dataclass(frozen=True)
class ProjectionSet:
    """Immutable bundle of `count` unit-norm kernels of shape (side, side, 3)."""

    kernels: np.ndarray  # (count, side, side, 3), float64
    seed: int
    patch_side: int

    @property
    def count(self) -> int:
        return self.kernels.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """Kernels flattened to columns: (side*side*3, count)."""
        return self.kernels.reshape(self.count, -1).T

    def channel_sums(self) -> np.ndarray:
        """Per-kernel sum of weights in each channel, shape (count, 3)."""
        return self.kernels.sum(axis=(1, 2))


def sample_projections(seed: int, count: int, patch_side: int) -> ProjectionSet:
    """Draw `count` kernels, each normalized to unit l2 norm.

    Each kernel's 3*patch_side**2 coordinates are standard normal variates
    from the Philox stream keyed by (seed, j); a zero-norm draw (guarded,
    never observed) falls through to the next values of the same stream.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if patch_side < 1:
        raise ValueError("patch_side must be >= 1")
    if patch_side % 2 == 0:
        raise ValueError("patch_side must be odd")
    n = 3 * patch_side * patch_side
    kernels = np.empty((count, patch_side, patch_side, 3), dtype=np.float64)
    for j in range(count):
        rng = np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, j]))
        v = rng.standard_normal(n)
        norm = np.linalg.norm(v)
        while norm < 1e-12:
            v = rng.standard_normal(n)
            norm = np.linalg.norm(v)
        kernels[j] = (v / norm).reshape(patch_side, patch_side, 3)
    return ProjectionSet(kernels=kernels, seed=seed, patch_side=patch_side)


def save_projections(pset: ProjectionSet, path) -> None:
    """Write a ProjectionSet: magic + (version, side, count, seed) header, then
    float32 little-endian kernels in (count, side, side, 3) row-major order."""
    header = _MAGIC + struct.pack(
        "<IIIq", _VERSION, pset.patch_side, pset.count, pset.seed
    )
    data = pset.kernels.astype("<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data)


def load_projections(path) -> ProjectionSet:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 28 or raw[:8] != _MAGIC:
        raise ValueError(f"{path}: not a projection-set file")
    version, side, count, seed = struct.unpack("<IIIq", raw[8:28])
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported projection-set version {version}")
    expect = count * side * side * 3
    body = np.frombuffer(raw[28:], dtype="<f4")
    if body.size != expect:
        raise ValueError(f"{path}: truncated kernel data ({body.size} of {expect} floats)")
    kernels = body.astype(np.float64).reshape(count, side, side, 3)
    return ProjectionSet(kernels=kernels, seed=seed, patch_side=side)
