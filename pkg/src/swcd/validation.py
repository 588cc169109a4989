"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np


def check_image(img, name: str = "image") -> np.ndarray:
    """Validate an H x W x 3 float image and return it as float64.

    Rejects non-finite values with a diagnostic naming the first offending
    pixel.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"{name}: expected an HxWx3 array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name}: empty image, shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        y, x, c = np.argwhere(~np.isfinite(arr))[0]
        raise ValueError(
            f"{name}: non-finite value {arr[y, x, c]!r} at pixel (row={y}, col={x}, channel={c})"
        )
    return arr


def check_srgb_image(img, name: str = "image") -> np.ndarray:
    """Validate a display-referred sRGB image with values in [0, 1]."""
    arr = check_image(img, name)
    lo, hi = float(arr.min()), float(arr.max())
    if lo < 0.0 or hi > 1.0:
        raise ValueError(f"{name}: sRGB values must lie in [0, 1], found range [{lo:g}, {hi:g}]")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, name_a: str = "first image",
                     name_b: str = "second image") -> None:
    if a.shape != b.shape:
        raise ValueError(
            f"dimension mismatch: {name_a} is {a.shape}, {name_b} is {b.shape}"
        )


def check_vector(x, name: str = "x", min_len: int = 1) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64).ravel()
    if arr.size < min_len:
        raise ValueError(f"{name}: need at least {min_len} entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: contains non-finite values")
    return arr
