"""Reflect padding (mirror without edge repeat) as an explicit linear operator.

The forward map is a gather through precomputed index tables, which makes the
exact adjoint (needed by the analytic gradient) a scatter-add through the same
tables.
"""

from __future__ import annotations

import numpy as np


def reflect_indices(n: int, pad: int) -> np.ndarray:
    """Source index for each position of a 1-D axis padded by `pad` on both ends.

    Mirror-without-repeat: for n=4, pad=2 the mapping is [2,1,0,1,2,3,2,1].
    Requires pad <= n - 1.
    """
    if n < 1:
        raise ValueError("axis length must be >= 1")
    if pad < 0:
        raise ValueError("pad must be >= 0")
    if pad > n - 1:
        raise ValueError(f"reflect pad {pad} too large for axis of length {n} (max {n - 1})")
    idx = np.arange(-pad, n + pad)
    if n == 1:
        return np.zeros(idx.shape, dtype=np.intp)
    period = 2 * (n - 1)
    idx = np.abs(idx) % period
    return np.where(idx >= n, period - idx, idx).astype(np.intp)


def reflect_pad(arr: np.ndarray, pad_y: int, pad_x: int) -> np.ndarray:
    """Pad the two leading axes of `arr` by mirroring without edge repeat."""
    iy = reflect_indices(arr.shape[0], pad_y)
    ix = reflect_indices(arr.shape[1], pad_x)
    return arr[iy][:, ix]


def reflect_fold(grad_padded: np.ndarray, height: int, width: int) -> np.ndarray:
    """Adjoint of reflect_pad: fold padded-gradient rows/cols back onto the source."""
    pad_y = (grad_padded.shape[0] - height) // 2
    pad_x = (grad_padded.shape[1] - width) // 2
    iy = reflect_indices(height, pad_y)
    ix = reflect_indices(width, pad_x)
    tmp = np.zeros((height,) + grad_padded.shape[1:], dtype=grad_padded.dtype)
    np.add.at(tmp, iy, grad_padded)
    out = np.zeros((width, height) + grad_padded.shape[2:], dtype=grad_padded.dtype)
    np.add.at(out, ix, tmp.swapaxes(0, 1))
    return out.swapaxes(0, 1)


def shift_indices(n: int, shift: int) -> np.ndarray:
    """Index table for translating an axis by `shift`, reflect-filling vacated samples."""
    idx = np.arange(n) - shift
    if n == 1:
        return np.zeros(n, dtype=np.intp)
    period = 2 * (n - 1)
    idx = np.abs(idx) % period
    return np.where(idx >= n, period - idx, idx).astype(np.intp)
