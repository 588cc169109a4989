"""Projection/sort kernel: 1-D slices of patch distributions and their transport cost.

An image level is turned into M projected samples per kernel by a stride-1
cross-correlation with reflect padding (spatial output size preserved). The
1-D Wasserstein distance between two equal-count sample sets is the mean
absolute difference of the sorted values; `wd1d_oracle` certifies that fact by
exhaustive matching on small inputs.

The heavy path assembles the implicit patch matrix once per level (im2col) and
hits it with all kernels in a single matmul; the adjoint (col2im plus a
reflect fold) backs gradients out of the same computation.
"""

from __future__ import annotations

import itertools

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .padding import reflect_fold, reflect_pad
from .projections import ProjectionSet

# rows per matmul block: keeps the materialized patch-matrix slice ~10 MB
_BLOCK_ELEMS = 1_300_000

_PERM_CACHE: dict = {}


def _check_level(level: np.ndarray, patch_side: int) -> np.ndarray:
    arr = np.asarray(level, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an HxWx3 level, got shape {arr.shape}")
    if arr.shape[0] < patch_side or arr.shape[1] < patch_side:
        raise ValueError(
            f"level {arr.shape[0]}x{arr.shape[1]} is smaller than the "
            f"{patch_side}x{patch_side} projection kernel"
        )
    return arr


def project_all(level: np.ndarray, projs: ProjectionSet) -> np.ndarray:
    """Project one image level through every kernel at stride 1.

    Returns an (M, P) array, M = h*w, rows in row-major pixel order.
    """
    side = projs.patch_side
    arr = _check_level(level, side)
    h, w = arr.shape[:2]
    pad = side // 2
    padded = reflect_pad(arr, pad, pad)
    windows = sliding_window_view(padded, (side, side), axis=(0, 1))
    # (h, w, 3, side, side) -> rows flattened as (side, side, 3) to match kernels
    cols = windows.transpose(0, 1, 3, 4, 2).reshape(h * w, side * side * 3)
    mat = projs.matrix
    out = np.empty((h * w, projs.count), dtype=np.float64)
    block = max(1, _BLOCK_ELEMS // cols.shape[1])
    for start in range(0, cols.shape[0], block):
        stop = min(start + block, cols.shape[0])
        out[start:stop] = np.ascontiguousarray(cols[start:stop]) @ mat
    return out


def project_image(level: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Cross-correlate a level with a single (side, side, 3) kernel, channels
    summed, reflect padded, flattened row-major."""
    kernel = np.asarray(kernel, dtype=np.float64)
    side = kernel.shape[0]
    arr = _check_level(level, side)
    h, w = arr.shape[:2]
    pad = side // 2
    padded = reflect_pad(arr, pad, pad)
    windows = sliding_window_view(padded, (side, side), axis=(0, 1))
    cols = windows.transpose(0, 1, 3, 4, 2).reshape(h * w, side * side * 3)
    return cols @ kernel.ravel()


def project_all_backward(sample_grads: np.ndarray, projs: ProjectionSet,
                         height: int, width: int) -> np.ndarray:
    """Adjoint of project_all: (M, P) sample gradients -> (h, w, 3) level gradient."""
    side = projs.patch_side
    pad = side // 2
    dcols = sample_grads @ projs.matrix.T
    dwin = dcols.reshape(height, width, side, side, 3)
    padded = np.zeros((height + 2 * pad, width + 2 * pad, 3), dtype=np.float64)
    for dy in range(side):
        for dx in range(side):
            padded[dy : dy + height, dx : dx + width] += dwin[:, :, dy, dx, :]
    return reflect_fold(padded, height, width)


def wd1d(x: np.ndarray, y: np.ndarray) -> float:
    """1-D Wasserstein distance between equal-count empirical sample sets:
    mean absolute difference of the ascending-sorted values."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise ValueError(f"sample counts differ: {x.size} vs {y.size}")
    if x.size < 1:
        raise ValueError("need at least one sample")
    return float(np.mean(np.abs(np.sort(x) - np.sort(y))))


def wd1d_oracle(x: np.ndarray, y: np.ndarray) -> float:
    """Exact minimum mean-absolute pairing cost over all n! permutations.

    Test-support oracle; refuses n > 10.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise ValueError(f"sample counts differ: {x.size} vs {y.size}")
    n = x.size
    if n > 10:
        raise ValueError(f"oracle refuses n={n} (factorial blowup, max 10)")
    perms = _PERM_CACHE.get(n)
    if perms is None:
        perms = _PERM_CACHE[n] = np.array(list(itertools.permutations(range(n))))
    costs = np.abs(x[perms] - y[None, :]).mean(axis=1)
    return float(costs.min())


def swd_at_scale(level_a: np.ndarray, level_b: np.ndarray, projs: ProjectionSet) -> float:
    """Average 1-D Wasserstein distance over all projections of one scale.

    The per-projection values are accumulated serially in ascending kernel
    index so results do not depend on any internal parallel schedule.
    """
    a = np.asarray(level_a, dtype=np.float64)
    b = np.asarray(level_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    sa = np.sort(project_all(a, projs), axis=0)
    sb = np.sort(project_all(b, projs), axis=0)
    per_proj = np.abs(sa - sb).mean(axis=0)
    total = 0.0
    for v in per_proj:
        total += float(v)
    return total / projs.count


def sorted_l1_and_grad(samples_fixed_sorted: np.ndarray, samples_var: np.ndarray):
    """Transport cost of each projection column plus its gradient w.r.t. the
    variable samples.

    `samples_fixed_sorted` is (M, P) with each column already ascending;
    `samples_var` is the (M, P) variable side. Returns (per-projection costs
    (P,), gradient (M, P)). Ties take the stable-sort permutation.
    """
    m = samples_var.shape[0]
    order = np.argsort(samples_var, axis=0, kind="stable")
    var_sorted = np.take_along_axis(samples_var, order, axis=0)
    diff = var_sorted - samples_fixed_sorted
    costs = np.abs(diff).mean(axis=0)
    grad = np.zeros_like(samples_var)
    np.put_along_axis(grad, order, np.sign(diff) / m, axis=0)
    return costs, grad
