"""Gaussian image pyramids: separable 5-tap binomial filter, reflect boundaries.

Level 1 is the raw input; level i+1 keeps every R-th sample of the filtered
level i, trimmed to floor(h/R) x floor(w/R). The module also exposes the exact
adjoints of the smoothing and downsampling maps for reverse-mode gradients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .padding import reflect_fold, reflect_pad

BINOMIAL5 = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0
_PAD = 2


class PyramidUnderflowError(ValueError):
    """Requested more pyramid levels than the image dimensions admit."""


@dataclass
class Pyramid:
    """Ordered list of progressively downsampled images (level 1 = input)."""

    levels: list = field(default_factory=list)
    downsample_factor: int = 2

    @property
    def scale_count(self) -> int:
        return len(self.levels)

    def __len__(self) -> int:
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def __getitem__(self, i):
        return self.levels[i]


def _filter_axis0(arr: np.ndarray) -> np.ndarray:
    # valid 5-tap correlation along axis 0; arr already padded
    n = arr.shape[0] - 2 * _PAD
    out = np.zeros((n,) + arr.shape[1:], dtype=arr.dtype)
    for m, w in enumerate(BINOMIAL5):
        out += w * arr[m : m + n]
    return out


def _filter_axis0_adjoint(grad: np.ndarray) -> np.ndarray:
    n = grad.shape[0]
    out = np.zeros((n + 2 * _PAD,) + grad.shape[1:], dtype=grad.dtype)
    for m, w in enumerate(BINOMIAL5):
        out[m : m + n] += w * grad
    return out


def smooth(img: np.ndarray) -> np.ndarray:
    """Separable binomial lowpass with reflect boundary handling."""
    padded = reflect_pad(np.asarray(img, dtype=np.float64), _PAD, _PAD)
    tmp = _filter_axis0(padded)
    return _filter_axis0(tmp.swapaxes(0, 1)).swapaxes(0, 1)


def smooth_adjoint(grad: np.ndarray) -> np.ndarray:
    """Exact adjoint of `smooth` for an output gradient of the same shape."""
    g = _filter_axis0_adjoint(np.asarray(grad, dtype=np.float64).swapaxes(0, 1)).swapaxes(0, 1)
    g = _filter_axis0_adjoint(g)
    return reflect_fold(g, grad.shape[0], grad.shape[1])


def downsample(img: np.ndarray, factor: int = 2) -> np.ndarray:
    """Smooth, then keep samples 0, R, 2R, ... trimmed to floor dimensions."""
    th, tw = img.shape[0] // factor, img.shape[1] // factor
    return smooth(img)[: th * factor : factor, : tw * factor : factor]


def downsample_adjoint(grad: np.ndarray, height: int, width: int, factor: int = 2) -> np.ndarray:
    """Adjoint of `downsample` back to an image of shape (height, width)."""
    up = np.zeros((height, width) + grad.shape[2:], dtype=np.float64)
    up[: grad.shape[0] * factor : factor, : grad.shape[1] * factor : factor] = grad
    return smooth_adjoint(up)


def gaussian_pyramid(img: np.ndarray, scales: int, factor: int = 2,
                     min_size: int = 1) -> Pyramid:
    """Build a `scales`-level Gaussian pyramid of `img`.

    Raises PyramidUnderflowError when a requested level would fall below
    `min_size` pixels on either axis (or below the 3 pixels the boundary
    reflection of the filter needs).
    """
    if scales < 1:
        raise ValueError("scales must be >= 1")
    if factor < 2:
        raise ValueError("downsample factor must be >= 2")
    arr = np.asarray(img, dtype=np.float64)
    if arr.shape[0] < min_size or arr.shape[1] < min_size:
        raise PyramidUnderflowError(
            f"pyramid underflow: level 1 is {arr.shape[0]}x{arr.shape[1]}, "
            f"smaller than the minimum {min_size}"
        )
    levels = [arr]
    for i in range(1, scales):
        h, w = levels[-1].shape[:2]
        th, tw = h // factor, w // factor
        if th < max(min_size, 1) or tw < max(min_size, 1) or min(h, w) < 3:
            raise PyramidUnderflowError(
                f"pyramid underflow: level {i + 1} would be {th}x{tw}, "
                f"smaller than the minimum {min_size} (input {arr.shape[0]}x{arr.shape[1]}, "
                f"{scales} scales requested)"
            )
        levels.append(downsample(levels[-1], factor))
    return Pyramid(levels=levels, downsample_factor=factor)


def pyramid_backward(level_grads: list, shapes: list, factor: int = 2) -> np.ndarray:
    """Accumulate per-level gradients into a gradient w.r.t. the level-1 image.

    `level_grads[i]` may be None when a level received no direct contribution;
    `shapes` holds each level's (height, width).
    """
    acc = None
    for i in range(len(shapes) - 1, -1, -1):
        carried = None
        if acc is not None:
            h, w = shapes[i]
            carried = downsample_adjoint(acc, h, w, factor)
        g = level_grads[i]
        if g is None:
            acc = carried
        elif carried is None:
            acc = np.array(g, dtype=np.float64)
        else:
            acc = g + carried
    if acc is None:
        raise ValueError("no gradient contribution on any pyramid level")
    return acc
