"""sRGB <-> CIELAB conversion (D65 white point, 2-degree observer).

Decoding uses the piecewise IEC 61966-2-1 transfer function. All arithmetic is
float64; `srgb_to_lab_backward` provides the exact vector-Jacobian product for
gradient flows that optimize in sRGB space.
"""

from __future__ import annotations

import numpy as np

from .validation import check_image, check_srgb_image

# Linear sRGB -> XYZ under D65, IEC 61966-2-1 primaries.
RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
XYZ_TO_RGB = np.linalg.inv(RGB_TO_XYZ)

# Reference white = RGB_TO_XYZ @ [1,1,1], so pure white maps to L*=100, a*=b*=0
# exactly rather than within matrix rounding error.
WHITE_D65 = RGB_TO_XYZ.sum(axis=1)

_DELTA = 6.0 / 29.0
_DELTA3 = _DELTA**3


def _decode_transfer(c: np.ndarray) -> np.ndarray:
    return np.where(c > 0.04045, ((c + 0.055) / 1.055) ** 2.4, c / 12.92)


def _encode_transfer(lin: np.ndarray) -> np.ndarray:
    lin = np.maximum(lin, 0.0)
    return np.where(lin > 0.0031308, 1.055 * lin ** (1.0 / 2.4) - 0.055, 12.92 * lin)


def _f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _DELTA3, np.cbrt(np.maximum(t, 0.0)), t / (3.0 * _DELTA**2) + 4.0 / 29.0)


def _finv(ft: np.ndarray) -> np.ndarray:
    return np.where(ft > _DELTA, ft**3, 3.0 * _DELTA**2 * (ft - 4.0 / 29.0))


def srgb_to_lab(img: np.ndarray) -> np.ndarray:
    """Convert an H x W x 3 sRGB image in [0, 1] to CIELAB (L*, a*, b*)."""
    rgb = check_srgb_image(img, "srgb image")
    lin = _decode_transfer(rgb)
    xyz = lin @ RGB_TO_XYZ.T
    ft = _f(xyz / WHITE_D65)
    lab = np.empty_like(ft)
    lab[..., 0] = 116.0 * ft[..., 1] - 16.0
    lab[..., 1] = 500.0 * (ft[..., 0] - ft[..., 1])
    lab[..., 2] = 200.0 * (ft[..., 1] - ft[..., 2])
    return lab


def lab_to_srgb(img: np.ndarray) -> np.ndarray:
    """Inverse of srgb_to_lab; out-of-gamut results are clipped to [0, 1]."""
    lab = check_image(img, "lab image")
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    xyz = _finv(np.stack([fx, fy, fz], axis=-1)) * WHITE_D65
    lin = xyz @ XYZ_TO_RGB.T
    return np.clip(_encode_transfer(lin), 0.0, 1.0)


def srgb_to_lab_backward(rgb: np.ndarray, grad_lab: np.ndarray) -> np.ndarray:
    """Pull a gradient w.r.t. Lab values back to a gradient w.r.t. sRGB values.

    `rgb` must be the forward input; the Jacobian is evaluated there. The
    piecewise branch points are measure-zero and take the lower branch.
    """
    rgb = np.asarray(rgb, dtype=np.float64)
    g = np.asarray(grad_lab, dtype=np.float64)
    # Lab -> f(XYZ/white)
    gfx = 500.0 * g[..., 1]
    gfy = 116.0 * g[..., 0] - 500.0 * g[..., 1] + 200.0 * g[..., 2]
    gfz = -200.0 * g[..., 2]
    gf = np.stack([gfx, gfy, gfz], axis=-1)
    # f' at the forward operating point
    lin = _decode_transfer(rgb)
    t = (lin @ RGB_TO_XYZ.T) / WHITE_D65
    fprime = np.where(t > _DELTA3, np.cbrt(np.maximum(t, _DELTA3)) ** -2 / 3.0, 1.0 / (3.0 * _DELTA**2))
    gxyz = gf * fprime / WHITE_D65
    glin = gxyz @ RGB_TO_XYZ
    dtransfer = np.where(rgb > 0.04045, (2.4 / 1.055) * ((rgb + 0.055) / 1.055) ** 1.4, 1.0 / 12.92)
    return glin * dtransfer
