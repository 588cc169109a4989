"""Image file IO, resizing, and map export.

Supported formats: PNG and PPM/PGM, 8- or 16-bit (JPEG is deliberately
rejected: lossy artifacts confound color-difference measurements). Pixel data
normalizes to [0, 1] floats; grayscale files replicate to three channels.
"""

from __future__ import annotations

import os
import struct

import cv2
import numpy as np

from .validation import check_srgb_image

_EXTENSIONS = {".png", ".ppm", ".pgm", ".pnm"}
_RAW_MAGIC_LEN = 8


class ImageFormatError(ValueError):
    """Unsupported, missing, or corrupt image file."""


def load_image(path) -> np.ndarray:
    """Decode a PNG/PPM image to an HxWx3 float32-backed array in [0, 1]."""
    ext = os.path.splitext(str(path))[1].lower()
    if ext not in _EXTENSIONS:
        raise ImageFormatError(f"{path}: unsupported format {ext or '(none)'}; expected PNG or PPM")
    if not os.path.exists(path):
        raise ImageFormatError(f"{path}: file not found")
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise ImageFormatError(f"{path}: failed to decode (truncated or corrupt file)")
    if raw.dtype == np.uint8:
        img = raw.astype(np.float32) / 255.0
    elif raw.dtype == np.uint16:
        img = raw.astype(np.float32) / 65535.0
    else:
        raise ImageFormatError(f"{path}: unsupported sample type {raw.dtype}")
    if img.ndim == 2:
        img = np.repeat(img[:, :, None], 3, axis=2)
    elif img.ndim == 3 and img.shape[2] == 4:
        img = img[:, :, :3][:, :, ::-1].copy()  # drop alpha, BGR -> RGB
    elif img.ndim == 3 and img.shape[2] == 3:
        img = img[:, :, ::-1].copy()  # BGR -> RGB
    else:
        raise ImageFormatError(f"{path}: unsupported channel layout {img.shape}")
    return np.asarray(img, dtype=np.float64)


def save_image(path, img, bit_depth: int = 8) -> None:
    """Encode an sRGB float image in [0, 1] as 8- or 16-bit PNG/PPM."""
    arr = check_srgb_image(img, "image")
    ext = os.path.splitext(str(path))[1].lower()
    if ext not in _EXTENSIONS:
        raise ImageFormatError(f"{path}: unsupported output format {ext or '(none)'}")
    if bit_depth == 8:
        data = np.round(arr * 255.0).astype(np.uint8)
    elif bit_depth == 16:
        data = np.round(arr * 65535.0).astype(np.uint16)
    else:
        raise ValueError("bit_depth must be 8 or 16")
    if not cv2.imwrite(str(path), data[:, :, ::-1]):
        raise ImageFormatError(f"{path}: failed to write image")


def resize_bilinear(img, height: int, width: int) -> np.ndarray:
    """Separable bilinear resampling with half-pixel-centered sample points."""
    if height < 1 or width < 1:
        raise ValueError("target dimensions must be >= 1")
    arr = np.asarray(img, dtype=np.float64)
    arr = _interp_axis(arr, height, axis=0)
    return _interp_axis(arr, width, axis=1)


def _interp_axis(arr: np.ndarray, target: int, axis: int) -> np.ndarray:
    n = arr.shape[axis]
    coords = np.clip((np.arange(target) + 0.5) * (n / target) - 0.5, 0.0, n - 1.0)
    lo = np.floor(coords).astype(np.intp)
    hi = np.minimum(lo + 1, n - 1)
    frac = coords - lo
    shape = [1] * arr.ndim
    shape[axis] = target
    frac = frac.reshape(shape)
    return np.take(arr, lo, axis=axis) * (1.0 - frac) + np.take(arr, hi, axis=axis) * frac


# -- CD-map export ------------------------------------------------------------

def save_map_raw(path, map_data: np.ndarray) -> None:
    """Raw map format: uint32 LE height, uint32 LE width, then row-major
    float32 LE values."""
    data = np.asarray(map_data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("map must be 2-D")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", data.shape[0], data.shape[1]))
        fh.write(data.astype("<f4").tobytes())


def load_map_raw(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(_RAW_MAGIC_LEN)
        if len(head) != _RAW_MAGIC_LEN:
            raise ImageFormatError(f"{path}: truncated raw map header")
        h, w = struct.unpack("<II", head)
        body = np.frombuffer(fh.read(), dtype="<f4")
    if body.size != h * w:
        raise ImageFormatError(f"{path}: raw map has {body.size} values, expected {h * w}")
    return body.astype(np.float64).reshape(h, w)


# Warm perceptual ramp (dark blue -> magenta -> orange -> light yellow),
# anchors interpolated linearly into a 256-entry LUT.
_MAP_ANCHORS = np.array([
    [0.001, 0.000, 0.014],
    [0.135, 0.053, 0.335],
    [0.342, 0.096, 0.482],
    [0.551, 0.161, 0.478],
    [0.736, 0.256, 0.398],
    [0.886, 0.389, 0.280],
    [0.973, 0.581, 0.146],
    [0.991, 0.812, 0.220],
    [0.988, 0.998, 0.645],
])


def colormap_lut() -> np.ndarray:
    """256x3 uint8 lookup table of the map colormap."""
    pos = np.linspace(0.0, 1.0, len(_MAP_ANCHORS))
    xs = np.linspace(0.0, 1.0, 256)
    lut = np.stack([np.interp(xs, pos, _MAP_ANCHORS[:, c]) for c in range(3)], axis=1)
    return np.round(lut * 255.0).astype(np.uint8)


def save_map_png(path, map_data: np.ndarray) -> None:
    """Colormapped 8-bit PNG of a map; values scale linearly from 0 to the max."""
    data = np.asarray(map_data, dtype=np.float64)
    peak = float(data.max())
    norm = data / peak if peak > 0 else np.zeros_like(data)
    idx = np.clip(np.round(norm * 255.0), 0, 255).astype(np.intp)
    rgb = colormap_lut()[idx]
    if not cv2.imwrite(str(path), rgb[:, :, ::-1]):
        raise ImageFormatError(f"{path}: failed to write map image")
