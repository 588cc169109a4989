"""End-to-end color-difference metric and its spatial attribution map.

The score of an image pair is the average, over pyramid scales and random
unit projections, of the 1-D Wasserstein distance between the projected patch
samples of the two images, computed in CIELAB. `SlicedWassersteinColorDistance`
packages the hyperparameters as an sklearn-style estimator so the metric
composes with that ecosystem (get_params/set_params/clone).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .color import srgb_to_lab, srgb_to_lab_backward
from .projections import ProjectionSet, sample_projections
from .pyramid import gaussian_pyramid, pyramid_backward
from .sliced import project_all, project_all_backward, sorted_l1_and_grad
from .validation import check_image, check_same_shape, check_srgb_image


@dataclass(frozen=True)
class CdScore:
    """Scalar color-difference prediction plus the config fingerprint."""

    value: float
    fingerprint: str

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class CdMap:
    """Per-pixel attribution of the score; the map mean equals the score."""

    data: np.ndarray  # (H, W) nonnegative float64
    value: float
    fingerprint: str

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


class SlicedWassersteinColorDistance(BaseEstimator):
    """Training-free perceptual color-difference metric.

    Parameters
    ----------
    scales : int, default 5
        Number of Gaussian-pyramid levels compared.
    downsample : int, default 2
        Pyramid downsampling factor between levels.
    patch_side : int, default 11
        Side of the (odd) square projection kernels; a patch holds
        3 * patch_side**2 values.
    projections : int, default 128
        Number of random unit projections averaged per scale.
    seed : int, default 0
        Seed of the counter-based generator that draws the projection set.
        The same set serves both images and every scale.
    convert_to_lab : bool, default True
        Convert sRGB inputs to CIELAB before comparing. Disable to measure
        distances directly in the input space.
    """

    def __init__(self, scales=5, downsample=2, patch_side=11, projections=128,
                 seed=0, convert_to_lab=True):
        self.scales = scales
        self.downsample = downsample
        self.patch_side = patch_side
        self.projections = projections
        self.seed = seed
        self.convert_to_lab = convert_to_lab
        self._proj_cache = {}

    # -- configuration ----------------------------------------------------

    def _validate(self) -> None:
        if self.scales < 1:
            raise ValueError("scales must be >= 1")
        if self.downsample < 2:
            raise ValueError("downsample must be >= 2")
        if self.patch_side < 3 or self.patch_side % 2 == 0:
            raise ValueError("patch_side must be odd and >= 3")
        if self.projections < 1:
            raise ValueError("projections must be >= 1")

    def fingerprint(self) -> str:
        """Stable hash of the effective configuration, seed included."""
        parts = "|".join(f"{k}={v!r}" for k, v in sorted(self.get_params().items()))
        return hashlib.sha256(parts.encode()).hexdigest()[:16]

    def projection_set(self) -> ProjectionSet:
        key = (int(self.seed), int(self.projections), int(self.patch_side))
        pset = self._proj_cache.get(key)
        if pset is None:
            self._validate()
            pset = sample_projections(*key)
            self._proj_cache = {key: pset}
        return pset

    # -- input handling ----------------------------------------------------

    def _to_working(self, img, name: str) -> np.ndarray:
        if self.convert_to_lab:
            return srgb_to_lab(check_srgb_image(img, name))
        return check_image(img, name)

    def _pyramid(self, working: np.ndarray):
        return gaussian_pyramid(working, self.scales, self.downsample,
                                min_size=self.patch_side)

    # -- scoring -----------------------------------------------------------

    def distance(self, image_a, image_b) -> float:
        """Color difference between two images of identical dimensions."""
        return self.distance_detail(image_a, image_b).value

    __call__ = distance

    def distance_detail(self, image_a, image_b) -> CdScore:
        self._validate()
        a = self._to_working(image_a, "first image")
        b = self._to_working(image_b, "second image")
        check_same_shape(a, b)
        projs = self.projection_set()
        total = 0.0
        for level_a, level_b in zip(self._pyramid(a), self._pyramid(b)):
            sa = np.sort(project_all(level_a, projs), axis=0)
            sb = np.sort(project_all(level_b, projs), axis=0)
            per_proj = np.abs(sa - sb).mean(axis=0)
            for v in per_proj:
                total += float(v)
        value = total / (self.scales * self.projections)
        return CdScore(value=value, fingerprint=self.fingerprint())

    def distance_map(self, image_a, image_b) -> CdMap:
        """Score plus a full-resolution spatial attribution map.

        After sorting, each rank's contribution |a_(k) - b_(k)| / M is
        credited to the pixel of `image_a` holding that rank; per-scale maps
        are replicated back to full resolution (block-area corrected so the
        repartition is exact) and averaged over scales and projections.
        """
        self._validate()
        a = self._to_working(image_a, "first image")
        b = self._to_working(image_b, "second image")
        check_same_shape(a, b)
        projs = self.projection_set()
        height, width = a.shape[:2]
        total = 0.0
        acc = np.zeros((height, width), dtype=np.float64)
        for level_a, level_b in zip(self._pyramid(a), self._pyramid(b)):
            h, w = level_a.shape[:2]
            m = h * w
            raw_a = project_all(level_a, projs)
            order_a = np.argsort(raw_a, axis=0, kind="stable")
            sa = np.take_along_axis(raw_a, order_a, axis=0)
            sb = np.sort(project_all(level_b, projs), axis=0)
            diff = np.abs(sa - sb)
            for v in diff.mean(axis=0):
                total += float(v)
            contrib = diff / m
            coarse = np.zeros(m, dtype=np.float64)
            np.add.at(coarse, order_a, contrib)
            acc += _replicate_conserving(coarse.reshape(h, w), height, width)
        norm = self.scales * self.projections
        value = total / norm
        data = acc * (height * width / norm)
        return CdMap(data=data, value=value, fingerprint=self.fingerprint())

    def gradient(self, image_a, image_b, input_space: str = "lab"):
        """Score and its exact reverse-mode gradient w.r.t. `image_b`.

        With `input_space="lab"` (and convert_to_lab=True) both images are
        CIELAB arrays and the gradient lives in Lab units; with "srgb" the
        inputs are sRGB in [0, 1] and the gradient is pulled through the
        color-conversion Jacobian.
        """
        self._validate()
        if input_space not in ("lab", "srgb"):
            raise ValueError(f"unknown input_space {input_space!r}")
        chain_srgb = self.convert_to_lab and input_space == "srgb"
        if chain_srgb:
            a_in = check_srgb_image(image_a, "first image")
            b_in = check_srgb_image(image_b, "second image")
            a, b = srgb_to_lab(a_in), srgb_to_lab(b_in)
        else:
            a = check_image(image_a, "first image")
            b = check_image(image_b, "second image")
        check_same_shape(a, b)
        projs = self.projection_set()
        pyr_a, pyr_b = self._pyramid(a), self._pyramid(b)
        shapes = [lvl.shape[:2] for lvl in pyr_b]
        total = 0.0
        level_grads = []
        for level_a, level_b in zip(pyr_a, pyr_b):
            fixed_sorted = np.sort(project_all(level_a, projs), axis=0)
            var_samples = project_all(level_b, projs)
            costs, sample_grad = sorted_l1_and_grad(fixed_sorted, var_samples)
            for v in costs:
                total += float(v)
            h, w = level_b.shape[:2]
            level_grads.append(project_all_backward(sample_grad, projs, h, w))
        norm = self.scales * self.projections
        grad = pyramid_backward(level_grads, shapes, self.downsample) / norm
        if chain_srgb:
            grad = srgb_to_lab_backward(b_in, grad)
        return total / norm, grad


def _replicate_conserving(coarse: np.ndarray, height: int, width: int) -> np.ndarray:
    """Nearest-neighbor replication of a coarse map, each block divided by its
    area so the total mass is preserved exactly for non-dyadic sizes too."""
    h, w = coarse.shape
    rows = (np.arange(height) * h) // height
    cols = (np.arange(width) * w) // width
    area = np.bincount(rows, minlength=h)[:, None] * np.bincount(cols, minlength=w)[None, :]
    scaled = coarse / area
    return scaled[rows][:, cols]
