"""Benchmark harness: correlation criteria, geometric augmentations, and the
pixelwise CIELAB baseline.

A benchmark manifest is a UTF-8 CSV with header `reference,test,dv,alignment`
(paths relative to the manifest's directory). The harness scores every pair,
then reports STRESS, logistic-linearized PLCC, and SRCC per alignment subgroup
and overall, to `scores.csv` and `summary.json` with stable field ordering.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares
from scipy.stats import rankdata

from .color import srgb_to_lab
from .metric import SlicedWassersteinColorDistance
from .padding import shift_indices
from .validation import check_same_shape, check_srgb_image, check_vector


class DegenerateInputError(ValueError):
    """Inputs admit no defined value (constant vectors, zero cross terms)."""


# -- correlation criteria ---------------------------------------------------

def stress(de, dv) -> tuple[float, float]:
    """Standardized residual sum of squares and the scale factor between
    predictions and ground truth.

    F = sum(de^2) / sum(de*dv); STRESS = 100 * sqrt(sum((de - F*dv)^2) /
    (F^2 * sum(dv^2))). Scale-invariant in `de`; 0 means a perfect
    proportional fit.
    """
    de = check_vector(de, "de", 2)
    dv = check_vector(dv, "dv", 2)
    if de.size != dv.size:
        raise ValueError(f"length mismatch: {de.size} vs {dv.size}")
    if not np.any(de != 0.0):
        raise DegenerateInputError("all predictions are zero")
    if not np.any(dv != 0.0):
        raise DegenerateInputError("all ground-truth values are zero")
    cross = float(np.dot(de, dv))
    if cross == 0.0:
        raise DegenerateInputError("predictions and ground truth are orthogonal (sum de*dv = 0)")
    f = float(np.dot(de, de)) / cross
    num = float(np.sum((de - f * dv) ** 2))
    den = f * f * float(np.dot(dv, dv))
    return 100.0 * float(np.sqrt(num / den)), f


def plcc(x, y) -> float:
    """Pearson linear correlation coefficient."""
    x = check_vector(x, "x", 2)
    y = check_vector(y, "y", 2)
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt(np.sum(xc * xc) * np.sum(yc * yc))
    if denom == 0.0:
        raise DegenerateInputError("correlation undefined for a constant input")
    return float(np.sum(xc * yc) / denom)


def srcc(x, y) -> float:
    """Spearman rank correlation: Pearson on average ranks (ties averaged)."""
    x = check_vector(x, "x", 2)
    y = check_vector(y, "y", 2)
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    return plcc(rankdata(x, method="average"), rankdata(y, method="average"))


def logistic4(params, x) -> np.ndarray:
    """Monotone four-parameter logistic: (b1-b2)/(1+exp(-(x-b3)/|b4|)) + b2."""
    b1, b2, b3, b4 = params
    return (b1 - b2) / (1.0 + np.exp(-(np.asarray(x, dtype=np.float64) - b3) / abs(b4))) + b2


def fit_logistic4(de, dv):
    """Least-squares fit of the four-parameter logistic mapping de -> dv.

    Damped nonlinear least squares from a data-driven start (b1, b2 = max/min
    of dv; b3 = median of de; b4 = std of de). Returns (params, fallback):
    on a non-finite fit the affine least-squares fit is returned instead,
    encoded as a logistic evaluated in its near-linear regime, and `fallback`
    is True.
    """
    de = check_vector(de, "de", 5)
    dv = check_vector(dv, "dv", 5)
    if de.size != dv.size:
        raise ValueError(f"length mismatch: {de.size} vs {dv.size}")
    if float(de.max() - de.min()) == 0.0:
        raise DegenerateInputError("predictions are constant; logistic fit undefined")
    sd = float(de.std())
    start = np.array([float(dv.max()), float(dv.min()), float(np.median(de)), sd if sd > 0 else 1.0])

    def residual(p):
        return logistic4(p, de) - dv

    try:
        sol = least_squares(residual, start, method="lm", max_nfev=20000)
        ok = np.all(np.isfinite(sol.x)) and np.isfinite(sol.cost) and abs(sol.x[3]) > 0
    except Exception:
        ok = False
    if ok:
        return np.asarray(sol.x, dtype=np.float64), False
    return _affine_params(de, dv), True


def _affine_params(de, dv) -> np.ndarray:
    """Affine least-squares fit a*x + b encoded in the logistic's linear regime."""
    a, b = np.polyfit(de, dv, 1)
    span = max(float(np.max(de) - np.min(de)), 1.0)
    scale = 1e6 * span
    mid = b + a * float(np.median(de))
    return np.array([mid + a * scale, mid - a * scale, float(np.median(de)), scale / 2.0])


def plcc_after_logistic(de, dv) -> tuple[float, np.ndarray, bool]:
    """PLCC between logistic-linearized predictions and ground truth."""
    params, fallback = fit_logistic4(de, dv)
    fitted = logistic4(params, de)
    if float(fitted.max() - fitted.min()) == 0.0:
        # fit collapsed; fall back to raw correlation
        return plcc(de, dv), params, True
    return plcc(fitted, dv), params, fallback


# -- baselines and augmentations ---------------------------------------------

def pixelwise_de76(image_a, image_b) -> float:
    """Mean over pixels of the Euclidean CIELAB distance at co-located pixels."""
    a = check_srgb_image(image_a, "first image")
    b = check_srgb_image(image_b, "second image")
    check_same_shape(a, b)
    diff = srgb_to_lab(a) - srgb_to_lab(b)
    return float(np.mean(np.sqrt(np.sum(diff * diff, axis=2))))


def augment(img, kind: str, seed: int = 0) -> np.ndarray:
    """Geometric perturbations used for misalignment-robustness protocols.

    translate: integer shift up to 5% of each axis (reflect filled);
    dilate: bilinear upscale by 1.1 then center crop; flip: horizontal mirror.
    """
    arr = check_srgb_image(img, "image")
    if kind == "none" or kind is None:
        return arr
    if kind == "flip":
        return arr[:, ::-1].copy()
    if kind == "translate":
        rng = np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, 0x7A]))
        h, w = arr.shape[:2]
        max_dy, max_dx = int(0.05 * h), int(0.05 * w)
        dy = int(rng.integers(-max_dy, max_dy + 1))
        dx = int(rng.integers(-max_dx, max_dx + 1))
        return arr[shift_indices(h, dy)][:, shift_indices(w, dx)]
    if kind == "dilate":
        from .imgio import resize_bilinear

        h, w = arr.shape[:2]
        nh, nw = int(round(1.1 * h)), int(round(1.1 * w))
        big = resize_bilinear(arr, nh, nw)
        top, left = (nh - h) // 2, (nw - w) // 2
        return big[top : top + h, left : left + w]
    raise ValueError(f"unknown augmentation {kind!r}")


# -- benchmark runner --------------------------------------------------------

@dataclass
class EvalRecord:
    reference_path: str
    test_path: str
    dv: float
    alignment: str = "unknown"  # {aligned, non_aligned, unknown}


@dataclass
class EvalSummary:
    stress: float
    plcc: float
    srcc: float
    scale_factor: float
    logistic_params: tuple
    pair_count: int
    fingerprint: str
    plcc_raw: float = float("nan")
    logistic_fallback: bool = False
    skipped_count: int = 0

    def as_dict(self) -> dict:
        return {
            "stress": self.stress,
            "plcc": self.plcc,
            "srcc": self.srcc,
            "scale_factor": self.scale_factor,
            "logistic_params": list(self.logistic_params),
            "pair_count": self.pair_count,
            "fingerprint": self.fingerprint,
            "plcc_raw": self.plcc_raw,
            "logistic_fallback": self.logistic_fallback,
            "skipped_count": self.skipped_count,
        }


_ALIGNMENTS = ("aligned", "non_aligned", "unknown")


def load_manifest(path) -> list[EvalRecord]:
    """Read a `reference,test,dv,alignment` CSV; paths resolve relative to it."""
    base = os.path.dirname(os.path.abspath(path))
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"reference", "test", "dv"}
        if reader.fieldnames is None or not required.issubset(set(reader.fieldnames)):
            raise ValueError(f"{path}: manifest header must contain reference,test,dv[,alignment]")
        for row in reader:
            alignment = (row.get("alignment") or "unknown").strip() or "unknown"
            if alignment not in _ALIGNMENTS:
                raise ValueError(f"{path}: unknown alignment tag {alignment!r}")
            dv = float(row["dv"])
            if dv < 0:
                raise ValueError(f"{path}: negative ground-truth value {dv}")
            records.append(EvalRecord(
                reference_path=os.path.join(base, row["reference"]),
                test_path=os.path.join(base, row["test"]),
                dv=dv, alignment=alignment))
    return records


def summarize(de, dv, fingerprint: str, skipped: int = 0) -> EvalSummary:
    de = np.asarray(de, dtype=np.float64)
    dv = np.asarray(dv, dtype=np.float64)
    stress_value, f = stress(de, dv)
    raw = plcc(de, dv)
    if de.size >= 5 and float(de.max() - de.min()) > 0:
        linearized, params, fallback = plcc_after_logistic(de, dv)
    else:
        # too few pairs for the four-parameter fit; affine linearization
        # preserves the raw correlation exactly
        linearized, params, fallback = raw, _affine_params(de, dv), True
    return EvalSummary(
        stress=stress_value, plcc=linearized, srcc=srcc(de, dv), scale_factor=f,
        logistic_params=tuple(float(p) for p in params), pair_count=int(de.size),
        fingerprint=fingerprint, plcc_raw=raw, logistic_fallback=fallback,
        skipped_count=skipped)


def run_benchmark(records, metric: SlicedWassersteinColorDistance | None = None,
                  augmentation: str | None = None, out_dir=None, size: int = 256,
                  loader=None) -> dict:
    """Score every manifest pair and summarize per alignment subgroup.

    The test image of each pair is optionally augmented. Unreadable images
    skip the record (counted, never silent). Subgroups with fewer than two
    scored pairs are not reported; "all" covers every scored pair.
    """
    metric = metric or SlicedWassersteinColorDistance()
    if loader is None:
        from .imgio import load_image, resize_bilinear

        def loader(path):
            img = load_image(path)
            if size and img.shape[:2] != (size, size):
                img = resize_bilinear(img, size, size)
            return img

    rows = []
    skipped = 0
    for i, rec in enumerate(records):
        try:
            ref = loader(rec.reference_path)
            test = loader(rec.test_path)
        except (OSError, ValueError) as exc:
            skipped += 1
            rows.append((rec, None, f"skipped: {exc}"))
            continue
        if augmentation and augmentation != "none":
            test = augment(test, augmentation, seed=metric.seed + i)
        rows.append((rec, metric.distance(ref, test), ""))

    fingerprint = metric.fingerprint()
    summaries = {}
    scored = [(rec, de) for rec, de, _ in rows if de is not None]
    for tag in _ALIGNMENTS:
        group = [(rec, de) for rec, de in scored if rec.alignment == tag]
        if len(group) >= 2:
            summaries[tag] = summarize([de for _, de in group], [rec.dv for rec, _ in group],
                                       fingerprint)
    if len(scored) >= 2:
        summaries["all"] = summarize([de for _, de in scored], [rec.dv for rec, _ in scored],
                                     fingerprint, skipped=skipped)

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "scores.csv"), "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["reference", "test", "de", "dv", "alignment", "note"])
            for rec, de, note in rows:
                writer.writerow([rec.reference_path, rec.test_path,
                                 "" if de is None else f"{de:.9g}", f"{rec.dv:.9g}",
                                 rec.alignment, note])
        report = {
            "config": dict(sorted(metric.get_params().items())),
            "fingerprint": fingerprint,
            "augmentation": augmentation or "none",
            "resize": size,
            "record_count": len(records),
            "skipped_count": skipped,
            "subgroups": {tag: s.as_dict() for tag, s in summaries.items()},
        }
        with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return summaries
