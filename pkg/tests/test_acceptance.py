"""Acceptance suite: one test per exit criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report. Criterion 9 needs the external benchmark dataset and is skipped
unless SWCD_SPCD_MANIFEST points at its manifest CSV.
"""

import itertools
import os
import time

import numpy as np
import pytest

import swcd
from swcd.evaluation import (
    fit_logistic4,
    load_manifest,
    logistic4,
    pixelwise_de76,
    plcc,
    run_benchmark,
    srcc,
    stress,
)
from swcd.metric import SlicedWassersteinColorDistance
from swcd.optim import OptimConfig, gaussian_noise_image, recover_reference
from swcd.sliced import wd1d, wd1d_oracle

from conftest import photo


def report(n, detail):
    print(f"\nACCEPTANCE {n}: PASS ({detail})")


# -- 1: transport-oracle equivalence ------------------------------------------

def test_criterion_1_transport_oracle():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        x = rng.standard_normal(n) * rng.uniform(0.5, 4)
        y = rng.standard_normal(n) * rng.uniform(0.5, 4)
        worst = max(worst, abs(wd1d(x, y) - wd1d_oracle(x, y)))
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-9
    assert elapsed < 10.0
    report(1, f"1000 pairs, max |wd1d - exhaustive| = {worst:.2e}, {elapsed:.1f}s")


# -- 2: metric axioms ----------------------------------------------------------

def _axiom_pool():
    """60 32x32 images: photographic crops and synthetic content."""
    rng = np.random.default_rng(202)
    pool = []
    for name in ["astronaut", "coffee", "chelsea", "rocket", "hubble_deep_field",
                 "immunohistochemistry"]:
        img = photo(name)
        h, w = img.shape[:2]
        for _ in range(5):
            y0 = int(rng.integers(0, h - 32))
            x0 = int(rng.integers(0, w - 32))
            pool.append(img[y0 : y0 + 32, x0 : x0 + 32].copy())
    yy, xx = np.mgrid[0:32, 0:32] / 31.0
    for _ in range(10):  # smooth ramps
        d = rng.standard_normal(2)
        ramp = d[0] * yy + d[1] * xx
        ramp = (ramp - ramp.min()) / (ramp.max() - ramp.min() + 1e-9)
        pool.append(np.stack([ramp * rng.uniform(0.3, 1), ramp * rng.uniform(0.3, 1),
                              ramp * rng.uniform(0.3, 1)], axis=-1))
    for _ in range(10):  # iid noise around a random base color
        base = rng.uniform(0.2, 0.8, 3)
        pool.append(np.clip(base + 0.15 * rng.standard_normal((32, 32, 3)), 0, 1))
    for _ in range(10):  # soft color blobs
        img = np.zeros((32, 32, 3))
        for _ in range(3):
            cy, cx = rng.uniform(4, 28, 2)
            s = rng.uniform(3, 8)
            blob = np.exp(-((yy * 31 - cy) ** 2 + (xx * 31 - cx) ** 2) / (2 * s * s))
            img += blob[..., None] * rng.uniform(0.2, 0.8, 3)
        pool.append(np.clip(img, 0, 1))
    return pool


def test_criterion_2_metric_axioms():
    t0 = time.perf_counter()
    pool = _axiom_pool()
    n = len(pool)
    metric = SlicedWassersteinColorDistance(scales=2, patch_side=11, projections=32, seed=33)
    for img in pool:
        assert metric.distance(img, img) == 0.0
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = metric.distance(pool[i], pool[j])
    rng = np.random.default_rng(303)
    for _ in range(300):
        i, j = rng.choice(n, 2, replace=False)
        assert metric.distance(pool[i], pool[j]) == metric.distance(pool[j], pool[i])
    violations = 0
    worst_slack = np.inf
    for _ in range(10000):
        i, j, k = rng.choice(n, 3, replace=False)
        slack = d[i, k] + d[k, j] - d[i, j]
        worst_slack = min(worst_slack, slack)
        if slack < -1e-9:
            violations += 1
    elapsed = time.perf_counter() - t0
    assert violations == 0
    assert elapsed < 600.0
    report(2, f"10000 triplets, 0 violations, worst slack {worst_slack:+.2e}, "
              f"identity and symmetry exact, {elapsed:.0f}s")


# -- 3: gradient correctness ---------------------------------------------------

def test_criterion_3_gradient_vs_finite_differences():
    def lab_like(rng):
        return np.stack([rng.uniform(5, 95, (24, 24)),
                         rng.uniform(-60, 60, (24, 24)),
                         rng.uniform(-60, 60, (24, 24))], axis=-1)

    h = 3e-4
    checked = passed = 0
    for pair_seed in (0, 1, 2, 3):
        rng = np.random.default_rng(pair_seed)
        x, y = lab_like(rng), lab_like(rng)
        params = dict(scales=2, patch_side=5, projections=16, seed=3)
        metric = SlicedWassersteinColorDistance(**params)
        _, grad = metric.gradient(x, y, input_space="lab")
        probe = SlicedWassersteinColorDistance(convert_to_lab=False, **params)
        for _ in range(150):
            i, j, c = rng.integers(24), rng.integers(24), rng.integers(3)
            if abs(grad[i, j, c]) <= 1e-6:
                continue
            plus, minus = y.copy(), y.copy()
            plus[i, j, c] += h
            minus[i, j, c] -= h
            fd = (probe.distance(x, plus) - probe.distance(x, minus)) / (2 * h)
            checked += 1
            passed += abs(fd - grad[i, j, c]) <= 1e-3 * abs(grad[i, j, c])
    assert checked >= 400
    assert passed / checked >= 0.99
    report(3, f"{passed}/{checked} sampled coordinates within 1e-3 of central differences")


# -- 4: reference recovery -----------------------------------------------------

def test_criterion_4_reference_recovery():
    t0 = time.perf_counter()
    ref = swcd.resize_bilinear(photo("astronaut")[100:356, 100:356], 64, 64)
    ref_lab = swcd.srgb_to_lab(ref)
    init = gaussian_noise_image(64, 64, seed=9)

    def run(scales, steps):
        metric = SlicedWassersteinColorDistance(scales=scales, patch_side=3,
                                                projections=128, seed=0)
        cfg = OptimConfig(step_count=steps, learning_rate=1.0,
                          resample_projections_every=25)
        result = recover_reference(ref, init, metric, cfg)
        err = float(np.mean(np.abs(result.image_working - ref_lab)))
        final_score = metric.distance(ref, result.image)
        return err, result.scores[0], final_score

    err5, initial, final = run(5, 1200)
    err1, _, _ = run(1, 1200)
    elapsed = time.perf_counter() - t0
    assert err5 <= 2.0
    assert final <= 0.01 * initial
    assert err5 < err1
    assert elapsed < 900.0
    report(4, f"mean |Lab| error {err5:.2f} (K=1: {err1:.2f}), "
              f"score {initial:.2f} -> {final:.4f} ({100 * final / initial:.2f}%), {elapsed:.0f}s")


# -- 5: constant-image closed form ---------------------------------------------

def test_criterion_5_constant_image_identity():
    rng = np.random.default_rng(505)
    worst = 0.0
    for _ in range(100):
        delta = float(rng.uniform(0.05, 25.0))
        seed = int(rng.integers(0, 2**31))
        metric = SlicedWassersteinColorDistance(scales=2, patch_side=11, projections=16,
                                                seed=seed, convert_to_lab=False)
        base = np.tile(np.array([rng.uniform(10, 90), rng.uniform(-40, 40),
                                 rng.uniform(-40, 40)]), (24, 24, 1))
        shifted = base.copy()
        shifted[..., 0] += delta
        lightness_sums = metric.projection_set().channel_sums()[:, 0]
        expected = delta / 16 * float(np.sum(np.abs(lightness_sums)))
        got = metric.distance(base, shifted)
        worst = max(worst, abs(got - expected) / expected)
    assert worst <= 1e-5
    report(5, f"100 (delta, seed) combinations, worst relative deviation {worst:.2e}")


# -- 6: flip robustness contrast -------------------------------------------------

def _flip_views():
    """20 asymmetric photographic views at native resolution: whole images of
    six sources plus large side/corner crops."""
    photos = {n: photo(n) for n in ["astronaut", "coffee", "chelsea", "rocket",
                                    "hubble_deep_field", "immunohistochemistry"]}
    views = [arr for arr in photos.values()]  # 6 whole images
    a = photos["astronaut"]
    views += [a[y : y + 384, x : x + 384] for y, x in ((0, 0), (0, 128), (128, 0), (128, 128))]
    c = photos["coffee"]
    views += [c[:, x : x + 400] for x in (0, 100, 200)]
    views.append(photos["chelsea"][:, 0:300])
    views.append(photos["rocket"][:, 0:427])
    h = photos["hubble_deep_field"]
    views += [h[y : y + 512, x : x + 512] for y, x in ((0, 0), (0, 488), (360, 0), (360, 488))]
    views.append(photos["immunohistochemistry"][0:384, 0:384])
    return views


def test_criterion_6_flip_robustness():
    t0 = time.perf_counter()
    metric = SlicedWassersteinColorDistance()
    views = _flip_views()
    assert len(views) == 20
    worst = 0.0
    for img in views:
        flipped = img[:, ::-1].copy()
        baseline = pixelwise_de76(img, flipped)
        assert baseline > 5.0  # the views are genuinely asymmetric
        ratio = metric.distance(img, flipped) / baseline
        worst = max(worst, ratio)
        assert ratio <= 0.05
    report(6, f"20 native-resolution views, worst flip ratio {worst:.4f} <= 0.05, "
              f"{time.perf_counter() - t0:.0f}s")


# -- 7: evaluation-criteria correctness ------------------------------------------

def test_criterion_7_evaluation_criteria():
    value, f = stress([1.0, 2.0], [2.0, 1.0])
    assert abs(value - 60.0) <= 1e-9
    assert abs(f - 1.25) <= 1e-12

    rng = np.random.default_rng(707)
    de = rng.uniform(0.1, 5, 40)
    dv = rng.uniform(0.1, 5, 40)
    base, _ = stress(de, dv)
    for c in (1e-4, 0.3, 2.0, 1e4):
        scaled, _ = stress(c * de, dv)
        assert abs(scaled - base) <= 1e-9

    assert abs(srcc([1, 2, 3, 4], [1, 3, 2, 4]) - 0.8) <= 1e-12

    true_params = np.array([8.0, 1.0, 1.5, 0.6])
    x = np.sort(rng.uniform(-1, 4, 80))
    y = logistic4(true_params, x)
    fitted_params, fallback = fit_logistic4(x, y)
    assert not fallback
    err = np.max(np.abs(logistic4(fitted_params, x) - y))
    assert err <= 1e-4
    report(7, f"STRESS=60.0 exact, scale-invariant to 1e-9, SRCC=0.8 exact, "
              f"logistic refit max deviation {err:.2e}")


# -- 8: projection-count stability -----------------------------------------------

def test_criterion_8_projection_count_stability():
    t0 = time.perf_counter()
    rng = np.random.default_rng(808)
    sources = [photo(n) for n in ["astronaut", "coffee", "rocket", "chelsea"]]
    pairs = []
    dv = []
    direction = np.array([0.55, -0.2, 0.45])
    for i in range(200):
        src = sources[i % len(sources)]
        h, w = src.shape[:2]
        y0 = int(rng.integers(0, h - 64))
        x0 = int(rng.integers(0, w - 64))
        base = 0.2 + 0.5 * src[y0 : y0 + 64, x0 : x0 + 64]
        mag = float(rng.uniform(0.01, 0.2))
        pairs.append((base, base + direction * mag))
        dv.append(mag)

    def srcc_at(p):
        metric = SlicedWassersteinColorDistance(scales=3, patch_side=11,
                                                projections=p, seed=44)
        scores = [metric.distance(a, b) for a, b in pairs]
        return srcc(scores, dv)

    s128, s64 = srcc_at(128), srcc_at(64)
    assert abs(s128 - s64) <= 0.01

    big = photo("astronaut")[0:256, 0:256]
    other = photo("coffee")[0:256, 0:400][:, 72:328]

    def per_eval_ms(p):
        metric = SlicedWassersteinColorDistance(projections=p, seed=1)
        metric.distance(big, other)  # warm up
        t = time.perf_counter()
        for _ in range(3):
            metric.distance(big, other)
        return (time.perf_counter() - t) / 3 * 1000

    ms128, ms16 = per_eval_ms(128), per_eval_ms(16)
    assert ms128 <= 4.0 * ms16
    report(8, f"SRCC stability |{s128:.4f} - {s64:.4f}| = {abs(s128 - s64):.4f} <= 0.01; "
              f"P=128 {ms128:.0f}ms vs P=16 {ms16:.0f}ms ({ms128 / ms16:.2f}x <= 4x), "
              f"{time.perf_counter() - t0:.0f}s")


# -- 9: external benchmark numbers (conditional) ----------------------------------

@pytest.mark.skipif("SWCD_SPCD_MANIFEST" not in os.environ,
                    reason="ACCEPTANCE 9: SKIPPED (conditional: external benchmark "
                           "manifest not provided via SWCD_SPCD_MANIFEST)")
def test_criterion_9_external_benchmark():
    records = load_manifest(os.environ["SWCD_SPCD_MANIFEST"])
    subset = [r for r in records if r.alignment == "non_aligned"]
    assert len(subset) >= 2, "manifest has no non-aligned subset"
    summaries = run_benchmark(subset, SlicedWassersteinColorDistance(), size=256)
    s = summaries["non_aligned"]
    assert abs(s.plcc - 0.841) <= 0.02
    assert abs(s.srcc - 0.805) <= 0.02
    assert abs(s.stress - 28.363) <= 1.0
    report(9, f"non-aligned subset: STRESS {s.stress:.3f}, PLCC {s.plcc:.3f}, "
              f"SRCC {s.srcc:.3f} within tolerance of the published values")
