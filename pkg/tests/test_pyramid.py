import numpy as np
import pytest

from swcd.pyramid import (
    BINOMIAL5,
    PyramidUnderflowError,
    downsample,
    downsample_adjoint,
    gaussian_pyramid,
    smooth,
    smooth_adjoint,
)


def naive_smooth(img):
    """Hand convolution with explicit mirror indexing (oracle)."""
    h, w = img.shape[:2]
    out = np.zeros_like(img)

    def mirror(i, n):
        period = 2 * (n - 1)
        i = abs(i) % period
        return period - i if i >= n else i

    for y in range(h):
        for x in range(w):
            acc = 0.0
            for dy in range(-2, 3):
                for dx in range(-2, 3):
                    wgt = BINOMIAL5[dy + 2] * BINOMIAL5[dx + 2]
                    acc += wgt * img[mirror(y + dy, h), mirror(x + dx, w)]
            out[y, x] = acc
    return out


def test_constant_image_stays_constant():
    img = np.full((64, 48, 3), 0.37)
    pyr = gaussian_pyramid(img, 4)
    for level in pyr:
        assert np.allclose(level, 0.37, atol=1e-12)


def test_level_dimensions_256():
    img = np.zeros((256, 256, 3))
    pyr = gaussian_pyramid(img, 5)
    assert [lvl.shape[0] for lvl in pyr] == [256, 128, 64, 32, 16]
    assert [lvl.shape[1] for lvl in pyr] == [256, 128, 64, 32, 16]


def test_floor_dimensions_for_odd_sizes():
    img = np.zeros((45, 33, 3))
    pyr = gaussian_pyramid(img, 3)
    assert [lvl.shape[:2] for lvl in pyr] == [(45, 33), (22, 16), (11, 8)]


def test_impulse_level2_equals_subsampled_taps():
    img = np.zeros((32, 32, 1))
    img[16, 16, 0] = 1.0
    level2 = gaussian_pyramid(img, 2)[1][..., 0]
    expected = naive_smooth(img[..., 0])[::2, ::2]
    assert np.max(np.abs(level2 - expected)) < 1e-12


def test_smooth_matches_naive_oracle():
    rng = np.random.default_rng(5)
    img = rng.random((13, 11))
    assert np.max(np.abs(smooth(img) - naive_smooth(img))) < 1e-12


def test_mean_approximately_preserved():
    rng = np.random.default_rng(2)
    img = rng.random((64, 64, 3))
    pyr = gaussian_pyramid(img, 4)
    for a, b in zip(pyr.levels, pyr.levels[1:]):
        for c in range(3):
            ma, mb = a[..., c].mean(), b[..., c].mean()
            assert abs(mb - ma) <= 0.02 * abs(ma)


def test_shift_by_factor_shifts_level2_by_one():
    rng = np.random.default_rng(3)
    img = rng.random((64, 64, 3))
    shifted = np.roll(img, 2, axis=1)
    a = gaussian_pyramid(img, 2)[1]
    b = gaussian_pyramid(shifted, 2)[1]
    # compare interiors more than one kernel radius from the borders
    assert np.allclose(a[4:-4, 4:-5], b[4:-4, 5:-4], atol=1e-12)


def test_single_scale_returns_input_bit_exact():
    rng = np.random.default_rng(4)
    img = rng.random((20, 20, 3))
    pyr = gaussian_pyramid(img, 1)
    assert pyr.scale_count == 1
    assert np.array_equal(pyr[0], img)


def test_underflow_names_failing_level():
    img = np.zeros((32, 32, 3))
    with pytest.raises(PyramidUnderflowError, match="pyramid underflow.*level 3"):
        gaussian_pyramid(img, 3, min_size=11)


def test_smooth_adjoint_dot_product_identity():
    rng = np.random.default_rng(6)
    x = rng.random((9, 12, 3))
    y = rng.random((9, 12, 3))
    lhs = np.sum(smooth(x) * y)
    rhs = np.sum(x * smooth_adjoint(y))
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


def test_downsample_adjoint_dot_product_identity():
    rng = np.random.default_rng(7)
    x = rng.random((11, 13, 3))
    down = downsample(x)
    y = rng.random(down.shape)
    lhs = np.sum(down * y)
    rhs = np.sum(x * downsample_adjoint(y, 11, 13))
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))
