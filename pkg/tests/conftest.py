import numpy as np
import pytest

skimage_data = pytest.importorskip("skimage.data")


def photo(name: str) -> np.ndarray:
    return np.asarray(getattr(skimage_data, name)(), dtype=np.float64) / 255.0


@pytest.fixture(scope="session")
def astronaut():
    return photo("astronaut")


@pytest.fixture(scope="session")
def coffee():
    return photo("coffee")


@pytest.fixture(scope="session")
def photo_crops_32():
    """Photographic 32x32 crops for metric-axiom style tests."""
    crops = []
    rng = np.random.default_rng(42)
    for name in ["astronaut", "coffee", "chelsea", "rocket", "hubble_deep_field",
                 "immunohistochemistry"]:
        img = photo(name)
        h, w = img.shape[:2]
        for _ in range(5):
            y0 = int(rng.integers(0, h - 32))
            x0 = int(rng.integers(0, w - 32))
            crops.append(img[y0 : y0 + 32, x0 : x0 + 32].copy())
    return crops
