import numpy as np
import pytest
from scipy import ndimage


def random_image(rng, dims=(1, 2, 3), max_side=12):
    """Random binary grid; odd draws are smoothed blobs, even ones noise."""
    d = int(rng.choice(dims))
    ext = tuple(int(v) for v in rng.integers(1, max_side + 1, size=d))
    density = rng.choice([0.0, 1.0, 0.3, 0.7, 0.9, rng.random()])
    img = rng.random(ext) < density
    if d > 1 and rng.random() < 0.5:
        img = ndimage.binary_opening(rng.random(ext) < 0.7)
    return img


def random_images(seed, count, **kw):
    rng = np.random.default_rng(seed)
    return [random_image(rng, **kw) for _ in range(count)]


def random_balls(rng, ext, max_balls=8):
    from sepmedial import BallSet

    n = int(np.prod(ext))
    m = int(rng.integers(0, min(max_balls, n) + 1))
    idx = rng.choice(n, size=m, replace=False)
    centers = np.stack(np.unravel_index(idx, ext, order="F"), axis=1) if m else np.zeros((0, len(ext)), np.int64)
    radii = rng.integers(1, 40, size=m)
    return BallSet(centers.astype(np.int64), radii.astype(np.int64))


def cube_image():
    img = np.zeros((22, 22, 22), bool)
    img[1:21, 1:21, 1:21] = True
    return img


@pytest.fixture(scope="session")
def cube():
    return cube_image()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
