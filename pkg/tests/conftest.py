import numpy as np
import pytest
from PIL import Image

from stochquant.geometry import PixelCloud


def two_cluster_cloud(rng, n_per=500, jitter=0.02, centers=((0.1,) * 3, (0.9,) * 3)):
    parts = [np.asarray(c) + rng.uniform(-jitter, jitter, size=(n_per, 3)) for c in centers]
    return PixelCloud.uniform(np.clip(np.vstack(parts), 0.0, 1.0))


def save_png(path, pixels, mode=None):
    arr = np.asarray(pixels, dtype=np.uint8)
    Image.fromarray(arr, mode).save(path)
    return str(path)


def few_color_image(rng, n_colors, shape=(16, 16)):
    """Random raster using exactly ``n_colors`` distinct RGB triples."""
    colors = set()
    while len(colors) < n_colors:
        colors.add(tuple(int(v) for v in rng.integers(0, 256, 3)))
    colors = np.array(sorted(colors), dtype=np.uint8)
    labels = rng.integers(0, n_colors, size=shape)
    labels.flat[:n_colors] = np.arange(n_colors)  # every color appears
    return colors[labels]


def smooth_image(rng, h=64, w=64):
    y, x = np.mgrid[0:h, 0:w]
    img = np.stack(
        [255 * x / (w - 1), 255 * y / (h - 1), 128 + 100 * np.sin(x / 7.0) * np.cos(y / 9.0)], axis=-1
    )
    img += rng.normal(0, 6, img.shape)
    return np.clip(img, 0, 255).astype(np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    _, outcomes = _CRITERIA.setdefault(n, (title, []))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        outcomes.append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, outcomes = _CRITERIA[n]
        if "failed" in outcomes:
            status = "FAIL"
        elif outcomes and all(o == "skipped" for o in outcomes):
            status = "SKIP"
        elif outcomes:
            status = "PASS"
        else:
            continue
        terminalreporter.write_line(f"[{status}] criterion {n}: {title}")
