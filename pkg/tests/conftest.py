import numpy as np
import pytest

from pixfuse.image import GrayImage


def random_image(rng, h, w, low=0, high=256):
    return GrayImage(rng.integers(low, high, size=(h, w)).astype(float))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def smooth_scene(size=64):
    """Deterministic textured test scene with values in [0, 255]."""
    y, x = np.mgrid[0:size, 0:size] / size
    img = 128 + 60 * np.sin(7 * x) * np.cos(5 * y) + 50 * ((x * 8).astype(int) % 2 - 0.5) * ((y * 8).astype(int) % 2)
    return GrayImage(np.clip(np.round(img), 0, 255))


# acceptance criteria report one line each at the end of the run
_ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    def record(number, passed, detail):
        _ACCEPTANCE[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
