import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pixfuse.image import GrayImage
from pixfuse.wavelet import (
    DB2,
    HAAR,
    WaveletError,
    WaveletPyramid,
    decompose,
    dwt2_level,
    get_wavelet,
    idwt2_level,
    reconstruct,
)

from conftest import random_image


def haar_1d(x):
    # hand-written pairwise Haar step, independent of the filter-bank code
    x = np.asarray(x, dtype=float)
    return (x[..., 0::2] + x[..., 1::2]) / math.sqrt(2), (x[..., 0::2] - x[..., 1::2]) / math.sqrt(2)


class TestLevel:
    def test_constant_image(self):
        ll, lh, hl, hh = dwt2_level(np.full((4, 6), 7.0))
        assert np.allclose(ll, 14.0, atol=1e-12)
        for band in (lh, hl, hh):
            assert np.allclose(band, 0.0, atol=1e-12)

    def test_two_by_two_block(self):
        a, b, c, d = 3.0, -1.0, 5.0, 2.0
        ll, lh, hl, hh = dwt2_level([[a, b], [c, d]])
        assert ll[0, 0] == pytest.approx((a + b + c + d) / 2, abs=1e-12)
        assert hh[0, 0] == pytest.approx((a - b - c + d) / 2, abs=1e-12)
        # rows lowpass then columns highpass, and vice versa
        assert lh[0, 0] == pytest.approx((a + b - c - d) / 2, abs=1e-12)
        assert hl[0, 0] == pytest.approx((a - b + c - d) / 2, abs=1e-12)

    def test_matches_separable_hand_haar(self, rng):
        m = rng.normal(size=(6, 8))
        lo, hi = haar_1d(m)
        ll_rows, lh_rows = haar_1d(lo.T)
        hl_rows, hh_rows = haar_1d(hi.T)
        ll, lh, hl, hh = dwt2_level(m)
        for got, want in ((ll, ll_rows.T), (lh, lh_rows.T), (hl, hl_rows.T), (hh, hh_rows.T)):
            assert np.allclose(got, want, atol=1e-12)

    @pytest.mark.parametrize("spec", [HAAR, DB2])
    def test_inverse(self, rng, spec):
        m = rng.normal(size=(8, 10))
        assert np.max(np.abs(idwt2_level(*dwt2_level(m, spec), spec) - m)) < 1e-9

    def test_degenerate_dims(self):
        with pytest.raises(WaveletError):
            dwt2_level(np.zeros((1, 4)))

    def test_odd_dims_padded_by_replication(self):
        m = np.arange(15.0).reshape(3, 5)
        ll, *_ = dwt2_level(m)
        assert ll.shape == (2, 3)
        padded = np.pad(m, ((0, 1), (0, 1)), mode="edge")
        assert np.allclose(ll, dwt2_level(padded)[0])


class TestPyramid:
    def test_one_level_constant(self):
        p = decompose(GrayImage(np.full((4, 4), 100.0)), HAAR, 1)
        assert p.approx.shape == (2, 2)
        assert np.allclose(p.approx, 200.0, atol=1e-12)
        assert all(np.allclose(b, 0, atol=1e-12) for b in p.details[0])

    def test_two_levels_constant(self):
        p = decompose(GrayImage(np.full((8, 8), 3.0)), HAAR, 2)
        assert p.approx.shape == (2, 2)
        assert np.allclose(p.approx, 12.0, atol=1e-12)

    def test_too_many_levels(self):
        with pytest.raises(WaveletError):
            decompose(GrayImage(np.zeros((4, 4))), HAAR, 3)

    def test_level_shapes_use_ceiling(self, rng):
        img = random_image(rng, 13, 22)
        p = decompose(img, HAAR, 3)
        for k, (lh, hl, hh) in enumerate(p.details, start=1):
            expect = (math.ceil(13 / 2**k), math.ceil(22 / 2**k))
            assert lh.shape == hl.shape == hh.shape == expect
        assert p.original_dims == (22, 13)
        assert np.max(np.abs(reconstruct(p).pixels - img.pixels)) < 1e-9

    def test_zero_pyramid(self, rng):
        p = decompose(random_image(rng, 8, 8), HAAR, 2).scaled(0.0)
        assert np.all(reconstruct(p).pixels == 0)

    def test_reconstruct_linear(self, rng):
        p = decompose(random_image(rng, 8, 8), HAAR, 2)
        assert np.allclose(reconstruct(p.scaled(2.5)).pixels, 2.5 * reconstruct(p).pixels, atol=1e-9)

    def test_inconsistent_pyramid(self, rng):
        p = decompose(random_image(rng, 8, 8), HAAR, 2)
        bad = WaveletPyramid(np.zeros((3, 3)), p.details, p.shapes, p.wavelet)
        with pytest.raises(WaveletError):
            reconstruct(bad)

    def test_wrong_wavelet_on_reconstruct(self, rng):
        p = decompose(random_image(rng, 8, 8), HAAR, 1)
        with pytest.raises(WaveletError):
            reconstruct(p, DB2)

    def test_lookup(self):
        assert get_wavelet("db1") is HAAR
        with pytest.raises(WaveletError):
            get_wavelet("sym4")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.sampled_from(["haar", "db2"]))
def test_energy_preserved(seed, levels, name):
    rng = np.random.default_rng(seed)
    size = 2**levels * int(rng.integers(1, 5))
    img = GrayImage(rng.uniform(0, 255, size=(size, size)))
    p = decompose(img, get_wavelet(name), levels)
    energy = float(np.sum(img.pixels**2))
    assert abs(p.coefficient_energy() - energy) <= 1e-6 * energy


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_decompose_linear(seed, a, b):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 255, size=(8, 12))
    y = rng.uniform(0, 255, size=(8, 12))
    pc = decompose(GrayImage(a * x + b * y), HAAR, 2)
    px = decompose(GrayImage(x), HAAR, 2)
    py = decompose(GrayImage(y), HAAR, 2)
    for c, u, v in zip(pc.bands(), px.bands(), py.bands()):
        assert np.max(np.abs(c - (a * u + b * v))) < 1e-9
