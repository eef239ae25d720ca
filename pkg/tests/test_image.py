import os
import stat

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pixfuse.image import (
    BadMaxvalError,
    DimensionMismatchError,
    GrayImage,
    PGMError,
    TruncatedDataError,
    UnsupportedFormatError,
    crop_to_common,
    histogram,
    joint_histogram,
    load_pgm,
    quantize,
    save_pgm,
)

from conftest import random_image

SQUARE = GrayImage.from_list(2, 2, [0, 64, 128, 255])


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_bytes(data)
    return p


class TestPGM:
    def test_load_ascii(self, tmp_path):
        img = load_pgm(write(tmp_path, "a.pgm", b"P2\n2 2\n255\n0 64 128 255"))
        assert img == SQUARE

    def test_load_binary_matches_ascii(self, tmp_path):
        img = load_pgm(write(tmp_path, "b.pgm", b"P5\n2 2\n255\n" + bytes([0, 64, 128, 255])))
        assert img == SQUARE

    def test_header_comments(self, tmp_path):
        data = b"P2\n# made by hand\n2 # width\n2\n255\n0 64\n# row two\n128 255\n"
        assert load_pgm(write(tmp_path, "c.pgm", data)) == SQUARE

    def test_binary_payload_starting_with_whitespace_byte(self, tmp_path):
        # first pixel is 10 (newline) and must not be eaten by the header parser
        data = b"P5 2 1 255\n" + bytes([10, 32])
        assert load_pgm(write(tmp_path, "w.pgm", data)).pixels.tolist() == [[10.0, 32.0]]

    def test_unsupported_magic(self, tmp_path):
        with pytest.raises(UnsupportedFormatError):
            load_pgm(write(tmp_path, "x.pgm", b"P7\n2 2\n255\n"))

    def test_maxval_too_large(self, tmp_path):
        with pytest.raises(BadMaxvalError):
            load_pgm(write(tmp_path, "x.pgm", b"P2\n1 1\n65535\n0"))

    @pytest.mark.parametrize("data", [b"P5\n2 2\n255\n\x00\x01", b"P2\n2 2\n255\n0 1 2", b"P2\n2"])
    def test_truncated(self, tmp_path, data):
        with pytest.raises(TruncatedDataError):
            load_pgm(write(tmp_path, "t.pgm", data))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_pgm(tmp_path / "nope.pgm")

    def test_error_classes_are_distinct(self):
        classes = {UnsupportedFormatError, BadMaxvalError, TruncatedDataError, FileNotFoundError}
        assert len(classes) == 4
        assert all(issubclass(c, PGMError) for c in classes - {FileNotFoundError})

    @pytest.mark.parametrize("binary", [True, False])
    def test_round_trip(self, tmp_path, binary):
        save_pgm(SQUARE, tmp_path / "r.pgm", binary=binary)
        assert load_pgm(tmp_path / "r.pgm") == SQUARE

    def test_save_rounds_half_up(self, tmp_path):
        save_pgm(GrayImage([[3.6, 2.5]]), tmp_path / "q.pgm")
        assert load_pgm(tmp_path / "q.pgm").pixels.tolist() == [[4.0, 3.0]]

    @pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
    def test_save_read_only_location(self, tmp_path):
        d = tmp_path / "ro"
        d.mkdir()
        d.chmod(stat.S_IRUSR | stat.S_IXUSR)
        with pytest.raises(OSError):
            save_pgm(SQUARE, d / "x.pgm")

    def test_save_to_missing_directory(self, tmp_path):
        with pytest.raises(OSError):
            save_pgm(SQUARE, tmp_path / "missing" / "x.pgm")

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 9), st.integers(1, 9)), elements=st.floats(-20, 280)))
    def test_round_trip_is_identity_on_quantized(self, tmp_path_factory, values):
        img = quantize(GrayImage(values))
        path = tmp_path_factory.mktemp("rt") / "x.pgm"
        save_pgm(img, path)
        assert load_pgm(path) == img


class TestQuantize:
    def test_round_half_up(self):
        assert quantize(GrayImage([[127.5, 0.49, 2.5]])).pixels.tolist() == [[128, 0, 3]]

    def test_clamp(self):
        assert quantize(GrayImage([[-3.2, 260.1]])).pixels.tolist() == [[0, 255]]

    def test_integer_image_unchanged(self, rng):
        img = random_image(rng, 5, 7)
        assert quantize(img) == img

    @given(arrays(np.float64, (4, 3), elements=st.floats(-1e4, 1e4)))
    def test_idempotent_and_bounded(self, values):
        q = quantize(GrayImage(values))
        assert quantize(q) == q
        assert q.pixels.min() >= 0 and q.pixels.max() <= 255


class TestCrop:
    def test_equal_sizes_unchanged(self, rng):
        a, b = random_image(rng, 4, 4), random_image(rng, 4, 4)
        assert crop_to_common(a, b) == (a, b)

    def test_min_rule_top_left(self, rng):
        a = random_image(rng, 6, 4)  # 4 wide, 6 high
        b = random_image(rng, 4, 5)
        ca, cb = crop_to_common(a, b)
        assert (ca.width, ca.height) == (cb.width, cb.height) == (4, 4)
        assert np.array_equal(ca.pixels, a.pixels[:4, :4])
        assert np.array_equal(cb.pixels, b.pixels[:4, :4])

    def test_degenerate(self, rng):
        ca, cb = crop_to_common(random_image(rng, 1, 1), random_image(rng, 100, 100))
        assert ca.shape == cb.shape == (1, 1)

    @given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 12), st.integers(1, 12))
    def test_idempotent(self, h1, w1, h2, w2):
        rng = np.random.default_rng(h1 * 1000 + w1 * 100 + h2 * 10 + w2)
        once = crop_to_common(random_image(rng, h1, w1), random_image(rng, h2, w2))
        assert crop_to_common(*once) == once


class TestHistogram:
    def test_two_levels(self):
        p = histogram(GrayImage.from_list(2, 2, [0, 0, 255, 255]))
        assert p[0] == 0.5 and p[255] == 0.5 and p.sum() == 1.0
        assert np.count_nonzero(p) == 2

    def test_constant(self):
        p = histogram(GrayImage(np.full((3, 3), 77.0)))
        assert p[77] == 1.0 and np.count_nonzero(p) == 1

    def test_uniform(self):
        p = histogram(GrayImage(np.arange(256, dtype=float).reshape(16, 16)))
        assert np.all(p == 1 / 256)

    def test_joint_identical(self):
        m = GrayImage.from_list(2, 2, [0, 0, 255, 255])
        j = joint_histogram(m, m)
        assert j[0, 0] == 0.5 and j[255, 255] == 0.5 and np.count_nonzero(j) == 2

    def test_joint_swapped(self):
        j = joint_histogram(GrayImage([[0, 255]]), GrayImage([[255, 0]]))
        assert j[0, 255] == 0.5 and j[255, 0] == 0.5 and np.count_nonzero(j) == 2

    def test_joint_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatchError):
            joint_histogram(random_image(rng, 2, 2), random_image(rng, 2, 3))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 20), st.integers(1, 20))
    def test_marginals_and_normalization(self, seed, h, w):
        rng = np.random.default_rng(seed)
        m, n = random_image(rng, h, w), random_image(rng, h, w, 0, 8)
        j = joint_histogram(m, n)
        assert np.all(j >= 0)
        assert abs(j.sum() - 1) < 1e-12
        assert np.max(np.abs(j.sum(axis=1) - histogram(m))) < 1e-12
        assert np.max(np.abs(j.sum(axis=0) - histogram(n))) < 1e-12
        assert abs(histogram(m).sum() - 1) < 1e-12
