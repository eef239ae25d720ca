"""Grayscale image container, PGM I/O and histogram helpers.

Pixels are stored as float64 so that transform and inference intermediates
keep full precision.  Quantization to 8-bit levels happens only when saving
or when a histogram is needed.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

LEVELS = 256


class PGMError(ValueError):
    """Base class for malformed PGM input."""


class UnsupportedFormatError(PGMError):
    pass


class BadMaxvalError(PGMError):
    pass


class TruncatedDataError(PGMError):
    pass


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Single-channel raster with real-valued intensities.

    ``pixels`` has shape ``(height, width)`` and is stored read-only.
    """

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pixels, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D array, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_list(cls, width: int, height: int, values) -> "GrayImage":
        values = np.asarray(values, dtype=np.float64)
        if values.size != width * height:
            raise ValueError("pixel count does not match width*height")
        return cls(values.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


def _round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


def quantize(img: GrayImage) -> GrayImage:
    """Round half-up to integer levels and clamp to [0, 255]."""
    return GrayImage(np.clip(_round_half_up(img.pixels), 0, LEVELS - 1))


def as_levels(img: GrayImage) -> np.ndarray:
    """Quantized pixels as a uint8 array."""
    return np.clip(_round_half_up(img.pixels), 0, LEVELS - 1).astype(np.uint8)


# --------------------------------------------------------------------------
# PGM

def _read_header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Return ``count`` whitespace separated header tokens and the offset
    just past the single whitespace byte that terminates the last one."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise TruncatedDataError("unexpected end of file in PGM header")
        if data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from a P5 payload
    return tokens, pos + 1


def load_pgm(path) -> GrayImage:
    """Read a P2 (ASCII) or P5 (binary) PGM file with maxval <= 255."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise UnsupportedFormatError(f"{path}: unsupported magic number {magic!r}")
    tokens, offset = _read_header_tokens(data[2:], 3)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise PGMError(f"{path}: malformed header {tokens!r}") from None
    if width < 1 or height < 1:
        raise PGMError(f"{path}: invalid dimensions {width}x{height}")
    if maxval < 1 or maxval > 255:
        raise BadMaxvalError(f"{path}: maxval {maxval} not in 1..255")
    npix = width * height
    if magic == b"P5":
        payload = data[2 + offset:2 + offset + npix]
        if len(payload) < npix:
            raise TruncatedDataError(f"{path}: expected {npix} bytes, found {len(payload)}")
        values = np.frombuffer(payload, dtype=np.uint8)
    else:
        body = data[2 + offset - 1:]
        lines = [ln.split(b"#", 1)[0] for ln in body.splitlines()]
        fields = b" ".join(lines).split()
        if len(fields) < npix:
            raise TruncatedDataError(f"{path}: expected {npix} values, found {len(fields)}")
        try:
            values = np.array([int(f) for f in fields[:npix]], dtype=np.int64)
        except ValueError:
            raise PGMError(f"{path}: non-integer pixel value") from None
        if values.min() < 0 or values.max() > maxval:
            raise PGMError(f"{path}: pixel value outside 0..{maxval}")
    return GrayImage(values.astype(np.float64).reshape(height, width))


def save_pgm(img: GrayImage, path, binary: bool = True) -> None:
    """Write ``img`` as an 8-bit PGM after quantization."""
    levels = as_levels(img)
    header = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n255\n".encode("ascii")
    if binary:
        payload = levels.tobytes()
    else:
        rows = (" ".join(str(v) for v in row) for row in levels)
        payload = ("\n".join(rows) + "\n").encode("ascii")
    with open(os.fspath(path), "wb") as fh:
        fh.write(header + payload)


def crop_to_common(a: GrayImage, b: GrayImage) -> tuple[GrayImage, GrayImage]:
    """Crop both images to their common top-left region."""
    h = min(a.height, b.height)
    w = min(a.width, b.width)
    if a.shape != (h, w):
        a = GrayImage(a.pixels[:h, :w])
    if b.shape != (h, w):
        b = GrayImage(b.pixels[:h, :w])
    return a, b


def _check_same_shape(m: GrayImage, n: GrayImage) -> None:
    if m.shape != n.shape:
        raise DimensionMismatchError(f"image shapes differ: {m.shape} vs {n.shape}")


def histogram(img: GrayImage) -> np.ndarray:
    """Normalized 256-bin histogram of the quantized image."""
    counts = np.bincount(as_levels(img).ravel(), minlength=LEVELS)
    return counts / counts.sum()


def joint_histogram(m: GrayImage, n: GrayImage) -> np.ndarray:
    """Normalized 256x256 joint histogram; rows index ``m``, columns ``n``."""
    _check_same_shape(m, n)
    idx = as_levels(m).ravel().astype(np.intp) * LEVELS + as_levels(n).ravel()
    counts = np.bincount(idx, minlength=LEVELS * LEVELS).reshape(LEVELS, LEVELS)
    return counts / counts.sum()
