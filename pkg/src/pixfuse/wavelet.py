"""Separable 2-D discrete wavelet transform with orthogonal filter banks.

Filtering uses periodic extension over the (possibly padded) signal, which
gives exact perfect reconstruction for any orthonormal filter.  Axes with
odd length are first padded by replicating the last row/column; the
pre-padding shape is recorded so that reconstruction crops it away again.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .image import GrayImage


class WaveletError(ValueError):
    pass


@dataclass(frozen=True)
class WaveletSpec:
    """Orthonormal filter bank.  Synthesis filters are the time reverses of
    the analysis filters; the highpass is the alternating flip of the
    lowpass."""

    name: str
    lowpass: tuple[float, ...]
    highpass: tuple[float, ...] = field(default=())

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lowpass)
        if len(lo) < 2 or len(lo) % 2:
            raise WaveletError("lowpass filter must have even length >= 2")
        object.__setattr__(self, "lowpass", lo)
        if not self.highpass:
            L = len(lo)
            hi = tuple((-1) ** n * lo[L - 1 - n] for n in range(L))
            object.__setattr__(self, "highpass", hi)
        elif len(self.highpass) != len(lo):
            raise WaveletError("highpass and lowpass lengths differ")


_S2 = 1.0 / math.sqrt(2.0)
HAAR = WaveletSpec("haar", (_S2, _S2))

_S3 = math.sqrt(3.0)
DB2 = WaveletSpec(
    "db2",
    tuple(v / (4.0 * math.sqrt(2.0)) for v in (1 + _S3, 3 + _S3, 3 - _S3, 1 - _S3)),
)

WAVELETS = {"haar": HAAR, "db1": HAAR, "db2": DB2}


def get_wavelet(name: str) -> WaveletSpec:
    try:
        return WAVELETS[name.lower()]
    except KeyError:
        raise WaveletError(f"unknown wavelet {name!r}; choose from {sorted(WAVELETS)}") from None


def _analysis(x: np.ndarray, filt: tuple[float, ...], axis: int) -> np.ndarray:
    # y[k] = sum_n f[n] x[(2k + n) mod N]
    x = np.moveaxis(x, axis, -1)
    N = x.shape[-1]
    out = np.zeros(x.shape[:-1] + (N // 2,))
    for n, f in enumerate(filt):
        idx = (np.arange(0, N, 2) + n) % N
        out += f * x[..., idx]
    return np.moveaxis(out, -1, axis)


def _synthesis(lo: np.ndarray, hi: np.ndarray, spec: WaveletSpec, axis: int) -> np.ndarray:
    # x[(2k + n) mod N] += h[n] lo[k] + g[n] hi[k]   (transpose of _analysis)
    lo = np.moveaxis(lo, axis, -1)
    hi = np.moveaxis(hi, axis, -1)
    half = lo.shape[-1]
    N = 2 * half
    out = np.zeros(lo.shape[:-1] + (N,))
    base = np.arange(0, N, 2)
    for n, (h, g) in enumerate(zip(spec.lowpass, spec.highpass)):
        idx = (base + n) % N
        out[..., idx] += h * lo + g * hi
    return np.moveaxis(out, -1, axis)


def _pad_even(m: np.ndarray) -> np.ndarray:
    h, w = m.shape
    return np.pad(m, ((0, h % 2), (0, w % 2)), mode="edge")


def dwt2_level(matrix, spec: WaveletSpec = HAAR):
    """One analysis step.  Returns ``(LL, LH, HL, HH)``.

    The first letter names the filter applied along rows (horizontal
    direction), the second the filter applied along columns.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or min(m.shape) < 2:
        raise WaveletError(f"need at least 2x2 coefficients, got shape {m.shape}")
    m = _pad_even(m)
    lo = _analysis(m, spec.lowpass, axis=1)
    hi = _analysis(m, spec.highpass, axis=1)
    ll = _analysis(lo, spec.lowpass, axis=0)
    lh = _analysis(lo, spec.highpass, axis=0)
    hl = _analysis(hi, spec.lowpass, axis=0)
    hh = _analysis(hi, spec.highpass, axis=0)
    return ll, lh, hl, hh


def idwt2_level(ll, lh, hl, hh, spec: WaveletSpec = HAAR, shape=None) -> np.ndarray:
    """Inverse of :func:`dwt2_level`; ``shape`` crops away edge padding."""
    subbands = [np.asarray(b, dtype=np.float64) for b in (ll, lh, hl, hh)]
    if len({b.shape for b in subbands}) != 1:
        raise WaveletError("subband shapes differ")
    ll, lh, hl, hh = subbands
    lo = _synthesis(ll, lh, spec, axis=0)
    hi = _synthesis(hl, hh, spec, axis=0)
    out = _synthesis(lo, hi, spec, axis=1)
    if shape is not None:
        h, w = shape
        if not (2 * ll.shape[0] - 1 <= h <= 2 * ll.shape[0] and 2 * ll.shape[1] - 1 <= w <= 2 * ll.shape[1]):
            raise WaveletError(f"target shape {shape} incompatible with subbands {ll.shape}")
        out = out[:h, :w]
    return out


@dataclass(frozen=True, eq=False)
class WaveletPyramid:
    """Multi-level decomposition.

    ``details[k]`` holds the ``(LH, HL, HH)`` bands produced at level
    ``k + 1`` (finest first) and ``shapes[k]`` the shape of the matrix that
    level decomposed.
    """

    approx: np.ndarray
    details: tuple[tuple[np.ndarray, np.ndarray, np.ndarray], ...]
    shapes: tuple[tuple[int, int], ...]
    wavelet: str = "haar"

    @property
    def levels(self) -> int:
        return len(self.details)

    @property
    def original_dims(self) -> tuple[int, int]:
        """(width, height) of the source image."""
        h, w = self.shapes[0]
        return w, h

    def bands(self):
        """All coefficient arrays, approximation first."""
        yield self.approx
        for triple in self.details:
            yield from triple

    def same_structure(self, other: "WaveletPyramid") -> bool:
        return (
            self.wavelet == other.wavelet
            and self.shapes == other.shapes
            and all(a.shape == b.shape for a, b in zip(self.bands(), other.bands()))
        )

    def map_bands(self, approx_fn, detail_fn, other: "WaveletPyramid | None" = None) -> "WaveletPyramid":
        """Build a pyramid by applying functions band by band.

        With ``other`` the functions receive the matching bands of both."""
        if other is None:
            approx = approx_fn(self.approx)
            details = tuple(tuple(detail_fn(b) for b in t) for t in self.details)
        else:
            approx = approx_fn(self.approx, other.approx)
            details = tuple(
                tuple(detail_fn(a, b) for a, b in zip(t1, t2))
                for t1, t2 in zip(self.details, other.details)
            )
        return WaveletPyramid(approx, details, self.shapes, self.wavelet)

    def scaled(self, alpha: float) -> "WaveletPyramid":
        return self.map_bands(lambda a: alpha * a, lambda d: alpha * d)

    def coefficient_energy(self) -> float:
        return float(sum(np.sum(b * b) for b in self.bands()))


def decompose(img: GrayImage, spec: WaveletSpec = HAAR, levels: int = 1) -> WaveletPyramid:
    if levels < 1:
        raise WaveletError("levels must be >= 1")
    h, w = img.shape
    if h < 2 ** levels or w < 2 ** levels:
        raise WaveletError(f"{levels} levels need at least {2 ** levels}x{2 ** levels} pixels, image is {w}x{h}")
    current = img.pixels
    details = []
    shapes = []
    for _ in range(levels):
        shapes.append(current.shape)
        current, lh, hl, hh = dwt2_level(current, spec)
        details.append((lh, hl, hh))
    return WaveletPyramid(current, tuple(details), tuple(shapes), spec.name)


def reconstruct(pyr: WaveletPyramid, spec: WaveletSpec = HAAR) -> GrayImage:
    """Inverse transform.  The result is real-valued and not quantized."""
    if pyr.wavelet != spec.name:
        raise WaveletError(f"pyramid built with {pyr.wavelet!r}, reconstructing with {spec.name!r}")
    current = pyr.approx
    for (lh, hl, hh), shape in zip(reversed(pyr.details), reversed(pyr.shapes)):
        if current.shape != lh.shape:
            raise WaveletError(f"approximation {current.shape} does not match details {lh.shape}")
        current = idwt2_level(current, lh, hl, hh, spec, shape=shape)
    return GrayImage(current)
