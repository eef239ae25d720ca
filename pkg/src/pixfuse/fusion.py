"""Coefficient-domain fusion rules and the DWT fusion driver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import GrayImage, crop_to_common, quantize
from .wavelet import HAAR, WaveletPyramid, WaveletSpec, decompose, reconstruct


class FusionError(ValueError):
    pass


@dataclass(frozen=True)
class FusionWeights:
    w1: float
    w2: float

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0:
            raise FusionError(f"weights must be non-negative, got ({self.w1}, {self.w2})")
        if self.w1 + self.w2 <= 0:
            raise FusionError("weights must not both be zero")

    def normalized(self) -> tuple[float, float]:
        total = self.w1 + self.w2
        return self.w1 / total, self.w2 / total


@dataclass(frozen=True, eq=False)
class DecisionMap:
    """Per-coefficient source record: ``True`` where the coefficient came
    from the first image.  ``approx`` is ``None`` when the approximation
    band was blended rather than selected."""

    approx: np.ndarray | None
    details: tuple[tuple[np.ndarray, np.ndarray, np.ndarray], ...]

    def replay(self, p1: WaveletPyramid, p2: WaveletPyramid) -> WaveletPyramid:
        if self.approx is None:
            raise FusionError("approximation band was not selected coefficientwise")
        approx = np.where(self.approx, p1.approx, p2.approx)
        details = tuple(
            tuple(np.where(m, a, b) for m, a, b in zip(maps, t1, t2))
            for maps, t1, t2 in zip(self.details, p1.details, p2.details)
        )
        return WaveletPyramid(approx, details, p1.shapes, p1.wavelet)

    def approx_image(self) -> GrayImage:
        """Approximation map as a 0/255 image for inspection."""
        if self.approx is None:
            raise FusionError("no approximation decision map")
        return GrayImage(np.where(self.approx, 255.0, 0.0))


def _check(p1: WaveletPyramid, p2: WaveletPyramid) -> None:
    if not p1.same_structure(p2):
        raise FusionError("pyramids differ in wavelet, depth or band shapes")


def _magnitude_choice(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # equal magnitudes of opposite sign resolve to the positive value so the
    # rule stays symmetric; exact ties resolve to the first input
    ma, mb = np.abs(a), np.abs(b)
    return (ma > mb) | ((ma == mb) & (a >= b))


def _select_by_magnitude(p1: WaveletPyramid, p2: WaveletPyramid):
    maps = tuple(
        tuple(_magnitude_choice(a, b) for a, b in zip(t1, t2))
        for t1, t2 in zip(p1.details, p2.details)
    )
    details = tuple(
        tuple(np.where(m, a, b) for m, a, b in zip(ms, t1, t2))
        for ms, t1, t2 in zip(maps, p1.details, p2.details)
    )
    return details, maps


def fuse_max_select(p1: WaveletPyramid, p2: WaveletPyramid) -> tuple[WaveletPyramid, DecisionMap]:
    """Larger approximation coefficient by signed value, larger detail
    coefficient by magnitude.  Exact ties go to ``p1``."""
    _check(p1, p2)
    amap = p1.approx >= p2.approx
    approx = np.where(amap, p1.approx, p2.approx)
    details, dmaps = _select_by_magnitude(p1, p2)
    fused = WaveletPyramid(approx, details, p1.shapes, p1.wavelet)
    return fused, DecisionMap(amap, dmaps)


def _blend(p1, p2, a: float, b: float, average_details: bool) -> WaveletPyramid:
    _check(p1, p2)
    approx = a * p1.approx + b * p2.approx
    if average_details:
        details = tuple(
            tuple(a * x + b * y for x, y in zip(t1, t2))
            for t1, t2 in zip(p1.details, p2.details)
        )
    else:
        details, _ = _select_by_magnitude(p1, p2)
    return WaveletPyramid(approx, details, p1.shapes, p1.wavelet)


def fuse_average(p1: WaveletPyramid, p2: WaveletPyramid, average_details: bool = False) -> WaveletPyramid:
    """Mean of the approximations; details by largest magnitude unless
    ``average_details`` is set."""
    return _blend(p1, p2, 0.5, 0.5, average_details)


def fuse_weighted(
    p1: WaveletPyramid,
    p2: WaveletPyramid,
    weights: FusionWeights,
    average_details: bool = False,
) -> WaveletPyramid:
    """Weighted mean ``(w1*c1 + w2*c2) / (w1 + w2)`` of the approximations.

    Weights are normalized before use, so equal weights reproduce
    :func:`fuse_average` bit for bit.
    """
    a, b = weights.normalized()
    return _blend(p1, p2, a, b, average_details)


METHODS = ("wavelet-max", "dwt-avg", "dwt-weighted")


@dataclass
class FusionResult:
    image: GrayImage
    decision_map: DecisionMap | None = None
    weights: FusionWeights | None = None


def fuse_images(
    i1: GrayImage,
    i2: GrayImage,
    method: str = "wavelet-max",
    *,
    levels: int = 1,
    spec: WaveletSpec = HAAR,
    weights: FusionWeights | None = None,
    average_details: bool = False,
) -> FusionResult:
    """Crop, decompose, fuse, reconstruct and quantize."""
    i1, i2 = crop_to_common(i1, i2)
    p1 = decompose(i1, spec, levels)
    p2 = decompose(i2, spec, levels)
    dmap = None
    if method == "wavelet-max":
        fused, dmap = fuse_max_select(p1, p2)
    elif method == "dwt-avg":
        fused = fuse_average(p1, p2, average_details)
    elif method == "dwt-weighted":
        if weights is None:
            raise FusionError("dwt-weighted needs weights")
        fused = fuse_weighted(p1, p2, weights, average_details)
    else:
        raise FusionError(f"unknown method {method!r}; expected one of {METHODS}")
    return FusionResult(quantize(reconstruct(fused, spec)), dmap, weights)
