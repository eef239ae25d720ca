"""Fusion quality measures: IQI, mutual information, fusion factor,
symmetry and index, RMSE, PSNR and entropy.

Information measures are in bits and operate on images quantized to 256
levels.  Pixel-difference measures (RMSE, PSNR, IQI) use the values as
given.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .image import GrayImage, _check_same_shape, histogram, joint_histogram

PEAK = 255.0


class DegenerateMetricError(ArithmeticError):
    """A metric is undefined for the given inputs (e.g. division by zero)."""


def _moments(a: GrayImage, b: GrayImage):
    _check_same_shape(a, b)
    x = a.pixels.ravel()
    y = b.pixels.ravel()
    mx = x.mean()
    my = y.mean()
    dx = x - mx
    dy = y - my
    return mx, my, np.mean(dx * dx), np.mean(dy * dy), np.mean(dx * dy)


def iqi(a: GrayImage, b: GrayImage, literal: bool = False) -> float:
    """Global universal image quality index.

    ``Q = 4 cov(a,b) mean(a) mean(b) / ((var a + var b)(mean(a)^2 + mean(b)^2))``

    ``literal=True`` evaluates ``(cov - 2 mean(a) mean(b)) / (var a + var b - 2 cov)``
    instead.  That expression does not equal 1 for identical images and is
    kept only for comparison.
    """
    mx, my, vx, vy, cxy = _moments(a, b)
    if literal:
        num = cxy - 2.0 * mx * my
        den = vx + vy - 2.0 * cxy
    else:
        num = 4.0 * cxy * mx * my
        den = (vx + vy) * (mx * mx + my * my)
    if den == 0:
        raise DegenerateMetricError("IQI undefined: zero denominator (constant or zero-mean inputs)")
    return float(num / den)


def _entropy_of(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def entropy(img: GrayImage) -> float:
    """Shannon entropy of the 256-level histogram, in bits."""
    return max(0.0, _entropy_of(histogram(img)))


def mutual_information(m: GrayImage, n: GrayImage) -> float:
    """Mutual information of the joint gray-level distribution, in bits."""
    pmn = joint_histogram(m, n)
    pm = pmn.sum(axis=1)
    pn = pmn.sum(axis=0)
    rows, cols = np.nonzero(pmn)
    p = pmn[rows, cols]
    mi = float(np.sum(p * np.log2(p / (pm[rows] * pn[cols]))))
    # round-off can push independent pairs a hair below zero
    return max(mi, 0.0)


@dataclass(frozen=True)
class MetricInputs:
    """Fused image with its two sources.  ``input_a`` is the first source
    (multispectral), ``input_b`` the second (panchromatic)."""

    fused: GrayImage
    input_a: GrayImage
    input_b: GrayImage
    reference: GrayImage | None = None

    def cropped(self) -> "MetricInputs":
        imgs = [self.fused, self.input_a, self.input_b]
        if self.reference is not None:
            imgs.append(self.reference)
        h = min(i.height for i in imgs)
        w = min(i.width for i in imgs)
        out = [GrayImage(i.pixels[:h, :w]) if i.shape != (h, w) else i for i in imgs]
        return MetricInputs(*out) if len(out) == 4 else MetricInputs(*out, None)


def _transfer(inputs: MetricInputs) -> tuple[float, float]:
    i_af = mutual_information(inputs.input_a, inputs.fused)
    i_bf = mutual_information(inputs.input_b, inputs.fused)
    return i_af, i_bf


def fusion_factor(inputs: MetricInputs) -> float:
    i_af, i_bf = _transfer(inputs)
    return i_af + i_bf


def symmetry_from(i_af: float, i_bf: float) -> float:
    total = i_af + i_bf
    if total <= 0:
        raise DegenerateMetricError("fusion symmetry undefined: I_AF + I_BF == 0")
    return abs(i_af / total - 0.5)


def index_from(i_af: float, i_bf: float) -> float:
    if i_bf <= 0:
        raise DegenerateMetricError("fusion index undefined: I_BF == 0")
    return i_af / i_bf


def fusion_symmetry(inputs: MetricInputs) -> float:
    return symmetry_from(*_transfer(inputs))


def fusion_index(inputs: MetricInputs) -> float:
    return index_from(*_transfer(inputs))


def rmse(reference: GrayImage, fused: GrayImage) -> float:
    _check_same_shape(reference, fused)
    diff = reference.pixels - fused.pixels
    return float(math.sqrt(np.mean(diff * diff)))


def psnr_from_rmse(value: float) -> float:
    if value == 0:
        return math.inf
    return 20.0 * math.log10(PEAK / value)


def psnr(reference: GrayImage, fused: GrayImage) -> float:
    """``20 log10(255 / RMSE)`` in dB; ``inf`` for identical images."""
    return psnr_from_rmse(rmse(reference, fused))


COLUMNS = ("iqi", "ff", "fs", "fi", "mim", "rmse", "psnr", "entropy")


@dataclass
class MetricsReport:
    """One row of quality measures.

    ``mim`` carries ``i_bf`` (information shared by the second source and
    the fused image); both transfer terms are kept as well.  A metric that
    is undefined for the inputs is ``None`` and its reason is recorded in
    ``degenerate``.
    """

    iqi: float | None
    mim: float
    ff: float
    fs: float | None
    fi: float | None
    rmse: float
    psnr: float
    entropy: float
    i_af: float
    i_bf: float
    surrogate_reference: bool
    degenerate: dict[str, str] = field(default_factory=dict)

    def row(self) -> list:
        return [getattr(self, c) for c in COLUMNS]

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(inputs: MetricInputs) -> MetricsReport:
    """Compute every measure for one fused image.

    IQI, RMSE and PSNR compare against ``reference`` when given, otherwise
    against ``input_a`` (flagged via ``surrogate_reference``).
    """
    inputs = inputs.cropped()
    ref = inputs.reference if inputs.reference is not None else inputs.input_a
    degenerate = {}

    i_af, i_bf = _transfer(inputs)
    ff = i_af + i_bf
    try:
        fs = symmetry_from(i_af, i_bf)
    except DegenerateMetricError as exc:
        fs = None
        degenerate["fs"] = str(exc)
    try:
        fi = index_from(i_af, i_bf)
    except DegenerateMetricError as exc:
        fi = None
        degenerate["fi"] = str(exc)
    try:
        q = iqi(ref, inputs.fused)
    except DegenerateMetricError as exc:
        q = None
        degenerate["iqi"] = str(exc)
    err = rmse(ref, inputs.fused)
    return MetricsReport(
        iqi=q,
        mim=i_bf,
        ff=ff,
        fs=fs,
        fi=fi,
        rmse=err,
        psnr=psnr_from_rmse(err),
        entropy=entropy(inputs.fused),
        i_af=i_af,
        i_bf=i_bf,
        surrogate_reference=inputs.reference is None,
        degenerate=degenerate,
    )
