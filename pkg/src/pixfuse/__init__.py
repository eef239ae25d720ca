"""Pixel-level fusion of registered grayscale images and fusion quality metrics."""

from .fusion import FusionWeights, fuse_images
from .fuzzy import default_system, fuse_fuzzy
from .ga import GaConfig, fuse_ga
from .image import GrayImage, load_pgm, save_pgm
from .kernels import BACKEND
from .metrics import MetricInputs, evaluate

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FusionWeights",
    "GaConfig",
    "GrayImage",
    "MetricInputs",
    "default_system",
    "evaluate",
    "fuse_fuzzy",
    "fuse_ga",
    "fuse_images",
    "load_pgm",
    "save_pgm",
]
