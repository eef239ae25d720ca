"""Two-input Mamdani inference system for pixel-level image fusion.

Inference uses min for AND, max for OR, min implication, max aggregation
and a centroid over uniformly sampled output values.  For whole images the
system is tabulated once over all 256 x 256 integer input pairs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources

import numpy as np

from . import kernels
from .image import LEVELS, GrayImage, as_levels, crop_to_common, quantize

DOMAIN = (0.0, 255.0)
LABELS = ("mf1", "mf2", "mf3")


class FuzzyConfigError(ValueError):
    pass


@dataclass(frozen=True)
class MembershipFunction:
    """Triangle with feet ``a``, ``c`` and peak ``b``.

    ``kind`` is ``"tri"``, ``"left"`` (membership 1 for every x <= b) or
    ``"right"`` (membership 1 for every x >= b).
    """

    a: float
    b: float
    c: float
    kind: str = "tri"

    def __post_init__(self):
        if not self.a <= self.b <= self.c:
            raise FuzzyConfigError(f"need a <= b <= c, got ({self.a}, {self.b}, {self.c})")
        if self.kind not in ("tri", "left", "right"):
            raise FuzzyConfigError(f"unknown membership shape {self.kind!r}")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        a, b, c = self.a, self.b, self.c
        mu = np.zeros_like(x)
        if b > a:
            rising = (x > a) & (x < b)
            mu = np.where(rising, (x - a) / (b - a), mu)
        if c > b:
            falling = (x > b) & (x < c)
            mu = np.where(falling, (c - x) / (c - b), mu)
        mu = np.where(x == b, 1.0, mu)
        if self.kind == "left":
            mu = np.where(x <= b, 1.0, mu)
        elif self.kind == "right":
            mu = np.where(x >= b, 1.0, mu)
        return mu

    def breakpoints(self):
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class FuzzyVariable:
    name: str
    mfs: tuple[MembershipFunction, MembershipFunction, MembershipFunction]

    def __post_init__(self):
        if len(self.mfs) != len(LABELS):
            raise FuzzyConfigError(f"{self.name}: expected {len(LABELS)} membership functions")
        # piecewise-linear MFs: checking every breakpoint and every midpoint
        # between consecutive breakpoints is enough to detect a gap
        pts = sorted({min(max(p, DOMAIN[0]), DOMAIN[1]) for mf in self.mfs for p in mf.breakpoints()} | set(DOMAIN))
        probes = np.array(pts + [(u + v) / 2 for u, v in zip(pts, pts[1:])])
        if np.any(self.degrees(probes).max(axis=1) <= 0):
            raise FuzzyConfigError(f"{self.name}: membership functions leave part of [0, 255] uncovered")

    def degrees(self, x) -> np.ndarray:
        """Membership degrees, shape ``x.shape + (3,)``."""
        return np.stack([mf(x) for mf in self.mfs], axis=-1)


def fuzzify(var: FuzzyVariable, x: float) -> tuple[float, float, float]:
    if not DOMAIN[0] <= x <= DOMAIN[1]:
        raise ValueError(f"intensity {x} outside [0, 255]")
    return tuple(float(v) for v in var.degrees(x))


@dataclass(frozen=True)
class FuzzyRule:
    """``if (input1 is in1) <connective> (input2 is in2) then (output is out)``."""

    in1: str
    in2: str
    connective: str
    out: str

    def __post_init__(self):
        for label in (self.in1, self.in2, self.out):
            if label not in LABELS:
                raise FuzzyConfigError(f"unknown membership label {label!r}")
        if self.connective not in ("and", "or"):
            raise FuzzyConfigError(f"connective must be 'and' or 'or', got {self.connective!r}")

    def encoded(self) -> tuple[int, int, int, int]:
        return (LABELS.index(self.in1), LABELS.index(self.in2), int(self.connective == "or"), LABELS.index(self.out))

    def __str__(self):
        return f"{self.in1} {self.connective} {self.in2} -> {self.out}"


def fire_rule(rule: FuzzyRule, mu1, mu2) -> float:
    """Firing strength: min of the two antecedent degrees for AND, max for OR."""
    a = mu1[LABELS.index(rule.in1)]
    b = mu2[LABELS.index(rule.in2)]
    return float(max(a, b) if rule.connective == "or" else min(a, b))


def default_variable(name: str) -> FuzzyVariable:
    return FuzzyVariable(
        name,
        (
            MembershipFunction(0.0, 0.0, 127.5, "left"),
            MembershipFunction(0.0, 127.5, 255.0),
            MembershipFunction(127.5, 255.0, 255.0, "right"),
        ),
    )


DEFAULT_RULES = (
    FuzzyRule("mf1", "mf1", "and", "mf1"),
    FuzzyRule("mf2", "mf1", "and", "mf2"),
    FuzzyRule("mf2", "mf2", "and", "mf2"),
    FuzzyRule("mf3", "mf2", "or", "mf3"),
    FuzzyRule("mf1", "mf3", "and", "mf1"),
    FuzzyRule("mf3", "mf3", "or", "mf2"),
)


@dataclass(frozen=True)
class FuzzySystem:
    input1: FuzzyVariable
    input2: FuzzyVariable
    output: FuzzyVariable
    rules: tuple[FuzzyRule, ...] = DEFAULT_RULES
    resolution: int = 1001
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.resolution < 2:
            raise FuzzyConfigError("defuzzification resolution must be >= 2")
        if not self.rules:
            raise FuzzyConfigError("rule base is empty")
        object.__setattr__(self, "rules", tuple(self.rules))

    @cached_property
    def grid(self) -> np.ndarray:
        return np.linspace(DOMAIN[0], DOMAIN[1], self.resolution)

    @cached_property
    def output_samples(self) -> np.ndarray:
        return self.output.degrees(self.grid).T

    @cached_property
    def encoded_rules(self) -> np.ndarray:
        return np.array([r.encoded() for r in self.rules], dtype=np.intp)

    def infer(self, xs1, xs2) -> np.ndarray:
        """Outputs for the outer product of two 1-D input sample arrays."""
        xs1 = np.atleast_1d(np.asarray(xs1, dtype=np.float64))
        xs2 = np.atleast_1d(np.asarray(xs2, dtype=np.float64))
        return kernels.mamdani_table(
            self.input1.degrees(xs1),
            self.input2.degrees(xs2),
            self.encoded_rules,
            self.output_samples,
            self.grid,
            xs1,
            xs2,
        )

    def table(self) -> np.ndarray:
        """Read-only 256x256 output table indexed ``[x1, x2]``."""
        if "table" not in self._cache:
            levels = np.arange(LEVELS, dtype=np.float64)
            t = self.infer(levels, levels)
            t.setflags(write=False)
            self._cache["table"] = t
        return self._cache["table"]

    def with_resolution(self, resolution: int) -> "FuzzySystem":
        return FuzzySystem(self.input1, self.input2, self.output, self.rules, resolution)


def default_system(resolution: int = 1001) -> FuzzySystem:
    return FuzzySystem(
        default_variable("input1"),
        default_variable("input2"),
        default_variable("output"),
        DEFAULT_RULES,
        resolution,
    )


def infer_pixel(sys: FuzzySystem, x1: float, x2: float) -> float:
    """Fused intensity for one pair of input intensities."""
    for x in (x1, x2):
        if not DOMAIN[0] <= x <= DOMAIN[1]:
            raise ValueError(f"intensity {x} outside [0, 255]")
    return float(sys.infer([x1], [x2])[0, 0])


def fuse_fuzzy(i1: GrayImage, i2: GrayImage, sys: FuzzySystem | None = None) -> GrayImage:
    """Pixelwise fuzzy fusion.  Inputs are cropped to a common size and
    quantized to integer levels; the output is quantized."""
    sys = sys or default_system()
    i1, i2 = crop_to_common(i1, i2)
    table = sys.table()
    return quantize(GrayImage(table[as_levels(i1), as_levels(i2)]))


# --------------------------------------------------------------------------
# FIS text format
#
#   resolution = 1001
#   input1.mf1 = left 0 0 127.5
#   rule = mf1 and mf1 -> mf1
#
# '#' starts a comment.  Rules are kept in file order.

_VARS = ("input1", "input2", "output")
_RULE_RE = re.compile(r"^(mf\d)\s+(and|or)\s+(mf\d)\s*->\s*(mf\d)$", re.IGNORECASE)


def loads_fis(text: str) -> FuzzySystem:
    mfs: dict[str, dict[str, MembershipFunction]] = {v: {} for v in _VARS}
    rules = []
    resolution = 1001
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FuzzyConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key == "resolution":
                resolution = int(value)
            elif key == "rule":
                m = _RULE_RE.match(value)
                if not m:
                    raise FuzzyConfigError(f"bad rule {value!r}")
                a, conn, b, out = m.groups()
                rules.append(FuzzyRule(a.lower(), b.lower(), conn.lower(), out.lower()))
            elif "." in key:
                var, label = key.split(".", 1)
                if var not in mfs or label not in LABELS:
                    raise FuzzyConfigError(f"unknown key {key!r}")
                kind, *params = value.split()
                if len(params) != 3:
                    raise FuzzyConfigError(f"{key}: expected shape and three parameters")
                mfs[var][label] = MembershipFunction(*(float(p) for p in params), kind=kind)
            else:
                raise FuzzyConfigError(f"unknown key {key!r}")
        except (FuzzyConfigError, ValueError) as exc:
            raise FuzzyConfigError(f"line {lineno}: {exc}") from None
    variables = []
    for var in _VARS:
        missing = [lab for lab in LABELS if lab not in mfs[var]]
        if missing:
            raise FuzzyConfigError(f"{var}: missing {', '.join(missing)}")
        variables.append(FuzzyVariable(var, tuple(mfs[var][lab] for lab in LABELS)))
    return FuzzySystem(*variables, tuple(rules), resolution)


def dumps_fis(sys: FuzzySystem) -> str:
    lines = [f"resolution = {sys.resolution}"]
    for key, var in zip(_VARS, (sys.input1, sys.input2, sys.output)):
        for label, mf in zip(LABELS, var.mfs):
            lines.append(f"{key}.{label} = {mf.kind} {mf.a:g} {mf.b:g} {mf.c:g}")
    lines.extend(f"rule = {r}" for r in sys.rules)
    return "\n".join(lines) + "\n"


def load_fis(path) -> FuzzySystem:
    with open(path, encoding="utf-8") as fh:
        return loads_fis(fh.read())


def default_fis_text() -> str:
    return resources.files("pixfuse").joinpath("data/default.fis").read_text(encoding="utf-8")
