"""Real-valued genetic algorithm for the two DWT fusion weights.

Each generation: tournament selection (size 2), arithmetic crossover,
Gaussian mutation clamped to [0, 1], elitist replacement.  Random numbers
come from NumPy's PCG64 generator seeded by ``GaConfig.rng_seed`` and are
drawn for the whole generation before any fitness is evaluated, so the
result does not depend on evaluation order.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .fusion import FusionWeights, fuse_weighted
from .image import GrayImage, crop_to_common, quantize
from .metrics import DegenerateMetricError, MetricInputs, entropy, fusion_factor, iqi
from .wavelet import HAAR, WaveletSpec, decompose, reconstruct


class GaConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Chromosome:
    w1: float
    w2: float
    fitness: float = float("-inf")

    def weights(self) -> FusionWeights:
        """Fusion weights; the all-zero pair is repaired to (0.5, 0.5)."""
        if self.w1 + self.w2 <= 0:
            return FusionWeights(0.5, 0.5)
        return FusionWeights(self.w1, self.w2)


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 30
    generations: int = 50
    crossover_rate: float = 0.9
    mutation_rate: float = 0.2
    mutation_sigma: float = 0.1
    elitism_count: int = 1
    rng_seed: int = 42
    workers: int = 1

    def __post_init__(self):
        if self.population_size < 2:
            raise GaConfigError("population_size must be >= 2")
        if not 0 <= self.elitism_count < self.population_size:
            raise GaConfigError("elitism_count must be in [0, population_size)")
        if self.generations < 0:
            raise GaConfigError("generations must be >= 0")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise GaConfigError(f"{name} must lie in [0, 1]")
        if self.mutation_sigma < 0:
            raise GaConfigError("mutation_sigma must be >= 0")
        if self.workers < 1:
            raise GaConfigError("workers must be >= 1")


@dataclass(frozen=True)
class TraceRow:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_w1: float
    best_w2: float


def _evaluate(fitness, genes: np.ndarray, workers: int) -> np.ndarray:
    pop = [Chromosome(float(w1), float(w2)) for w1, w2 in genes]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            scores = list(pool.map(fitness, pop))
    else:
        scores = [fitness(c) for c in pop]
    return np.asarray(scores, dtype=np.float64)


def run_ga(
    fitness: Callable[[Chromosome], float],
    cfg: GaConfig = GaConfig(),
    trace: list[TraceRow] | None = None,
) -> Chromosome:
    """Maximize ``fitness`` over (w1, w2) in [0, 1]^2.

    Returns the best chromosome seen in any generation.  When ``trace`` is
    a list, one :class:`TraceRow` per generation (0 = initial population)
    is appended to it.
    """
    rng = np.random.Generator(np.random.PCG64(cfg.rng_seed))
    n = cfg.population_size
    n_children = n - cfg.elitism_count

    genes = rng.random((n, 2))
    scores = _evaluate(fitness, genes, cfg.workers)
    best_i = int(np.argmax(scores))
    best = Chromosome(float(genes[best_i, 0]), float(genes[best_i, 1]), float(scores[best_i]))

    def record(gen):
        if trace is not None:
            trace.append(TraceRow(gen, best.fitness, float(np.mean(scores)), best.w1, best.w2))

    record(0)
    for gen in range(1, cfg.generations + 1):
        # every draw for this generation, fixed before evaluation
        contenders = rng.integers(0, n, size=(n_children, 2, 2))
        do_cross = rng.random(n_children) < cfg.crossover_rate
        beta = rng.random((n_children, 2))
        do_mutate = rng.random((n_children, 2)) < cfg.mutation_rate
        noise = rng.normal(0.0, cfg.mutation_sigma, size=(n_children, 2))

        # size-2 tournaments; ties go to the first contender
        a, b = contenders[..., 0], contenders[..., 1]
        winners = np.where(scores[a] >= scores[b], a, b)
        pa = genes[winners[:, 0]]
        pb = genes[winners[:, 1]]
        children = np.where(do_cross[:, None], beta * pa + (1.0 - beta) * pb, pa)
        children = np.clip(np.where(do_mutate, children + noise, children), 0.0, 1.0)

        elite = np.argsort(-scores, kind="stable")[: cfg.elitism_count]
        child_scores = _evaluate(fitness, children, cfg.workers)
        genes = np.concatenate([genes[elite], children])
        scores = np.concatenate([scores[elite], child_scores])

        i = int(np.argmax(scores))
        if scores[i] > best.fitness:
            best = Chromosome(float(genes[i, 0]), float(genes[i, 1]), float(scores[i]))
        record(gen)
    return best


def write_trace_csv(trace: list[TraceRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "best_fitness", "mean_fitness", "best_w1", "best_w2"])
        for row in trace:
            writer.writerow([row.generation, repr(row.best_fitness), repr(row.mean_fitness), repr(row.best_w1), repr(row.best_w2)])


FITNESS_MODES = ("entropy", "ff", "ref-iqi")


def fusion_fitness(
    i1: GrayImage,
    i2: GrayImage,
    mode: str = "entropy",
    reference: GrayImage | None = None,
    levels: int = 1,
    spec: WaveletSpec = HAAR,
) -> Callable[[Chromosome], float]:
    """Fitness of a weight pair: quality of the weighted-DWT fused image.

    ``entropy`` scores the fused image alone, ``ff`` its fusion factor with
    respect to both inputs and ``ref-iqi`` its quality index against
    ``reference``.
    """
    if mode not in FITNESS_MODES:
        raise GaConfigError(f"unknown fitness mode {mode!r}; expected one of {FITNESS_MODES}")
    if mode == "ref-iqi" and reference is None:
        raise GaConfigError("ref-iqi fitness needs a reference image")
    i1, i2 = crop_to_common(i1, i2)
    p1 = decompose(i1, spec, levels)
    p2 = decompose(i2, spec, levels)
    if reference is not None:
        reference = GrayImage(reference.pixels[: i1.height, : i1.width])

    def fitness(c: Chromosome) -> float:
        fused = quantize(reconstruct(fuse_weighted(p1, p2, c.weights()), spec))
        if mode == "entropy":
            return entropy(fused)
        if mode == "ff":
            return fusion_factor(MetricInputs(fused, i1, i2))
        try:
            return iqi(reference, fused)
        except DegenerateMetricError:
            return -1.0

    return fitness


def fuse_ga(
    i1: GrayImage,
    i2: GrayImage,
    cfg: GaConfig = GaConfig(),
    fitness_mode: str = "entropy",
    *,
    reference: GrayImage | None = None,
    levels: int = 1,
    spec: WaveletSpec = HAAR,
    trace: list[TraceRow] | None = None,
) -> tuple[GrayImage, FusionWeights]:
    """Estimate fusion weights with the GA and fuse with them."""
    i1, i2 = crop_to_common(i1, i2)
    fitness = fusion_fitness(i1, i2, fitness_mode, reference, levels, spec)
    best = run_ga(fitness, cfg, trace)
    weights = best.weights()
    p1 = decompose(i1, spec, levels)
    p2 = decompose(i2, spec, levels)
    return quantize(reconstruct(fuse_weighted(p1, p2, weights), spec)), weights


def with_seed(cfg: GaConfig, seed: int) -> GaConfig:
    return replace(cfg, rng_seed=seed)
