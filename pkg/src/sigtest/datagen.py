"""Seeded generators for the synthetic path datasets.

Every sample draws from its own PCG64 stream seeded by
``SeedSequence([seed, sample_index])``, so a dataset is reproducible sample by
sample regardless of how many samples are requested or in which order.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .signature import PathSample

__all__ = [
    "DatasetConfig",
    "KINDS",
    "circle_signal",
    "downsample",
    "generate",
    "path_dependent_walk",
    "pure_noise",
    "sample_rng",
    "simple_random_walk",
]

KINDS = ("random_walk", "path_dependent_walk", "circle_signal", "pure_noise")


@dataclass(frozen=True)
class DatasetConfig:
    kind: str = "random_walk"
    length: int = 101
    w: int = 3
    k_spins: int = 10
    r: float = 0.8
    sigma: float = 0.5
    origin_std: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown dataset kind {self.kind!r}, expected one of {KINDS}")
        if self.length < 2:
            raise ValueError(f"length must be >= 2, got {self.length}")
        if self.w < 2:
            raise ValueError(f"w must be >= 2, got {self.w}")
        # sigma == 0 is allowed for noiseless signal plots and tests.
        if self.r <= 0 or self.sigma < 0 or self.origin_std <= 0:
            raise ValueError("r and origin_std must be > 0 and sigma >= 0")


def sample_rng(seed: int, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def _grid(length):
    return np.linspace(0.0, 1.0, length)


def _signs(rng, size):
    return np.where(rng.random(size) < 0.5, -1.0, 1.0)


def _check_kind(cfg, *kinds):
    if cfg.kind not in kinds:
        raise ValueError(f"config kind {cfg.kind!r} does not match generator {kinds}")


def simple_random_walk(cfg: DatasetConfig, rng=None) -> PathSample:
    """``X_0 = 0`` with i.i.d. ±1 increments."""
    _check_kind(cfg, "random_walk")
    rng = sample_rng(cfg.seed) if rng is None else rng
    steps = _signs(rng, cfg.length - 1)
    return PathSample(_grid(cfg.length), np.concatenate([[0.0], np.cumsum(steps)]))


def path_dependent_walk(cfg: DatasetConfig, rng=None) -> PathSample:
    """±1 walk in which every ``w``-th increment is the product of the
    previous ``w - 1`` increments; the others are fresh fair signs."""
    _check_kind(cfg, "path_dependent_walk")
    rng = sample_rng(cfg.seed) if rng is None else rng
    steps = _signs(rng, cfg.length - 1)
    for s in range(cfg.w, cfg.length, cfg.w):
        # steps[s - 1] is increment number s (1-based)
        steps[s - 1] = np.prod(steps[s - cfg.w : s - 1])
    return PathSample(_grid(cfg.length), np.concatenate([[0.0], np.cumsum(steps)]))


def circle_signal(cfg: DatasetConfig, rng=None) -> PathSample:
    """Noisy circle ``O + r (cos 2πkt, sin 2πkt) + σξ_t`` with random origin."""
    _check_kind(cfg, "circle_signal")
    rng = sample_rng(cfg.seed) if rng is None else rng
    t = _grid(cfg.length)
    origin = rng.normal(0.0, cfg.origin_std, size=2)
    angle = 2.0 * np.pi * cfg.k_spins * t
    f = origin + cfg.r * np.column_stack([np.cos(angle), np.sin(angle)])
    return PathSample(t, f + cfg.sigma * rng.standard_normal((cfg.length, 2)))


def pure_noise(cfg: DatasetConfig, rng=None) -> PathSample:
    """``σξ_t`` with i.i.d. standard bivariate normal ``ξ_t``."""
    _check_kind(cfg, "pure_noise")
    rng = sample_rng(cfg.seed) if rng is None else rng
    return PathSample(_grid(cfg.length), cfg.sigma * rng.standard_normal((cfg.length, 2)))


_GENERATORS = {
    "random_walk": simple_random_walk,
    "path_dependent_walk": path_dependent_walk,
    "circle_signal": circle_signal,
    "pure_noise": pure_noise,
}


def generate(cfg: DatasetConfig, n_samples: int, offset: int = 0) -> list:
    """Samples ``offset .. offset + n_samples - 1`` of the dataset."""
    gen = _GENERATORS[cfg.kind]
    return [gen(cfg, sample_rng(cfg.seed, offset + i)) for i in range(n_samples)]


def downsample(path: PathSample, keep_min: int, keep_max: int, seed: int) -> PathSample:
    """Delete ticks uniformly at random, keeping between ``keep_min`` and
    ``keep_max`` of them.  The first and last tick are always retained."""
    n = len(path)
    if not 2 <= keep_min <= keep_max <= n:
        raise ValueError(
            f"need 2 <= keep_min <= keep_max <= {n}, got [{keep_min}, {keep_max}]"
        )
    rng = sample_rng(seed)
    count = int(rng.integers(keep_min, keep_max + 1))
    interior = rng.choice(np.arange(1, n - 1), size=count - 2, replace=False)
    keep = np.concatenate([[0], np.sort(interior), [n - 1]])
    return PathSample(path.times[keep], path.points[keep])


def with_kind(cfg: DatasetConfig, kind: str) -> DatasetConfig:
    return replace(cfg, kind=kind)
