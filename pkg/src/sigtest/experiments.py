"""Two-sample experiments on the synthetic datasets.

A *problem* pairs a null process with an alternative one.  Under ``H0``
both groups are drawn from the null process, under ``H1`` the second group
comes from the alternative.
"""
from __future__ import annotations

import time
from dataclasses import replace

import numpy as np

from .datagen import DatasetConfig, downsample, generate
from .estimators import FlatRBFKernel, SignatureKernel
from .mmd import mmd2_unbiased, permutation_test

PRESETS = ("sig-euclid", "sig-rbf", "flat-rbf")
PROBLEMS = {
    "random_walk": ("random_walk", "path_dependent_walk"),
    "signal": ("circle_signal", "pure_noise"),
}


def make_kernel(preset: str, n_jobs: int = 1, M: int = 4, lags: int = 4):
    if preset == "sig-euclid":
        return SignatureKernel(M=M, kernel="euclidean", lags=lags, augment_time=True, n_jobs=n_jobs)
    if preset == "sig-rbf":
        return SignatureKernel(
            M=M, kernel="rbf", gamma="median-step", lags=lags, augment_time=True, n_jobs=n_jobs
        )
    if preset == "flat-rbf":
        return FlatRBFKernel()
    raise ValueError(f"unknown kernel preset {preset!r}, expected one of {PRESETS}")


def derive_seed(*keys: int) -> int:
    """Deterministic 63-bit seed from a tuple of non-negative integers."""
    return int(np.random.SeedSequence(list(keys)).generate_state(2, np.uint64)[0] >> np.uint64(1))


def sample_groups(problem: str, hypothesis: str, m: int, seed: int,
                  base: DatasetConfig = DatasetConfig(), keep_range=None, n: int | None = None):
    """Draw the two groups of one experiment.

    ``keep_range=(lo, hi)`` downsamples every path to between ``lo`` and
    ``hi`` ticks.
    """
    if problem not in PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}, expected one of {sorted(PROBLEMS)}")
    if hypothesis not in ("H0", "H1"):
        raise ValueError(f"hypothesis must be 'H0' or 'H1', got {hypothesis!r}")
    n = m if n is None else n
    null_kind, alt_kind = PROBLEMS[problem]
    y_kind = null_kind if hypothesis == "H0" else alt_kind
    xs = generate(replace(base, kind=null_kind, seed=seed), m, offset=0)
    ys = generate(replace(base, kind=y_kind, seed=seed), n, offset=m)
    if keep_range is not None:
        lo, hi = keep_range
        xs = [downsample(p, lo, hi, derive_seed(seed, 0, i)) for i, p in enumerate(xs)]
        ys = [downsample(p, lo, hi, derive_seed(seed, 1, i)) for i, p in enumerate(ys)]
    return xs, ys


def pooled_gram(xs, ys, preset: str, n_jobs: int = 1, seed: int = 0):
    kernel = make_kernel(preset, n_jobs=n_jobs)
    if isinstance(kernel, SignatureKernel):
        kernel.set_params(random_state=seed)
    pooled = list(xs) + list(ys)
    return kernel.fit(pooled)(pooled)


def t_statistic(K, m: int) -> float:
    return mmd2_unbiased(K[:m, :m], K[:m, m:], K[m:, m:])


def run_test(problem: str, hypothesis: str, preset: str, m: int = 50, n_perms: int = 250,
             alpha: float = 0.05, seed: int = 0, keep_range=None, n_jobs: int = 1,
             base: DatasetConfig = DatasetConfig()):
    """One full two-sample test; returns a :class:`~sigtest.mmd.TestResult`."""
    start = time.perf_counter()
    xs, ys = sample_groups(problem, hypothesis, m, seed, base=base, keep_range=keep_range)
    K = pooled_gram(xs, ys, preset, n_jobs=n_jobs, seed=seed)
    result = permutation_test(K, m, m, n_perms=n_perms, seed=seed, alpha=alpha)
    result.extra.update(
        problem=problem, hypothesis=hypothesis, preset=preset, m=m,
        wall_time_ms=1e3 * (time.perf_counter() - start),
    )
    return result


def histogram(problem: str, preset: str, m: int = 50, repetitions: int = 1000, seed: int = 0,
              keep_range=None, n_jobs: int = 1, base: DatasetConfig = DatasetConfig()):
    """Unbiased statistic under H0 and H1 for each repetition.

    Returns rows ``(repetition, hypothesis, t_u2)``.
    """
    rows = []
    for rep in range(repetitions):
        for h_index, hyp in enumerate(("H0", "H1")):
            s = derive_seed(seed, rep, h_index)
            xs, ys = sample_groups(problem, hyp, m, s, base=base, keep_range=keep_range)
            K = pooled_gram(xs, ys, preset, n_jobs=n_jobs, seed=s)
            rows.append((rep, hyp, t_statistic(K, m)))
    return rows
