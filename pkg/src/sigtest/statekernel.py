"""Kernels on the state space R^d and RBF bandwidth selection."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .exceptions import ShapeMismatchError

__all__ = ["StateKernelConfig", "kappa", "kappa_matrix", "median_heuristic", "median_step_gamma"]

KINDS = ("euclidean", "rbf")


@dataclass(frozen=True)
class StateKernelConfig:
    """``euclidean``: ``<u, v>``; ``rbf``: ``exp(-gamma ‖u - v‖²)``."""

    kind: str = "euclidean"
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown state kernel {self.kind!r}, expected one of {KINDS}")
        if self.kind == "rbf" and not (self.gamma is not None and self.gamma > 0):
            raise ValueError(f"rbf kernel needs gamma > 0, got {self.gamma}")


def kappa(u, v, cfg: StateKernelConfig) -> float:
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise ShapeMismatchError(f"dimension mismatch: {u.size} != {v.size}")
    if cfg.kind == "euclidean":
        return float(u @ v)
    diff = u - v
    return float(np.exp(-cfg.gamma * (diff @ diff)))


def kappa_matrix(X, Y, cfg: StateKernelConfig) -> np.ndarray:
    """Kernel matrix between point sets ``X (..., n, d)`` and ``Y (..., k, d)``.

    Leading batch axes broadcast, so ``X[:, None]`` against ``Y[None]`` gives
    all path pairs at once.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.shape[-1] != Y.shape[-1]:
        raise ShapeMismatchError(f"dimension mismatch: {X.shape[-1]} != {Y.shape[-1]}")
    G = X @ np.swapaxes(Y, -1, -2)
    if cfg.kind == "euclidean":
        return G
    xx = np.einsum("...i,...i->...", X, X)[..., :, None]
    yy = np.einsum("...i,...i->...", Y, Y)[..., None, :]
    sq = np.maximum(xx + yy - 2.0 * G, 0.0)
    return np.exp(-cfg.gamma * sq)


def median_heuristic(samples, max_samples: int | None = None, seed: int = 0) -> float:
    """RBF coefficient ``gamma = 1 / (2 * median squared pairwise distance)``.

    The median runs over distinct unordered pairs.  With ``max_samples`` set,
    a seeded uniform subsample of that many rows is used instead of all rows.
    """
    X = np.asarray(samples, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    X = X.reshape(X.shape[0], -1)
    if X.shape[0] < 2:
        raise ValueError("median heuristic needs at least two samples")
    if max_samples is not None and X.shape[0] > max_samples:
        idx = np.random.default_rng(seed).choice(X.shape[0], max_samples, replace=False)
        X = X[np.sort(idx)]
    med = float(np.median(pdist(X, "sqeuclidean")))
    if med <= 0:
        raise ValueError("median pairwise distance is zero; samples are degenerate")
    return 1.0 / (2.0 * med)


def median_step_gamma(paths) -> float:
    """RBF coefficient ``1 / median ‖x_{i+1} - x_i‖²`` over consecutive points.

    Sets the bandwidth on the scale of a single step of the paths, which is
    the scale the signature lift sees, rather than on the spread of
    positions across paths.
    """
    steps = np.concatenate(
        [np.einsum("ij,ij->i", d, d) for d in (np.diff(np.asarray(p, dtype=np.float64), axis=0) for p in paths)]
    )
    if steps.size == 0:
        raise ValueError("paths need at least two points to measure steps")
    med = float(np.median(steps))
    if med <= 0:
        raise ValueError("median step length is zero; paths are degenerate")
    return 1.0 / med
