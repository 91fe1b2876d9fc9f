"""Truncated signatures of discretely observed paths and path transforms."""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .tensor import GroupElement

__all__ = [
    "PathSample",
    "add_lags",
    "one_variation",
    "sig_linear",
    "signature_levels",
    "time_augment",
]


@dataclass(frozen=True, eq=False)
class PathSample:
    """A path observed at strictly increasing times in ``[0, 1]``.

    ``points`` has one row per observation time.
    """

    times: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        times = np.array(self.times, dtype=np.float64).ravel()
        points = np.array(self.points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2:
            raise ValueError(f"points must be 2-D, got shape {points.shape}")
        if times.size < 1:
            raise ValueError("a path needs at least one observation")
        if points.shape[0] != times.size:
            raise ValueError(
                f"{points.shape[0]} points but {times.size} time stamps"
            )
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if times[0] < 0 or times[-1] > 1:
            raise ValueError("times must lie in [0, 1]")
        if not np.all(np.isfinite(points)):
            raise ValueError("points must be finite")
        times.setflags(write=False)
        points.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "points", points)

    @classmethod
    def uniform(cls, points) -> "PathSample":
        """Sample on the uniform grid ``i / (n - 1)`` (``[0.]`` if ``n == 1``)."""
        points = np.asarray(points, dtype=np.float64)
        n = points.shape[0]
        times = np.linspace(0.0, 1.0, n) if n > 1 else np.zeros(1)
        return cls(times, points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.times.size

    def __repr__(self):
        return f"PathSample(n={len(self)}, dim={self.dim})"


def signature_levels(increments, M: int, N: int | None = None) -> list:
    """Level-``N`` Euler signature for a batch of paths given by increments.

    Parameters
    ----------
    increments : array of shape (batch, steps, d)
    M : int
        Truncation level.
    N : int, optional
        Order of the per-segment exponential, defaults to ``M``.

    Returns
    -------
    list of ndarray
        ``out[m]`` has shape ``(batch, d**m)``.
    """
    inc = np.asarray(increments, dtype=np.float64)
    if inc.ndim != 3:
        raise ValueError(f"increments must have shape (batch, steps, d), got {inc.shape}")
    N = M if N is None else N
    if not 1 <= N <= M:
        raise ValueError(f"need 1 <= N <= M, got N={N}, M={M}")
    B, steps, d = inc.shape
    sig = [np.ones((B, 1))] + [np.zeros((B, d**m)) for m in range(1, M + 1)]
    for s in range(steps):
        delta = inc[:, s, :]
        powers = [np.ones((B, 1))]
        for k in range(1, N + 1):
            powers.append(
                (powers[-1][:, :, None] * delta[:, None, :]).reshape(B, -1)
            )
        powers = [p / factorial(k) for k, p in enumerate(powers)]
        # Descending m so that sig[m - k] is still the pre-step value.
        for m in range(M, 0, -1):
            acc = sig[m]
            for k in range(1, min(m, N) + 1):
                acc = acc + (
                    sig[m - k][:, :, None] * powers[k][:, None, :]
                ).reshape(B, -1)
            sig[m] = acc
    return sig


def sig_linear(path: PathSample, M: int, N: int) -> GroupElement:
    """Chen product of per-segment truncated exponentials along the path.

    With ``N == M`` this is the exact level-``M`` signature of the
    piecewise-linear interpolation; with ``N < M`` each segment only
    contributes its first ``N`` tensor powers.
    """
    if not 1 <= N <= M:
        raise ValueError(f"need 1 <= N <= M, got N={N}, M={M}")
    inc = np.diff(path.points, axis=0)[None]
    levels = signature_levels(inc, M, N)
    return GroupElement(path.dim, tuple(lvl[0] for lvl in levels))


def time_augment(path: PathSample) -> PathSample:
    """Append the observation time as an extra last coordinate."""
    return PathSample(path.times, np.column_stack([path.points, path.times]))


def add_lags(path: PathSample, lags: int) -> PathSample:
    """Stack each point with the ``lags`` following points.

    Indices past the end repeat the final point, so row ``n - 1`` is
    ``(x_n, ..., x_n)`` and row ``n - 2`` is ``(x_{n-1}, x_n, ..., x_n)``.
    """
    if lags < 0:
        raise ValueError(f"lags must be >= 0, got {lags}")
    if lags == 0:
        return path
    x = path.points
    n = x.shape[0]
    idx = np.minimum(np.arange(n)[:, None] + np.arange(lags + 1)[None, :], n - 1)
    return PathSample(path.times, x[idx].reshape(n, -1))


def one_variation(points, start: int = 0, stop: int | None = None) -> float:
    """1-variation of the piecewise-linear path through ``points[start:stop]``."""
    pts = np.asarray(points, dtype=np.float64)[start:stop]
    if pts.shape[0] < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())
