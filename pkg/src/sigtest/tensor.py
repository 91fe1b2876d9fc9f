"""Truncated tensor algebra over R^d.

An element of the truncated tensor algebra is stored level by level; level
``m`` is a flat row-major array of length ``d**m`` indexed by words
``(i_1, ..., i_m)``.  Only group-like elements (scalar part equal to one) are
represented here, since those are the objects signatures and their
normalizations live in.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .exceptions import ShapeMismatchError

__all__ = [
    "GroupElement",
    "chen_product",
    "dilate",
    "inner_product_levels",
    "level_norms_sq",
    "segment_exp",
    "unit",
]


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Truncated tensor with unit scalar component.

    Parameters
    ----------
    dim : int
        Dimension ``d`` of the underlying vector space.
    levels : tuple of ndarray
        ``levels[m]`` holds the ``d**m`` coefficients of level ``m``;
        ``levels[0]`` must be exactly ``[1.0]``.
    """

    dim: int
    levels: tuple

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if len(self.levels) < 1:
            raise ValueError("a GroupElement needs at least level 0")
        frozen = []
        for m, lvl in enumerate(self.levels):
            arr = np.array(lvl, dtype=np.float64).ravel()
            if arr.size != self.dim**m:
                raise ShapeMismatchError(
                    f"level {m} has {arr.size} entries, expected {self.dim**m}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"level {m} contains non-finite entries")
            arr.setflags(write=False)
            frozen.append(arr)
        if frozen[0][0] != 1.0:
            raise ValueError(f"scalar component must be 1, got {frozen[0][0]}")
        object.__setattr__(self, "levels", tuple(frozen))

    @property
    def max_level(self) -> int:
        return len(self.levels) - 1

    @classmethod
    def from_levels(cls, levels, dim=None) -> "GroupElement":
        """Build from per-level arrays; ``dim`` is inferred from level 1."""
        levels = [np.asarray(lvl, dtype=np.float64).ravel() for lvl in levels]
        if dim is None:
            if len(levels) < 2:
                raise ValueError("cannot infer dim from a level-0 element")
            dim = levels[1].size
        return cls(dim, tuple(levels))

    def level(self, m: int) -> np.ndarray:
        """Level ``m`` reshaped to a ``(d,)*m`` array."""
        return self.levels[m].reshape((self.dim,) * m)

    def to_vector(self) -> np.ndarray:
        """All levels concatenated into one flat feature vector."""
        return np.concatenate(self.levels)

    def allclose(self, other: "GroupElement", rtol=1e-12, atol=0.0) -> bool:
        _check_compatible(self, other)
        return all(
            np.allclose(a, b, rtol=rtol, atol=atol)
            for a, b in zip(self.levels, other.levels)
        )

    def __repr__(self):
        return f"GroupElement(dim={self.dim}, max_level={self.max_level})"


def _check_compatible(a: GroupElement, b: GroupElement) -> None:
    if a.dim != b.dim:
        raise ShapeMismatchError(f"dimension mismatch: {a.dim} != {b.dim}")
    if a.max_level != b.max_level:
        raise ShapeMismatchError(
            f"truncation mismatch: {a.max_level} != {b.max_level}"
        )


def unit(dim: int, max_level: int) -> GroupElement:
    """The identity element ``(1, 0, 0, ...)``."""
    if max_level < 0:
        raise ValueError(f"max_level must be >= 0, got {max_level}")
    levels = [np.ones(1)] + [np.zeros(dim**m) for m in range(1, max_level + 1)]
    return GroupElement(dim, tuple(levels))


def chen_product(a: GroupElement, b: GroupElement, M: int) -> GroupElement:
    """Tensor-algebra product ``a ⊗ b`` truncated at level ``M``.

    Levels of the operands above their own truncation are treated as zero.
    """
    if M < 0:
        raise ValueError(f"truncation level must be >= 0, got {M}")
    if a.dim != b.dim:
        raise ShapeMismatchError(f"dimension mismatch: {a.dim} != {b.dim}")
    d = a.dim
    out = [np.ones(1)]
    for m in range(1, M + 1):
        acc = np.zeros(d**m)
        for n in range(m + 1):
            if m - n > a.max_level or n > b.max_level:
                continue
            acc += np.outer(a.levels[m - n], b.levels[n]).ravel()
        out.append(acc)
    return GroupElement(d, tuple(out))


def dilate(t: GroupElement, lam: float) -> GroupElement:
    """Scale level ``m`` by ``lam**m``."""
    if not lam >= 0:
        raise ValueError(f"dilation factor must be non-negative, got {lam}")
    return GroupElement(
        t.dim, tuple(lvl * lam**m for m, lvl in enumerate(t.levels))
    )


def level_norms_sq(t: GroupElement) -> np.ndarray:
    """Squared Hilbert-Schmidt norm of every level, ``values[0] == 1``."""
    return np.array([float(lvl @ lvl) for lvl in t.levels])


def inner_product_levels(a: GroupElement, b: GroupElement) -> np.ndarray:
    """Level-wise inner products; their sum is ``<a, b>``."""
    _check_compatible(a, b)
    return np.array([float(x @ y) for x, y in zip(a.levels, b.levels)])


def segment_exp(delta, N: int, M: int) -> GroupElement:
    """Truncated exponential of a single increment.

    Level ``m`` is ``delta^{⊗m} / m!`` for ``m <= N`` and zero for
    ``N < m <= M``.  With ``N == M`` this is the exact signature of the
    straight segment with displacement ``delta``.
    """
    delta = np.asarray(delta, dtype=np.float64).ravel()
    if not 1 <= N <= M:
        raise ValueError(f"need 1 <= N <= M, got N={N}, M={M}")
    d = delta.size
    levels = [np.ones(1)]
    power = np.ones(1)
    for m in range(1, M + 1):
        if m <= N:
            power = np.outer(power, delta).ravel()
            levels.append(power / factorial(m))
        else:
            levels.append(np.zeros(d**m))
    return GroupElement(d, tuple(levels))
