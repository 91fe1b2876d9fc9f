"""Tensor normalization by dilation.

A group-like tensor ``t`` is mapped to ``δ_λ t`` where ``λ = λ(t) >= 0`` is
chosen so that ``‖δ_λ t‖² = ψ(‖t‖)``.  Since ``‖δ_λ t‖² = Σ_m λ^{2m} ‖t^m‖²``
this is the non-negative root of a polynomial in ``λ²`` whose only
non-positive coefficient is the constant one, so the root is unique.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .exceptions import ConvergenceError, ShapeMismatchError
from .tensor import GroupElement, dilate, level_norms_sq

__all__ = [
    "NormalizationResult",
    "NormalizationSpec",
    "normalize_tensor",
    "normalized_inner",
    "psi_of_norm",
    "solve_lambda",
]


@dataclass(frozen=True)
class NormalizationSpec:
    """Parameters of the bounded, injective norm profile ``ψ``.

    ``psi(sqrt(x)) = x`` for ``x <= m_psi`` and decays towards the supremum
    ``m_psi * (1 + 1/a)`` beyond it.
    """

    m_psi: float = 4.0
    a: float = 1.0
    root_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not self.m_psi >= 1:
            raise ValueError(f"m_psi must be >= 1, got {self.m_psi}")
        if not self.a > 0:
            raise ValueError(f"a must be > 0, got {self.a}")
        if not self.root_tol > 0:
            raise ValueError(f"root_tol must be > 0, got {self.root_tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")

    @property
    def psi_sup(self) -> float:
        return self.m_psi * (1.0 + 1.0 / self.a)


@dataclass(frozen=True)
class NormalizationResult:
    lam: float
    target: float
    achieved_norm_sq: float


def _psi_sq(x: float, spec: NormalizationSpec) -> float:
    # ψ written in terms of the squared norm x = ‖t‖².
    M, a = spec.m_psi, spec.a
    if x <= M:
        return x
    return M + M ** (1 + a) * (M**-a - x**-a) / a


def psi_of_norm(norm: float, spec: NormalizationSpec = NormalizationSpec()) -> float:
    """Evaluate ``ψ(norm)``; ``norm`` is a tensor norm and so at least 1."""
    if not norm >= 1:
        raise ValueError(f"psi is defined on [1, inf), got {norm}")
    return _psi_sq(float(norm) ** 2, spec)


def _poly(lam, norms):
    # Σ_m λ^{2m} norms[m] by Horner in λ².
    mu = lam * lam
    acc = 0.0
    for c in norms[::-1]:
        acc = acc * mu + c
    return acc


def solve_lambda(norms, spec: NormalizationSpec = NormalizationSpec()) -> NormalizationResult:
    """Find ``λ >= 0`` with ``Σ_m λ^{2m} norms[m] = ψ(sqrt(Σ_m norms[m]))``.

    ``norms`` are the squared level norms of a group-like tensor.  Returns
    ``λ = 1`` when every level above zero vanishes, and also whenever the
    tensor lies on the plateau ``‖t‖² <= m_psi`` where ``ψ`` is the identity.
    """
    norms = np.asarray(norms, dtype=np.float64)
    if norms.ndim != 1 or norms.size < 1 or norms[0] != 1.0:
        raise ValueError("norms must be a 1-D sequence starting with 1")
    if np.any(norms < 0):
        raise ValueError("squared norms must be non-negative")
    total = float(norms.sum())
    target = _psi_sq(total, spec)
    if not np.any(norms[1:] > 0) or total <= spec.m_psi:
        return NormalizationResult(1.0, target, total)

    def f(lam):
        return _poly(lam, norms) - target

    hi = 1.0
    for _ in range(spec.max_iter):
        if f(hi) >= 0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError("could not bracket the normalization root", (0.0, hi))
    lam, info = brentq(
        f, 0.0, hi, xtol=spec.root_tol * 1e-3, maxiter=spec.max_iter,
        full_output=True, disp=False,
    )
    if not info.converged:
        raise ConvergenceError(
            f"root finder stopped after {info.iterations} iterations: {info.flag}",
            (0.0, hi),
        )
    return NormalizationResult(float(lam), target, _poly(lam, norms))


def normalize_tensor(t: GroupElement, spec: NormalizationSpec = NormalizationSpec()) -> GroupElement:
    """Dilate ``t`` so that its squared norm becomes ``ψ(‖t‖)``."""
    return dilate(t, solve_lambda(level_norms_sq(t), spec).lam)


def normalized_inner(levels_xy, norms_x, norms_y, spec: NormalizationSpec = NormalizationSpec()) -> float:
    """Inner product of the normalized tensors from level-wise data alone.

    ``<δ_{λx} s, δ_{λy} t> = Σ_m (λx λy)^m <s^m, t^m>``, so only the
    level-wise cross inner products and each side's level norms are needed.
    """
    levels_xy = np.asarray(levels_xy, dtype=np.float64)
    if not (len(levels_xy) == len(norms_x) == len(norms_y)):
        raise ShapeMismatchError(
            f"level sequences differ in length: {len(levels_xy)}, "
            f"{len(norms_x)}, {len(norms_y)}"
        )
    scale = solve_lambda(norms_x, spec).lam * solve_lambda(norms_y, spec).lam
    return float(np.dot(scale ** np.arange(levels_xy.size), levels_xy))
