"""Truncated signature kernel on sequences by dynamic programming.

For sequences ``x`` and ``y`` with lifted increments
``Δφ_i = φ(x_{i+1}) - φ(x_i)``, level ``m`` of the kernel is

    Σ_{i_1 < ... < i_m, j_1 < ... < j_m} Π_l <Δφ_{i_l}, Δψ_{j_l}>,

the level-``m`` inner product of the level-1 Euler signatures of the two
lifted sequences.  The increment inner products only require the state
kernel ``κ``, and the nested sums are accumulated with 2-D prefix sums in
``O(n n' M)`` time.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._dp import gather_pairs, levels_batched
from .normalize import NormalizationSpec, solve_lambda
from .signature import PathSample, add_lags, time_augment
from .statekernel import StateKernelConfig, kappa_matrix

__all__ = [
    "SigKernelConfig",
    "gram_matrix",
    "increment_gram",
    "level_inner_products",
    "levels_from_increment_gram",
    "prepare_path",
    "sig_kernel",
]

# Bound on state-kernel entries materialised per block of row paths.
_CHUNK_ELEMS = 4_000_000
# Largest explicit feature dimension the "auto" method will materialise.
_MAX_FEATURES = 50_000


@dataclass(frozen=True)
class SigKernelConfig:
    M: int = 4
    state_kernel: StateKernelConfig = field(default_factory=StateKernelConfig)
    lags: int = 0
    augment_time: bool = False
    normalization: NormalizationSpec = field(default_factory=NormalizationSpec)
    normalize: bool = True

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"truncation level M must be >= 1, got {self.M}")
        if self.lags < 0:
            raise ValueError(f"lags must be >= 0, got {self.lags}")


def prepare_path(path: PathSample, cfg: SigKernelConfig) -> PathSample:
    """Apply the configured transforms: lags first, then time augmentation."""
    path = add_lags(path, cfg.lags)
    if cfg.augment_time:
        path = time_augment(path)
    return path


def _increment_gram(X, Y, state: StateKernelConfig) -> np.ndarray:
    # X (..., n, d), Y (..., k, d) -> (..., n-1, k-1)
    if state.kind == "euclidean":
        return np.diff(X, axis=-2) @ np.swapaxes(np.diff(Y, axis=-2), -1, -2)
    k = kappa_matrix(X, Y, state)
    return (k[..., 1:, 1:] - k[..., 1:, :-1]) - (k[..., :-1, 1:] - k[..., :-1, :-1])


def increment_gram(x: PathSample, y: PathSample, state: StateKernelConfig) -> np.ndarray:
    """Inner products of lifted increments, shape ``(n - 1, n' - 1)``."""
    if len(x) < 2 or len(y) < 2:
        raise ValueError("increment Gram needs at least two points per sequence")
    return _increment_gram(x.points, y.points, state)


def levels_from_increment_gram(K, M: int) -> np.ndarray:
    """Level-wise kernel values from a (batch of) increment Gram matrices.

    ``K`` has shape ``(..., a, b)``; the result has shape ``(..., M + 1)``
    with ``out[..., 0] == 1``.
    """
    K = np.asarray(K, dtype=np.float64)
    out = np.empty(K.shape[:-2] + (M + 1,))
    out[..., 0] = 1.0
    if K.shape[-1] == 0 or K.shape[-2] == 0:
        out[..., 1:] = 0.0
        return out
    A = K
    out[..., 1] = A.sum(axis=(-2, -1))
    prefix = np.zeros_like(K)
    for m in range(2, M + 1):
        # prefix[i, j] = Σ_{i' < i, j' < j} A[i', j']
        S = A.cumsum(axis=-2).cumsum(axis=-1)
        prefix[..., 1:, 1:] = S[..., :-1, :-1]
        A = K * prefix
        out[..., m] = A.sum(axis=(-2, -1))
    return out


def level_inner_products(x: PathSample, y: PathSample, cfg: SigKernelConfig) -> np.ndarray:
    """Level-wise signature kernel of ``x`` and ``y`` as given (no transforms)."""
    if len(x) < 2 or len(y) < 2:
        out = np.zeros(cfg.M + 1)
        out[0] = 1.0
        return out
    return levels_from_increment_gram(increment_gram(x, y, cfg.state_kernel), cfg.M)


def _combine(levels_xy, lam_x, lam_y, cfg):
    if not cfg.normalize:
        return levels_xy.sum(axis=-1)
    scale = np.multiply.outer(lam_x, lam_y)[..., None] ** np.arange(cfg.M + 1)
    return (scale * levels_xy).sum(axis=-1)


def sig_kernel(x: PathSample, y: PathSample, cfg: SigKernelConfig) -> float:
    """Kernel value between two sequences, normalized if configured."""
    x = prepare_path(x, cfg)
    y = prepare_path(y, cfg)
    lxy = level_inner_products(x, y, cfg)
    if not cfg.normalize:
        return float(lxy.sum())
    lam_x = solve_lambda(level_inner_products(x, x, cfg), cfg.normalization).lam
    lam_y = solve_lambda(level_inner_products(y, y, cfg), cfg.normalization).lam
    return float(np.dot((lam_x * lam_y) ** np.arange(cfg.M + 1), lxy))


def _stack(paths, cfg):
    # Transform then pad with copies of the last point; a repeated point is a
    # zero increment and contributes nothing to any level.
    prepared = [prepare_path(p, cfg).points for p in paths]
    n = max(p.shape[0] for p in prepared)
    out = np.empty((len(prepared), n, prepared[0].shape[1]))
    for i, p in enumerate(prepared):
        if p.shape[1] != out.shape[2]:
            raise ValueError("all paths must share the same dimension")
        out[i, : p.shape[0]] = p
        out[i, p.shape[0]:] = p[-1]
    lengths = np.array([p.shape[0] for p in prepared], dtype=np.int64)
    return out, lengths


def _feature_dim(d, M):
    return sum(d**m for m in range(M + 1))


def _feature_levels(X, M, chunk=16):
    """Level-1 Euler signature levels of stacked paths ``X (B, n, d)``.

    With ``P_m(k)`` the level-``m`` sum over steps before ``k`` and
    ``R_k = Σ_{i > k} Δ_i``, the two top levels are
    ``Σ_k P_{M-2}(k) ⊗ Δ_k`` and ``Σ_k P_{M-2}(k) ⊗ Δ_k ⊗ R_k``, so per-step
    prefixes are only materialised up to level ``M - 2``.
    """
    inc = np.diff(X, axis=1)
    B, steps, d = inc.shape
    out = [np.ones((B, 1))] + [np.empty((B, d**m)) for m in range(1, M + 1)]
    for s in range(0, B, chunk):
        D = inc[s : s + chunk]
        b = D.shape[0]
        if M == 1:
            out[1][s : s + b] = D.sum(axis=1)
            continue
        prefix = np.ones((b, steps, 1))
        for m in range(1, M - 1):
            contrib = (prefix[:, :, :, None] * D[:, :, None, :]).reshape(b, steps, -1)
            out[m][s : s + b] = contrib.sum(axis=1)
            prefix = np.cumsum(contrib, axis=1) - contrib
        R = D.sum(axis=1, keepdims=True) - np.cumsum(D, axis=1)
        DR = (D[:, :, :, None] * R[:, :, None, :]).reshape(b, steps, -1)
        PT = prefix.transpose(0, 2, 1)
        out[M - 1][s : s + b] = (PT @ D).reshape(b, -1)
        out[M][s : s + b] = (PT @ DR).reshape(b, -1)
    return out


def _block(X, nx, Y, ny, cfg, j_start):
    """Level-wise kernel for row paths ``X`` against column paths ``Y``.

    Pairs with column index below ``j_start[row]`` are skipped and left zero.
    """
    c, n, D = X.shape
    B, k, _ = Y.shape
    if cfg.state_kernel.kind == "euclidean":
        dX = np.diff(X, axis=1).reshape(-1, D)
        dY = np.diff(Y, axis=1).reshape(-1, D)
        G = (dX @ dY.T).reshape(c, n - 1, B, k - 1)
        second_difference = False
    else:
        Xf = X.reshape(-1, D)
        Yf = Y.reshape(-1, D)
        sq = (Xf * Xf).sum(1)[:, None] + (Yf * Yf).sum(1)[None, :] - 2.0 * (Xf @ Yf.T)
        np.maximum(sq, 0.0, out=sq)
        sq *= -cfg.state_kernel.gamma
        G = np.exp(sq, out=sq).reshape(c, n, B, k)
        second_difference = True
    K, rows, cols = gather_pairs(G, second_difference, nx, ny, j_start)
    levels = np.empty((rows.size, cfg.M + 1))
    levels_batched(K, cfg.M, levels)
    out = np.zeros((c, B, cfg.M + 1))
    out[rows, cols] = levels
    return out


def _self_levels(X, nx, cfg):
    out = np.empty((X.shape[0], cfg.M + 1))
    zero = np.zeros(1, dtype=np.int64)
    for i in range(X.shape[0]):
        Xi = X[i : i + 1, : nx[i]]
        out[i] = _block(Xi, nx[i : i + 1], Xi, nx[i : i + 1], cfg, zero)[0, 0]
    return out


def gram_matrix(xs, ys=None, cfg: SigKernelConfig = SigKernelConfig(),
                method: str = "auto", n_jobs: int = 1) -> np.ndarray:
    """Kernel matrix ``G[i, j] = sig_kernel(xs[i], ys[j])``.

    Pass ``ys=None`` for the symmetric Gram of ``xs`` with itself; then only
    the upper triangle is computed.  ``method`` selects the dynamic program
    (``"dp"``), explicit level-1 Euler signature features (``"features"``,
    euclidean state kernel only), or picks features when they are small
    enough (``"auto"``).  Results do not depend on ``n_jobs``.
    """
    if len(xs) == 0 or (ys is not None and len(ys) == 0):
        raise ValueError("gram_matrix needs non-empty collections")
    symmetric = ys is None
    X, nx = _stack(xs, cfg)
    Y, ny = (X, nx) if symmetric else _stack(ys, cfg)
    if X.shape[2] != Y.shape[2]:
        raise ValueError("xs and ys have different dimensions after transforms")
    if method == "auto":
        small = _feature_dim(X.shape[2], cfg.M) <= _MAX_FEATURES
        method = "features" if cfg.state_kernel.kind == "euclidean" and small else "dp"
    if method == "features":
        if cfg.state_kernel.kind != "euclidean":
            raise ValueError("explicit features are only available for the euclidean kernel")
        fx = _feature_levels(X, cfg.M)
        fy = fx if symmetric else _feature_levels(Y, cfg.M)
        L = np.stack([a @ b.T for a, b in zip(fx, fy)], axis=-1)
        sx = np.stack([np.einsum("ij,ij->i", a, a) for a in fx], axis=-1)
        sy = sx if symmetric else np.stack([np.einsum("ij,ij->i", b, b) for b in fy], axis=-1)
    elif method == "dp":
        per_path = X.shape[1] * Y.shape[0] * Y.shape[1]
        chunk = max(1, _CHUNK_ELEMS // per_path)
        L = np.zeros((X.shape[0], Y.shape[0], cfg.M + 1))

        def rows(start):
            stop = min(start + chunk, X.shape[0])
            j0 = start if symmetric else 0
            j_start = np.arange(stop - start) if symmetric else np.zeros(stop - start, dtype=int)
            L[start:stop, j0:] = _block(
                X[start:stop], nx[start:stop], Y[j0:], ny[j0:], cfg, j_start
            )

        starts = range(0, X.shape[0], chunk)
        if n_jobs == 1:
            for s in starts:
                rows(s)
        else:
            with ThreadPoolExecutor(max_workers=n_jobs) as pool:
                list(pool.map(rows, starts))
        if symmetric:
            iu = np.triu_indices(X.shape[0], 1)
            L[iu[1], iu[0]] = L[iu]
            sx = sy = np.diagonal(L, axis1=0, axis2=1).T
        else:
            sx = _self_levels(X, nx, cfg)
            sy = _self_levels(Y, ny, cfg)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not cfg.normalize:
        return L.sum(axis=-1)
    lam_x = np.array([solve_lambda(s, cfg.normalization).lam for s in sx])
    lam_y = lam_x if symmetric else np.array([solve_lambda(s, cfg.normalization).lam for s in sy])
    return _combine(L, lam_x, lam_y, cfg)
