"""Unbiased squared-MMD estimation and two-sample tests on Gram matrices."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import ShapeMismatchError

__all__ = ["TestResult", "mmd2_unbiased", "permutation_test", "threshold_test"]


@dataclass
class TestResult:
    """Outcome of one two-sample test.

    ``perm_values`` holds the statistic under every sampled relabeling so
    the permutation histogram can be reproduced.
    """

    __test__ = False  # not a pytest class

    t_obs: float
    perm_values: np.ndarray
    p_value: float
    c_alpha: float | None
    reject_threshold: bool | None
    reject_permutation: bool
    seed: int
    alpha: float = 0.05
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["perm_values"] = [float(v) for v in self.perm_values]
        out.update(out.pop("extra"))
        return out


def mmd2_unbiased(Kxx, Kxy, Kyy) -> float:
    """Unbiased estimate of the squared MMD; may be negative."""
    Kxx = np.asarray(Kxx, dtype=np.float64)
    Kxy = np.asarray(Kxy, dtype=np.float64)
    Kyy = np.asarray(Kyy, dtype=np.float64)
    m, n = Kxx.shape[0], Kyy.shape[0]
    if m < 2 or n < 2:
        raise ValueError(f"need at least two samples per group, got m={m}, n={n}")
    if Kxx.shape != (m, m) or Kyy.shape != (n, n) or Kxy.shape != (m, n):
        raise ShapeMismatchError(
            f"inconsistent block shapes {Kxx.shape}, {Kxy.shape}, {Kyy.shape}"
        )
    xx = (Kxx.sum() - np.trace(Kxx)) / (m * (m - 1))
    yy = (Kyy.sum() - np.trace(Kyy)) / (n * (n - 1))
    return float(xx - 2.0 * Kxy.mean() + yy)


def threshold_test(t_obs: float, m: int, alpha: float = 0.05):
    """Distribution-free threshold ``c_alpha = 4 sqrt(-log(alpha) / m)``.

    Returns ``(c_alpha, reject)``.  Valid for equal group sizes ``m``.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    c_alpha = 4.0 * np.sqrt(-np.log(alpha) / m)
    return float(c_alpha), bool(t_obs > c_alpha)


def _split_stat(K, idx_x, idx_y):
    return mmd2_unbiased(
        K[np.ix_(idx_x, idx_x)], K[np.ix_(idx_x, idx_y)], K[np.ix_(idx_y, idx_y)]
    )


def permutation_test(K_pooled, m: int, n: int, n_perms: int = 250, seed: int = 0,
                     alpha: float = 0.05) -> TestResult:
    """Permutation two-sample test on a pooled Gram matrix.

    The first ``m`` rows of ``K_pooled`` belong to the first sample.  Each
    permutation re-indexes the matrix; the kernel is never re-evaluated.
    The p-value is ``(1 + #{T_perm >= t_obs}) / (1 + n_perms)``.  When
    ``m == n`` the threshold test is reported alongside.
    """
    K = np.asarray(K_pooled, dtype=np.float64)
    if K.shape != (m + n, m + n):
        raise ShapeMismatchError(f"pooled Gram has shape {K.shape}, expected {(m + n, m + n)}")
    if n_perms < 1:
        raise ValueError(f"n_perms must be >= 1, got {n_perms}")
    idx = np.arange(m + n)
    t_obs = _split_stat(K, idx[:m], idx[m:])
    streams = np.random.SeedSequence(seed).spawn(n_perms)
    perm_values = np.empty(n_perms)
    for k, ss in enumerate(streams):
        pi = np.random.default_rng(ss).permutation(m + n)
        perm_values[k] = _split_stat(K, pi[:m], pi[m:])
    # Relabelings equivalent to the observed split must count as ties even
    # though their sums are accumulated in a different order.
    tie_tol = 1e-12 * max(1.0, abs(t_obs))
    p_value = (1.0 + np.count_nonzero(perm_values >= t_obs - tie_tol)) / (1.0 + n_perms)
    if m == n:
        c_alpha, reject_threshold = threshold_test(t_obs, m, alpha)
    else:
        c_alpha, reject_threshold = None, None
    return TestResult(
        t_obs=t_obs,
        perm_values=perm_values,
        p_value=float(p_value),
        c_alpha=c_alpha,
        reject_threshold=reject_threshold,
        reject_permutation=bool(p_value <= alpha),
        seed=seed,
        alpha=alpha,
    )
