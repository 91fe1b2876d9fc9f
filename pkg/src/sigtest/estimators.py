"""scikit-learn compatible wrappers around the signature machinery."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin, clone
from sklearn.utils.validation import check_is_fitted

from .mmd import mmd2_unbiased, permutation_test
from .normalize import NormalizationSpec, solve_lambda
from .sigkernel import SigKernelConfig, gram_matrix, prepare_path
from .signature import signature_levels
from .statekernel import StateKernelConfig, median_heuristic, median_step_gamma
from .validation import check_paths

__all__ = ["FlatRBFKernel", "MMDTwoSampleTest", "SignatureKernel", "SignatureTransformer"]


class SignatureTransformer(TransformerMixin, BaseEstimator):
    """Explicit (optionally normalized) truncated signature features.

    Each path becomes the concatenation of its signature levels ``0..M``
    computed with order-``N`` segment exponentials (``N=1`` gives the
    features whose inner products :class:`SignatureKernel` evaluates; ``N``
    defaults to ``M``).  Feature count grows as
    ``d**M``, so this is meant for low-dimensional paths; use
    :class:`SignatureKernel` otherwise.
    """

    def __init__(self, M=4, N=None, lags=0, augment_time=False, normalize=True,
                 m_psi=4.0, a=1.0):
        self.M = M
        self.N = N
        self.lags = lags
        self.augment_time = augment_time
        self.normalize = normalize
        self.m_psi = m_psi
        self.a = a

    def _config(self):
        return SigKernelConfig(
            M=self.M, lags=self.lags, augment_time=self.augment_time,
            normalization=NormalizationSpec(self.m_psi, self.a), normalize=self.normalize,
        )

    def fit(self, X, y=None):
        paths = check_paths(X)
        self.n_features_in_ = paths[0].dim
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        cfg = self._config()
        paths = [prepare_path(p, cfg) for p in check_paths(X)]
        rows = []
        for p in paths:
            inc = np.diff(p.points, axis=0)[None]
            levels = [lvl[0] for lvl in signature_levels(inc, self.M, self.N or self.M)]
            if self.normalize:
                norms = np.array([lvl @ lvl for lvl in levels])
                lam = solve_lambda(norms, cfg.normalization).lam
                levels = [lvl * lam**m for m, lvl in enumerate(levels)]
            rows.append(np.concatenate(levels))
        return np.vstack(rows)


class SignatureKernel(BaseEstimator):
    """Normalized truncated signature kernel on sequences.

    ``fit`` only resolves data-dependent hyperparameters.  With
    ``kernel="rbf"`` the coefficient ``gamma`` may be a float or

    * ``"median"``: median heuristic over all (transformed) state points of
      the fitted paths, subsampled to ``max_median_points`` rows;
    * ``"median-step"``: inverse median squared length of consecutive steps
      of the transformed paths.
    """

    def __init__(self, M=4, kernel="euclidean", gamma="median", lags=0,
                 augment_time=False, normalize=True, m_psi=4.0, a=1.0,
                 max_median_points=1000, method="auto", n_jobs=1, random_state=0):
        self.M = M
        self.kernel = kernel
        self.gamma = gamma
        self.lags = lags
        self.augment_time = augment_time
        self.normalize = normalize
        self.m_psi = m_psi
        self.a = a
        self.max_median_points = max_median_points
        self.method = method
        self.n_jobs = n_jobs
        self.random_state = random_state

    def _config(self, gamma=None):
        state = StateKernelConfig(self.kernel, gamma if self.kernel == "rbf" else None)
        return SigKernelConfig(
            M=self.M, state_kernel=state, lags=self.lags, augment_time=self.augment_time,
            normalization=NormalizationSpec(self.m_psi, self.a), normalize=self.normalize,
        )

    def fit(self, X, y=None):
        paths = check_paths(X)
        gamma = None
        if self.kernel == "rbf":
            if isinstance(self.gamma, str):
                probe = self._config(gamma=1.0)
                prepared = [prepare_path(p, probe).points for p in paths]
                if self.gamma == "median":
                    gamma = median_heuristic(
                        np.vstack(prepared), self.max_median_points, self.random_state
                    )
                elif self.gamma == "median-step":
                    gamma = median_step_gamma(prepared)
                else:
                    raise ValueError(
                        "gamma must be a positive float, 'median' or 'median-step', "
                        f"got {self.gamma!r}"
                    )
            else:
                gamma = float(self.gamma)
        self.gamma_ = gamma
        self.config_ = self._config(gamma)
        self.n_features_in_ = paths[0].dim
        return self

    def __call__(self, X, Y=None):
        """Gram matrix between ``X`` and ``Y`` (``X`` with itself if omitted)."""
        check_is_fitted(self, "config_")
        xs = check_paths(X)
        ys = None if Y is None else check_paths(Y)
        return gram_matrix(xs, ys, self.config_, method=self.method, n_jobs=self.n_jobs)


class FlatRBFKernel(BaseEstimator):
    """Gaussian kernel on whole paths flattened to vectors.

    All paths must have the same number of observations.
    """

    def __init__(self, gamma="median"):
        self.gamma = gamma

    @staticmethod
    def _flatten(X):
        paths = check_paths(X)
        lengths = {len(p) for p in paths}
        if len(lengths) != 1:
            raise ValueError("flat kernel needs paths of equal length")
        return np.vstack([p.points.ravel() for p in paths])

    def fit(self, X, y=None):
        V = self._flatten(X)
        self.gamma_ = median_heuristic(V) if self.gamma == "median" else float(self.gamma)
        self.n_features_in_ = V.shape[1]
        return self

    def __call__(self, X, Y=None):
        check_is_fitted(self, "gamma_")
        A = self._flatten(X)
        B = A if Y is None else self._flatten(Y)
        sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
        return np.exp(-self.gamma_ * np.maximum(sq, 0.0))


class MMDTwoSampleTest(BaseEstimator):
    """Kernel two-sample test with permutation and threshold decisions.

    ``fit(X, Y)`` refits ``kernel`` on the pooled sample, builds the pooled
    Gram matrix once and stores the outcome on ``result_``.
    """

    def __init__(self, kernel=None, n_perms=250, alpha=0.05, random_state=0):
        self.kernel = kernel
        self.n_perms = n_perms
        self.alpha = alpha
        self.random_state = random_state

    def fit(self, X, Y):
        xs, ys = check_paths(X), check_paths(Y)
        pooled = xs + ys
        kernel = clone(self.kernel if self.kernel is not None else SignatureKernel())
        self.kernel_ = kernel.fit(pooled)
        self.gram_ = self.kernel_(pooled)
        m = len(xs)
        self.result_ = permutation_test(
            self.gram_, m, len(ys), self.n_perms, self.random_state, self.alpha
        )
        self.statistic_ = self.result_.t_obs
        self.p_value_ = self.result_.p_value
        return self

    def score(self, X, Y):
        """Unbiased squared MMD between ``X`` and ``Y`` under the fitted kernel."""
        check_is_fitted(self, "kernel_")
        xs, ys = check_paths(X), check_paths(Y)
        return mmd2_unbiased(self.kernel_(xs), self.kernel_(xs, ys), self.kernel_(ys))
