import numpy as np
import pytest
from scipy.stats import ortho_group

from sigtest.normalize import NormalizationSpec
from sigtest.sigkernel import (
    SigKernelConfig,
    gram_matrix,
    increment_gram,
    level_inner_products,
    levels_from_increment_gram,
    sig_kernel,
)
from sigtest.signature import PathSample, sig_linear
from sigtest.statekernel import StateKernelConfig, kappa
from sigtest.tensor import inner_product_levels

EUCLID = StateKernelConfig("euclidean")
RBF = StateKernelConfig("rbf", 0.5)


def brute_levels(K, M):
    # Enumerate strictly increasing index tuples on both sides.
    from itertools import combinations

    a, b = K.shape
    out = [1.0]
    for m in range(1, M + 1):
        total = 0.0
        for I in combinations(range(a), m):
            for J in combinations(range(b), m):
                total += np.prod([K[i, j] for i, j in zip(I, J)])
        out.append(total)
    return np.array(out)


def random_path(rng, n, d, scale=1.0):
    return PathSample.uniform(np.cumsum(rng.normal(scale=scale, size=(n, d)), axis=0))


class TestIncrementGram:
    def test_euclidean_is_increment_dot(self, rng):
        x, y = random_path(rng, 5, 2), random_path(rng, 4, 2)
        K = increment_gram(x, y, EUCLID)
        expected = np.diff(x.points, axis=0) @ np.diff(y.points, axis=0).T
        np.testing.assert_allclose(K, expected, rtol=1e-14)

    def test_four_term_expansion(self, rng):
        x, y = random_path(rng, 4, 3), random_path(rng, 5, 3)
        K = increment_gram(x, y, RBF)
        X, Y = x.points, y.points
        for i in range(3):
            for j in range(4):
                e = (kappa(X[i + 1], Y[j + 1], RBF) - kappa(X[i + 1], Y[j], RBF)
                     - kappa(X[i], Y[j + 1], RBF) + kappa(X[i], Y[j], RBF))
                assert K[i, j] == pytest.approx(e, abs=1e-14)

    def test_constant_path(self, rng):
        x = PathSample.uniform(np.ones((4, 2)))
        assert not increment_gram(x, random_path(rng, 3, 2), RBF).any()

    def test_rbf_single_increment_diagonal(self):
        x = PathSample.uniform([[0.0, 0.0], [1.0, 2.0]])
        K = increment_gram(x, x, RBF)
        assert K[0, 0] == pytest.approx(2 - 2 * np.exp(-0.5 * 5), rel=1e-14)

    def test_too_short(self):
        with pytest.raises(ValueError):
            increment_gram(PathSample([0.0], [[1.0]]), PathSample.uniform([0.0, 1.0]), EUCLID)


class TestLevelInnerProducts:
    def test_single_increment(self):
        x = PathSample.uniform([0.0, 2.0])
        y = PathSample.uniform([0.0, -1.5])
        np.testing.assert_array_equal(
            level_inner_products(x, y, SigKernelConfig(M=3)), [1, -3, 0, 0]
        )

    def test_hand_example(self):
        x = PathSample.uniform([0.0, 1.0, 3.0])
        y = PathSample.uniform([0.0, 2.0, 3.0])
        np.testing.assert_allclose(level_inner_products(x, y, SigKernelConfig(M=2)), [1, 9, 4])

    def test_single_point(self):
        x = PathSample([0.5], [[1.0]])
        np.testing.assert_array_equal(
            level_inner_products(x, PathSample.uniform([0.0, 1.0]), SigKernelConfig(M=2)), [1, 0, 0]
        )

    def test_dp_matches_enumeration(self, rng):
        for _ in range(10):
            K = rng.normal(size=(int(rng.integers(1, 6)), int(rng.integers(1, 6))))
            np.testing.assert_allclose(
                levels_from_increment_gram(K, 4), brute_levels(K, 4), rtol=1e-12, atol=1e-13
            )

    def test_oracle_equivalence(self, rng):
        for _ in range(30):
            d = int(rng.integers(1, 4))
            M = int(rng.integers(1, 6))
            x = random_path(rng, int(rng.integers(2, 9)), d)
            y = random_path(rng, int(rng.integers(2, 9)), d)
            fast = level_inner_products(x, y, SigKernelConfig(M=M))
            slow = inner_product_levels(sig_linear(x, M, 1), sig_linear(y, M, 1))
            np.testing.assert_allclose(fast, slow, rtol=1e-10, atol=1e-12)

    def test_orthogonal_and_translation_invariance(self, rng):
        x, y = random_path(rng, 7, 3), random_path(rng, 6, 3)
        Q = ortho_group.rvs(3, random_state=1)
        shift = rng.normal(size=3)
        cfg = SigKernelConfig(M=4)
        base = level_inner_products(x, y, cfg)
        rot = level_inner_products(
            PathSample(x.times, x.points @ Q.T), PathSample(y.times, y.points @ Q.T), cfg
        )
        np.testing.assert_allclose(rot, base, rtol=1e-10)
        rbf_cfg = SigKernelConfig(M=4, state_kernel=RBF)
        moved = level_inner_products(
            PathSample(x.times, x.points + shift), PathSample(y.times, y.points + shift), rbf_cfg
        )
        np.testing.assert_allclose(moved, level_inner_products(x, y, rbf_cfg), rtol=1e-9, atol=1e-12)


class TestSigKernel:
    def test_constant_path(self):
        x = PathSample.uniform(np.zeros((5, 2)))
        assert sig_kernel(x, x, SigKernelConfig()) == 1.0

    def test_hand_example_unnormalized(self):
        x = PathSample.uniform([0.0, 1.0, 3.0])
        y = PathSample.uniform([0.0, 2.0, 3.0])
        assert sig_kernel(x, y, SigKernelConfig(M=2, normalize=False)) == pytest.approx(14.0)

    def test_plateau_normalization_is_identity(self, rng):
        x, y = random_path(rng, 5, 2, scale=0.1), random_path(rng, 6, 2, scale=0.1)
        a = sig_kernel(x, y, SigKernelConfig(normalize=True))
        b = sig_kernel(x, y, SigKernelConfig(normalize=False))
        assert a == b

    def test_symmetric_and_bounded(self, rng):
        spec = NormalizationSpec()
        for state in (EUCLID, RBF):
            cfg = SigKernelConfig(M=4, state_kernel=state, lags=2, augment_time=True)
            for _ in range(10):
                x, y = random_path(rng, 8, 2, scale=3), random_path(rng, 9, 2, scale=3)
                kxy = sig_kernel(x, y, cfg)
                assert kxy == pytest.approx(sig_kernel(y, x, cfg), rel=1e-12)
                assert abs(kxy) <= spec.psi_sup
                assert sig_kernel(x, x, cfg) >= 0

    def test_transforms_applied(self, rng):
        x, y = random_path(rng, 6, 1), random_path(rng, 6, 1)
        plain = sig_kernel(x, y, SigKernelConfig(M=3, normalize=False))
        lagged = sig_kernel(x, y, SigKernelConfig(M=3, lags=1, augment_time=True, normalize=False))
        assert plain != lagged

    def test_discretization_consistency(self):
        def path(n):
            t = np.linspace(0, 1, n)
            return PathSample(t, np.column_stack([np.sin(2 * t), np.cos(3 * t) + t]))

        def other(n):
            t = np.linspace(0, 1, n)
            return PathSample(t, np.column_stack([t**2, np.sin(5 * t)]))

        cfg = SigKernelConfig(M=4)
        ref = sig_kernel(path(2049), other(2049), cfg)
        errs = [abs(sig_kernel(path(2**k + 1), other(2**k + 1), cfg) - ref) for k in range(2, 9)]
        for a, b in zip(errs, errs[1:]):
            assert b <= 1.1 * a
        assert errs[-1] < 0.05 * errs[0]


class TestGramMatrix:
    def paths(self, rng, count=6, dim=2):
        return [random_path(rng, int(rng.integers(4, 9)), dim, scale=2) for _ in range(count)]

    def test_single(self, rng):
        x = random_path(rng, 6, 2)
        cfg = SigKernelConfig()
        np.testing.assert_allclose(gram_matrix([x], cfg=cfg), [[sig_kernel(x, x, cfg)]], rtol=1e-12)

    @pytest.mark.parametrize("state", [EUCLID, RBF])
    @pytest.mark.parametrize("method", ["dp", "auto"])
    def test_matches_pairwise(self, rng, state, method):
        cfg = SigKernelConfig(M=3, state_kernel=state, lags=1, augment_time=True)
        xs, ys = self.paths(rng), self.paths(rng, 4)
        G = gram_matrix(xs, ys, cfg, method=method)
        expected = [[sig_kernel(x, y, cfg) for y in ys] for x in xs]
        np.testing.assert_allclose(G, expected, rtol=1e-10, atol=1e-12)
        S = gram_matrix(xs, cfg=cfg, method=method)
        np.testing.assert_array_equal(S, S.T)
        np.testing.assert_allclose(S, [[sig_kernel(a, b, cfg) for b in xs] for a in xs], rtol=1e-10)

    def test_features_match_dp(self, rng):
        cfg = SigKernelConfig(M=4, lags=2)
        xs = self.paths(rng, 8)
        np.testing.assert_allclose(
            gram_matrix(xs, cfg=cfg, method="features"), gram_matrix(xs, cfg=cfg, method="dp"),
            rtol=1e-10,
        )

    def test_features_need_euclidean(self, rng):
        with pytest.raises(ValueError):
            gram_matrix(self.paths(rng), cfg=SigKernelConfig(state_kernel=RBF), method="features")

    def test_thread_count_does_not_change_result(self, rng):
        cfg = SigKernelConfig(M=3, state_kernel=RBF)
        xs = self.paths(rng, 12)
        np.testing.assert_array_equal(
            gram_matrix(xs, cfg=cfg, method="dp", n_jobs=1),
            gram_matrix(xs, cfg=cfg, method="dp", n_jobs=3),
        )

    def test_positive_semidefinite(self, rng):
        for state in (EUCLID, RBF):
            cfg = SigKernelConfig(M=4, state_kernel=state)
            G = gram_matrix(self.paths(rng, 5), cfg=cfg)
            assert np.linalg.eigvalsh(G).min() >= -1e-8

    def test_empty(self):
        with pytest.raises(ValueError):
            gram_matrix([], cfg=SigKernelConfig())
