import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_group_element
from sigtest.exceptions import ConvergenceError, ShapeMismatchError
from sigtest.normalize import (
    NormalizationSpec,
    normalize_tensor,
    normalized_inner,
    psi_of_norm,
    solve_lambda,
)
from sigtest.tensor import GroupElement, dilate, inner_product_levels, level_norms_sq, unit

DEFAULT = NormalizationSpec()


def bisection_lambda(norms, target, iters=200):
    lo, hi = 0.0, 1.0
    while sum(c * hi ** (2 * m) for m, c in enumerate(norms)) < target:
        hi *= 2
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if sum(c * mid ** (2 * m) for m, c in enumerate(norms)) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestPsi:
    def test_fixed_point_at_one(self):
        assert psi_of_norm(1.0) == 1.0

    def test_plateau(self):
        assert psi_of_norm(2.0) == 4.0

    def test_decay_branch(self):
        assert psi_of_norm(3.0) == pytest.approx(56 / 9, rel=1e-15)

    def test_domain(self):
        with pytest.raises(ValueError):
            psi_of_norm(0.5)

    @given(st.floats(1.0, 1e6), st.floats(1.0, 1e6))
    def test_monotone_and_bounded(self, x, y):
        lo, hi = sorted((x, y))
        assert psi_of_norm(lo) <= psi_of_norm(hi) <= DEFAULT.psi_sup
        assert psi_of_norm(hi) <= hi**2

    @given(st.floats(1.0, 100.0), st.floats(1.0, 100.0))
    def test_one_lipschitz_in_squared_norm(self, x, y):
        # ψ(√u) is 1-Lipschitz in u.
        assert abs(psi_of_norm(np.sqrt(x)) - psi_of_norm(np.sqrt(y))) <= abs(x - y) * (1 + 1e-12)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            NormalizationSpec(m_psi=0.5)
        with pytest.raises(ValueError):
            NormalizationSpec(a=0)


class TestSolveLambda:
    def test_degenerate(self):
        assert solve_lambda([1.0, 0.0, 0.0]).lam == 1.0

    def test_plateau(self):
        res = solve_lambda([1.0, 3.0])
        assert res.lam == 1.0 and res.target == 4.0

    def test_quadratic(self):
        res = solve_lambda([1.0, 8.0])
        assert res.lam == pytest.approx(np.sqrt(47 / 72), abs=1e-12)
        assert res.lam == pytest.approx(bisection_lambda([1.0, 8.0], 56 / 9), abs=1e-12)
        assert res.lam == pytest.approx(0.807947, abs=1e-6)

    def test_matches_bisection(self, rng):
        for _ in range(100):
            norms = np.concatenate([[1.0], rng.exponential(size=4) * rng.uniform(0.1, 50)])
            res = solve_lambda(norms)
            assert res.lam == pytest.approx(bisection_lambda(norms, res.target), abs=1e-11)
            assert abs(res.achieved_norm_sq - res.target) <= DEFAULT.root_tol * max(1, res.target)
            assert 0 <= res.lam <= 1

    def test_huge_norms(self):
        res = solve_lambda([1.0, 1e4, 1e8, 1e12, 1e16])
        assert res.achieved_norm_sq == pytest.approx(res.target, rel=1e-12)

    def test_bad_input(self):
        with pytest.raises(ValueError):
            solve_lambda([2.0, 1.0])

    def test_non_convergence_reports_bracket(self):
        with pytest.raises(ConvergenceError) as info:
            solve_lambda([1.0, 1e6, 1e12], NormalizationSpec(max_iter=1))
        assert info.value.bracket is not None


class TestNormalizeTensor:
    def test_unit(self):
        assert normalize_tensor(unit(2, 3)).allclose(unit(2, 3), rtol=0)

    def test_plateau_unchanged(self):
        t = GroupElement(2, (np.ones(1), np.array([1.0, 1.0]), np.array([0.5, 0, 0, 0.5])))
        assert normalize_tensor(t).allclose(t, rtol=0)

    def test_hand_example(self):
        t = GroupElement(1, (np.ones(1), np.array([np.sqrt(8.0)])))
        out = normalize_tensor(t)
        assert out.levels[1][0] == pytest.approx(np.sqrt(8.0) * np.sqrt(47 / 72), rel=1e-12)

    def test_norm_hits_psi_and_is_bounded(self, rng):
        for _ in range(200):
            t = random_group_element(rng, 2, 4, scale=rng.uniform(0.1, 20))
            n2 = level_norms_sq(normalize_tensor(t)).sum()
            assert n2 == pytest.approx(psi_of_norm(np.sqrt(level_norms_sq(t).sum())), abs=1e-10)
            assert n2 <= DEFAULT.psi_sup

    def test_injectivity_proxy(self, rng):
        for _ in range(50):
            t = random_group_element(rng, 2, 3, scale=5)
            s = random_group_element(rng, 2, 3, scale=5)
            assert not normalize_tensor(t).allclose(normalize_tensor(s), rtol=1e-9)
            lam = rng.uniform(0.2, 3)
            a = normalize_tensor(dilate(t, lam))
            b = normalize_tensor(t)
            # Dilations of one tensor share a ray: only the norms are compared.
            na, nb = level_norms_sq(a).sum(), level_norms_sq(b).sum()
            psi_a = psi_of_norm(np.sqrt(level_norms_sq(dilate(t, lam)).sum()))
            assert na == pytest.approx(psi_a, abs=1e-10)
            assert nb <= DEFAULT.psi_sup

    def test_stability_bound(self, rng):
        sup = DEFAULT.psi_sup
        needed = []
        violations = 0
        for _ in range(1000):
            t = random_group_element(rng, 2, 3, scale=rng.uniform(0.1, 10))
            s = GroupElement(2, tuple(
                [np.ones(1)] + [l + rng.normal(scale=rng.uniform(1e-3, 2), size=l.size) for l in t.levels[1:]]
            ))
            eps = np.sqrt(sum(((a - b) ** 2).sum() for a, b in zip(s.levels, t.levels)))
            lhs = np.sqrt(sum(
                ((a - b) ** 2).sum() for a, b in zip(normalize_tensor(s).levels, normalize_tensor(t).levels)
            ))
            scale = max(np.sqrt(eps), eps)
            needed.append(max(0.0, lhs / scale - 1 - 2 * np.sqrt(sup)) ** 2)
            # K = 2 sqrt(m_psi) is the Lipschitz constant of ψ in the norm variable.
            if lhs > (1 + np.sqrt(2 * np.sqrt(DEFAULT.m_psi)) + 2 * np.sqrt(sup)) * scale:
                violations += 1
        print(f"tightest empirical K: {max(needed):.3g}")
        assert violations == 0


class TestNormalizedInner:
    def test_constant_paths(self):
        assert normalized_inner([1, 0, 0], [1, 0, 0], [1, 0, 0]) == 1.0

    def test_plateau_is_plain_sum(self):
        assert normalized_inner([1, 0.5, 0.25], [1, 1, 1], [1, 0.5, 0.5]) == pytest.approx(1.75)

    def test_self_consistency(self):
        assert normalized_inner([1, 8], [1, 8], [1, 8]) == pytest.approx(56 / 9, rel=1e-12)

    def test_matches_explicit_normalization(self, rng):
        for _ in range(200):
            a = random_group_element(rng, 2, 4, scale=rng.uniform(0.1, 10))
            b = random_group_element(rng, 2, 4, scale=rng.uniform(0.1, 10))
            fast = normalized_inner(inner_product_levels(a, b), level_norms_sq(a), level_norms_sq(b))
            slow = inner_product_levels(normalize_tensor(a), normalize_tensor(b)).sum()
            assert fast == pytest.approx(slow, rel=1e-10, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            normalized_inner([1, 0], [1, 0, 0], [1, 0])
