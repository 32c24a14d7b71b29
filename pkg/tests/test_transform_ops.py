"""Transform-learning objective and block updates."""

import numpy as np
import pytest

from tkmeans import (
    NumericalBreakdownError,
    TlHyperparams,
    TransformSingularError,
    tl_objective,
    transform_logabsdet,
    update_coefficients_soft_threshold,
    update_transform,
)

GOLDEN_ALPHA = (1.0 + np.sqrt(5.0)) / 4.0  # identity-case scale factor


def tl_objective_direct(T, X, Z, lam, mu):
    """Independent evaluation of the same formula."""
    det = np.linalg.det(T)
    return (
        np.linalg.norm(T @ X - Z, "fro") ** 2
        + lam * (np.linalg.norm(T, "fro") ** 2 - np.log(abs(det)))
        + mu * np.abs(Z).sum()
    )


def transform_gradient(T, X, Z, lam):
    """Analytic gradient of ||TX-Z||^2 + lam(||T||^2 - log|det T|)."""
    return 2.0 * (T @ X - Z) @ X.T + 2.0 * lam * T - lam * np.linalg.inv(T).T


class TestTlObjective:
    def test_identity_case(self):
        I2 = np.eye(2)
        assert tl_objective(I2, I2, I2, lam=1.0, mu=0.0) == pytest.approx(2.0)

    def test_zero_coefficients(self):
        I2 = np.eye(2)
        assert tl_objective(I2, I2, np.zeros((2, 2)), lam=1.0, mu=1.0) == pytest.approx(4.0)

    def test_matches_direct_formula(self, rng):
        for _ in range(20):
            T = rng.standard_normal((3, 3)) + 2.0 * np.eye(3)
            X = rng.standard_normal((3, 7))
            Z = rng.standard_normal((3, 7))
            lam, mu = rng.uniform(0.1, 3.0, size=2)
            got = tl_objective(T, X, Z, lam, mu)
            want = tl_objective_direct(T, X, Z, lam, mu)
            assert got == pytest.approx(want, rel=1e-12)

    def test_singular_transform_rejected(self):
        T = np.array([[1.0, 2.0], [2.0, 4.0]])
        with pytest.raises(TransformSingularError):
            tl_objective(T, np.eye(2), np.eye(2), lam=1.0, mu=1.0)

    def test_negative_determinant_allowed(self):
        T = np.diag([1.0, -1.0])
        sign, logabs = transform_logabsdet(T)
        assert sign == -1.0 and logabs == pytest.approx(0.0)
        assert tl_objective(T, np.eye(2), np.eye(2), 1.0, 0.0) == pytest.approx(
            tl_objective(np.eye(2), np.eye(2), np.abs(T) @ np.eye(2), 1.0, 0.0)
            + 4.0  # the flipped row doubles one residual column: (−1−1)² vs 0
        )

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            tl_objective(np.eye(2), np.ones((3, 4)), np.ones((3, 4)), 1.0, 1.0)
        with pytest.raises(ValueError):
            tl_objective(np.eye(3), np.ones((3, 4)), np.ones((3, 5)), 1.0, 1.0)

    def test_bad_weights_rejected(self):
        I2 = np.eye(2)
        with pytest.raises(ValueError):
            tl_objective(I2, I2, I2, lam=0.0, mu=1.0)
        with pytest.raises(ValueError):
            tl_objective(I2, I2, I2, lam=1.0, mu=-0.5)


class TestHyperparams:
    def test_positive_required(self):
        TlHyperparams(lam=0.5, mu=2.0)
        with pytest.raises(ValueError):
            TlHyperparams(lam=0.0, mu=1.0)
        with pytest.raises(ValueError):
            TlHyperparams(lam=1.0, mu=0.0)


class TestSoftThreshold:
    def test_scalar_entries(self):
        one = np.eye(1)
        assert update_coefficients_soft_threshold(one, [[0.7]], 0.5)[0, 0] == pytest.approx(0.2)
        assert update_coefficients_soft_threshold(one, [[-0.3]], 0.5)[0, 0] == 0.0
        assert update_coefficients_soft_threshold(one, [[-1.0]], 0.25)[0, 0] == pytest.approx(-0.75)

    def test_contraction_and_exact_zeros(self, rng):
        for _ in range(20):
            d, n = rng.integers(1, 6, size=2)
            T = rng.standard_normal((d, d))
            X = rng.standard_normal((d, n))
            mu = rng.uniform(0.0, 2.0)
            P = T @ X
            Z = update_coefficients_soft_threshold(T, X, mu)
            assert np.abs(Z).max() <= np.abs(P).max() + 1e-15
            assert np.all(Z[np.abs(P) <= mu] == 0.0)
            np.testing.assert_array_equal(np.sign(Z[Z != 0.0]), np.sign(P[np.abs(P) > mu]))

    def test_zero_threshold_is_identity(self, rng):
        T = rng.standard_normal((4, 4))
        X = rng.standard_normal((4, 9))
        np.testing.assert_array_equal(
            update_coefficients_soft_threshold(T, X, 0.0), T @ X
        )


class TestUpdateTransform:
    def test_identity_case_golden(self):
        for d in (1, 2, 5):
            T = update_transform(np.eye(d), np.eye(d), lam=1.0)
            np.testing.assert_allclose(T, GOLDEN_ALPHA * np.eye(d), atol=1e-10)

    def test_identity_case_alpha_is_scalar_minimum(self):
        # per-diagonal objective (a-1)^2 + a^2 - log a has a unique minimum
        grid = np.linspace(0.05, 2.0, 4001)
        vals = (grid - 1.0) ** 2 + grid**2 - np.log(grid)
        best = grid[np.argmin(vals)]
        assert abs(best - GOLDEN_ALPHA) < 1e-3

    def test_gradient_stationarity(self, rng):
        for _ in range(50):
            d = int(rng.integers(1, 9))
            n = int(rng.integers(1, 15))
            X = rng.standard_normal((d, n)) * rng.uniform(0.5, 3.0)
            Z = rng.standard_normal((d, n))
            lam = rng.uniform(0.1, 5.0)
            T = update_transform(X, Z, lam)
            g = transform_gradient(T, X, Z, lam)
            scale = 1.0 + np.linalg.norm(Z, "fro") * np.linalg.norm(X, "fro")
            assert np.linalg.norm(g, "fro") < 1e-6 * scale

    def test_local_optimality_under_perturbation(self, rng):
        X = rng.standard_normal((4, 10))
        Z = rng.standard_normal((4, 10))
        lam = 0.5
        T = update_transform(X, Z, lam)
        base = tl_objective(T, X, Z, lam, 0.0)
        for _ in range(1000):
            G = rng.standard_normal((4, 4))
            G *= 1e-3 / np.linalg.norm(G, "fro")
            assert tl_objective(T + G, X, Z, lam, 0.0) >= base - 1e-12

    def test_result_nonsingular(self, rng):
        for _ in range(10):
            X = rng.standard_normal((5, 3))  # n < d allowed
            Z = rng.standard_normal((5, 3))
            lam = 0.3
            T = update_transform(X, Z, lam=lam)
            sign, _ = transform_logabsdet(T)
            assert sign != 0.0
            # sigma_min(T) >= sqrt(lam/2) / sigma_max(L), L L^T = XX^T + lam I
            floor = np.sqrt(lam / 2.0) / np.sqrt(
                np.linalg.eigvalsh(X @ X.T + lam * np.eye(5)).max()
            )
            assert np.linalg.svd(T, compute_uv=False).min() >= floor - 1e-12

    def test_column_permutation_invariance(self, rng):
        X = rng.standard_normal((4, 12))
        Z = rng.standard_normal((4, 12))
        perm = rng.permutation(12)
        T1 = update_transform(X, Z, lam=1.0)
        T2 = update_transform(X[:, perm], Z[:, perm], lam=1.0)
        np.testing.assert_allclose(T1, T2, atol=1e-10)

    def test_fixed_point_inequality(self, rng):
        X = rng.standard_normal((3, 8))
        Z = rng.standard_normal((3, 8))
        T1 = update_transform(X, Z, lam=1.0)
        Z2 = T1 @ X
        T2 = update_transform(X, Z2, lam=1.0)
        assert tl_objective(T2, X, Z2, 1.0, 0.0) <= tl_objective(T1, X, Z2, 1.0, 0.0) + 1e-10

    def test_alternating_updates_descend(self, rng):
        # threshold-mu soft thresholding minimizes fit + 2*mu*l1, so the
        # monotone quantity is tl_objective with the l1 weight doubled
        X = rng.standard_normal((4, 15))
        Z = rng.standard_normal((4, 15))
        lam, mu = 1.0, 0.3
        T = update_transform(X, Z, lam)
        obj = tl_objective(T, X, Z, lam, 2.0 * mu)
        for _ in range(5):
            Z = update_coefficients_soft_threshold(T, X, mu)
            after_z = tl_objective(T, X, Z, lam, 2.0 * mu)
            assert after_z <= obj + 1e-10
            T = update_transform(X, Z, lam)
            obj = tl_objective(T, X, Z, lam, 2.0 * mu)
            assert obj <= after_z + 1e-10

    def test_mismatched_shapes_rejected(self, rng):
        with pytest.raises(ValueError):
            update_transform(np.ones((3, 4)), np.ones((3, 5)), lam=1.0)
        with pytest.raises(ValueError):
            update_transform(np.ones((3, 4)), np.ones((2, 4)), lam=1.0)
        with pytest.raises(ValueError):
            update_transform(np.ones((3, 4)), np.ones((3, 4)), lam=0.0)

    def test_nonfinite_input_rejected(self):
        X = np.ones((2, 3))
        X[0, 0] = np.nan
        with pytest.raises(NumericalBreakdownError):
            update_transform(X, np.ones((2, 3)), lam=1.0)
