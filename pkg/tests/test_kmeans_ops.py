"""Indicator-matrix K-means: losses, projector, Lloyd loop."""

import itertools

import numpy as np
import pytest

from tkmeans import (
    EmptyClusterError,
    NumericalBreakdownError,
    TooManyClustersError,
    assignment_to_labels,
    build_projector,
    centroids_from,
    kmeans_loss_factored,
    kmeans_loss_sum,
    labels_to_assignment,
    update_assignments,
    validate_assignment,
)
from conftest import random_assignment


class TestAssignmentMatrix:
    def test_labels_round_trip(self, rng):
        labels = rng.integers(0, 4, size=20)
        labels[:4] = np.arange(4)  # every cluster used
        H = labels_to_assignment(labels, 4)
        assert H.shape == (4, 20)
        np.testing.assert_array_equal(assignment_to_labels(H), labels)

    def test_validate_rejects_bad_entries(self):
        H = np.array([[0.5, 0.5], [0.5, 0.5]])
        with pytest.raises(ValueError):
            validate_assignment(H)

    def test_validate_rejects_multiple_ones_per_column(self):
        H = np.array([[1.0, 1.0], [1.0, 0.0]])
        with pytest.raises(ValueError):
            validate_assignment(H)

    def test_validate_rejects_empty_row(self):
        H = np.array([[1.0, 1.0], [0.0, 0.0]])
        with pytest.raises(EmptyClusterError):
            validate_assignment(H)
        validate_assignment(H, require_nonempty=False)


class TestCentroids:
    def test_singleton_clusters(self):
        C = centroids_from(np.array([[1.0, 3.0]]), np.eye(2))
        np.testing.assert_array_equal(C, [[1.0, 3.0]])

    def test_single_cluster_mean(self):
        C = centroids_from(np.array([[1.0, 3.0]]), np.array([[1.0, 1.0]]))
        np.testing.assert_array_equal(C, [[2.0]])

    def test_matches_per_cluster_loop(self, rng):
        Z = rng.standard_normal((3, 12))
        H = random_assignment(rng, 3, 12)
        labels = assignment_to_labels(H)
        C = centroids_from(Z, H)
        for i in range(3):
            np.testing.assert_allclose(C[:, i], Z[:, labels == i].mean(axis=1))


class TestLosses:
    def test_every_sample_its_own_cluster(self, rng):
        Z = rng.standard_normal((3, 5))
        H = np.eye(5)
        assert kmeans_loss_sum(Z, H) == 0.0
        assert kmeans_loss_factored(Z, H) == pytest.approx(0.0, abs=1e-12)

    def test_single_cluster_hand_value(self):
        Z = np.array([[0.0, 2.0]])
        H = np.array([[1.0, 1.0]])
        assert kmeans_loss_sum(Z, H) == pytest.approx(2.0)
        assert kmeans_loss_factored(Z, H) == pytest.approx(2.0)

    def test_sum_equals_factored(self, rng):
        for _ in range(50):
            d = int(rng.integers(1, 7))
            k = int(rng.integers(1, 6))
            n = int(rng.integers(k, 31))
            Z = rng.standard_normal((d, n)) * rng.uniform(0.5, 10.0)
            H = random_assignment(rng, k, n)
            s = kmeans_loss_sum(Z, H)
            f = kmeans_loss_factored(Z, H)
            assert abs(s - f) <= 1e-8 * (1.0 + s)

    def test_relabeling_invariance(self, rng):
        Z = rng.standard_normal((4, 10))
        H = random_assignment(rng, 3, 10)
        perm = rng.permutation(3)
        assert kmeans_loss_sum(Z, H[perm]) == pytest.approx(kmeans_loss_sum(Z, H), rel=1e-12)
        assert kmeans_loss_factored(Z, H[perm]) == pytest.approx(
            kmeans_loss_factored(Z, H), rel=1e-12
        )

    def test_shift_invariance(self, rng):
        Z = rng.standard_normal((4, 10))
        H = random_assignment(rng, 3, 10)
        shifted = Z + rng.standard_normal((4, 1))
        assert kmeans_loss_sum(shifted, H) == pytest.approx(kmeans_loss_sum(Z, H), rel=1e-9)
        assert kmeans_loss_factored(shifted, H) == pytest.approx(
            kmeans_loss_factored(Z, H), rel=1e-9
        )

    def test_empty_cluster_rejected(self):
        Z = np.ones((2, 3))
        H = np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 0.0]])
        with pytest.raises(EmptyClusterError):
            kmeans_loss_sum(Z, H)
        with pytest.raises(EmptyClusterError):
            kmeans_loss_factored(Z, H)


class TestProjector:
    def test_identity_assignment_gives_zero(self):
        np.testing.assert_array_equal(build_projector(np.eye(2)), np.zeros((2, 2)))

    def test_single_cluster_centering_matrix(self):
        K = build_projector(np.array([[1.0, 1.0]]))
        np.testing.assert_allclose(K, [[0.5, -0.5], [-0.5, 0.5]])

    def test_invariants(self, rng):
        for _ in range(20):
            k = int(rng.integers(1, 5))
            n = int(rng.integers(k, 21))
            H = random_assignment(rng, k, n)
            K = build_projector(H)
            np.testing.assert_allclose(K @ K, K, atol=1e-10)
            np.testing.assert_allclose(K, K.T, atol=1e-12)
            np.testing.assert_allclose(K @ H.T, 0.0, atol=1e-10)

    def test_factored_loss_matches_projector(self, rng):
        Z = rng.standard_normal((3, 15))
        H = random_assignment(rng, 4, 15)
        K = build_projector(H)
        assert kmeans_loss_factored(Z, H) == pytest.approx(
            np.linalg.norm(Z @ K, "fro") ** 2, rel=1e-10
        )


def brute_force_best_loss(Z, k):
    """Exact K-means optimum by enumerating all assignments."""
    n = Z.shape[1]
    best = np.inf
    for labels in itertools.product(range(k), repeat=n):
        labels = np.array(labels)
        if len(np.unique(labels)) < k:
            continue
        H = labels_to_assignment(labels, k)
        best = min(best, kmeans_loss_sum(Z, H))
    return best


class TestUpdateAssignments:
    def test_separated_pairs(self):
        Z = np.array([[0.0, 0.0, 10.0, 10.0], [0.0, 0.1, 10.0, 10.1]])
        H, C, _ = update_assignments(Z, 2, init=0)
        labels = assignment_to_labels(H)
        assert labels[0] == labels[1] and labels[2] == labels[3]
        assert labels[0] != labels[2]
        assert C.shape == (2, 2)

    def test_k_equals_n(self, rng):
        Z = rng.standard_normal((3, 6))
        H, _, _ = update_assignments(Z, 6, init=1)
        assert kmeans_loss_sum(Z, H) == pytest.approx(0.0, abs=1e-20)

    def test_too_many_clusters(self, rng):
        with pytest.raises(TooManyClustersError):
            update_assignments(rng.standard_normal((2, 3)), 4, init=0)

    def test_nonfinite_rejected(self):
        Z = np.ones((2, 5))
        Z[1, 3] = np.inf
        with pytest.raises(NumericalBreakdownError):
            update_assignments(Z, 2, init=0)

    def test_deterministic_for_seed(self, rng):
        Z = rng.standard_normal((4, 30))
        H1, C1, i1 = update_assignments(Z, 3, init=7, restarts=5)
        H2, C2, i2 = update_assignments(Z, 3, init=7, restarts=5)
        np.testing.assert_array_equal(H1, H2)
        np.testing.assert_array_equal(C1, C2)
        assert i1 == i2

    def test_tie_breaks_to_lowest_index(self):
        # the middle point is exactly equidistant from both centroids
        Z = np.array([[0.0, 2.0, 1.0]])
        init = np.array([[0.0, 2.0]])
        H, _, _ = update_assignments(Z, 2, init=init, max_iter=1)
        np.testing.assert_array_equal(assignment_to_labels(H), [0, 1, 0])

    def test_empty_cluster_repair(self):
        # both starting centroids sit on top of the left point, so cluster 1
        # starts empty and must be reseeded with the farthest sample
        Z = np.array([[0.0, 0.1, 5.0]])
        init = np.array([[0.0, 0.0]])
        H, C, _ = update_assignments(Z, 2, init=init)
        validate_assignment(H)
        labels = assignment_to_labels(H)
        assert labels[0] == labels[1] and labels[2] != labels[0]

    def test_monotone_loss_across_steps(self, rng):
        Z = rng.standard_normal((3, 40))
        idx = rng.choice(40, size=4, replace=False)
        C = Z[:, idx]
        prev = np.inf
        for _ in range(10):
            H, C, _ = update_assignments(Z, 4, init=C, max_iter=1)
            loss = kmeans_loss_sum(Z, H)
            assert loss <= prev + 1e-10
            prev = loss

    def test_explicit_centroids_require_single_restart(self, rng):
        Z = rng.standard_normal((2, 8))
        with pytest.raises(ValueError):
            update_assignments(Z, 2, init=Z[:, :2], restarts=3)

    def test_best_of_restarts_matches_brute_force(self, rng):
        for _ in range(20):
            Z = rng.standard_normal((2, 8))
            H, _, _ = update_assignments(Z, 2, init=int(rng.integers(1 << 31)), restarts=50)
            got = kmeans_loss_sum(Z, H)
            want = brute_force_best_loss(Z, 2)
            assert got == pytest.approx(want, rel=1e-9)
