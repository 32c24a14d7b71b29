"""Indicator-matrix K-means.

An assignment is a binary k x n matrix H with exactly one 1 per column
(sample j belongs to cluster i iff H[i, j] == 1) and no empty rows.  The
within-cluster scatter can be written either as the classic sum

    sum_i sum_j H[i, j] * ||z_j - mu_i||^2

or in factored form ||Z - Z H^T (HH^T)^{-1} H||_F^2; the two agree on every
valid assignment.  HH^T is diagonal (cluster sizes), so neither the factored
loss nor the projector ever needs a general matrix inverse.

``update_assignments`` is Lloyd's algorithm with random-column seeding,
deterministic lowest-index tie-breaking and farthest-point repair of empty
clusters.
"""

import numpy as np

from . import kernels
from .exceptions import (
    EmptyClusterError,
    NumericalBreakdownError,
    TooManyClustersError,
)

_MAX_LLOYD_ITERS = 300
_CENTROID_TOL = 1e-9


def labels_to_assignment(labels, k=None):
    """Binary (k, n) indicator matrix from a label vector."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1:
        raise ValueError("labels must be a 1-D vector")
    if labels.size and labels.min() < 0:
        raise ValueError("labels must be nonnegative")
    if k is None:
        k = int(labels.max()) + 1 if labels.size else 0
    H = np.zeros((k, labels.size))
    H[labels, np.arange(labels.size)] = 1.0
    return H


def assignment_to_labels(H):
    """Label vector (column argmax) of a validated assignment matrix."""
    H = validate_assignment(H)
    return np.argmax(H, axis=0).astype(np.int64)


def validate_assignment(H, require_nonempty=True):
    """Check the one-1-per-column (and optionally no-empty-row) invariants."""
    H = np.asarray(H, dtype=np.float64)
    if H.ndim != 2:
        raise ValueError("assignment matrix must be 2-D")
    if not np.all((H == 0.0) | (H == 1.0)):
        raise ValueError("assignment matrix entries must be 0 or 1")
    if not np.all(H.sum(axis=0) == 1.0):
        raise ValueError("each sample column must contain exactly one 1")
    if require_nonempty and np.any(H.sum(axis=1) == 0.0):
        raise EmptyClusterError("assignment matrix has an empty cluster row")
    return H


def _labels_and_counts(Z, H):
    Z = np.asarray(Z, dtype=np.float64)
    H = validate_assignment(H)
    if Z.ndim != 2 or Z.shape[1] != H.shape[1]:
        raise ValueError(
            f"Z ({Z.shape}) and H ({H.shape}) must have the same column count"
        )
    labels = np.argmax(H, axis=0).astype(np.int64)
    counts = np.bincount(labels, minlength=H.shape[0])
    return Z, labels, counts, H.shape[0]


def centroids_from(Z, H):
    """Cluster means: column i is the mean of the Z-columns in cluster i."""
    Z, labels, counts, k = _labels_and_counts(Z, H)
    zt = np.ascontiguousarray(Z.T)
    sums, counts = kernels.centroid_sums(zt, labels, k)
    return (sums / counts[:, None]).T


def kmeans_loss_sum(Z, H):
    """Within-cluster scatter in the per-sample sum form."""
    Z, labels, counts, k = _labels_and_counts(Z, H)
    C = centroids_from(Z, H)
    diff = Z - C[:, labels]
    return float(np.sum(diff * diff))


def kmeans_loss_factored(Z, H):
    """Within-cluster scatter in the factored form ||Z(I - H^T(HH^T)^{-1}H)||_F^2.

    Multiplying by H^T(HH^T)^{-1}H replaces each column by its cluster mean,
    so the loss is computed without forming any n x n matrix.
    """
    Z, labels, counts, k = _labels_and_counts(Z, H)
    means = kernels.group_mean_columns(np.ascontiguousarray(Z), labels, k)
    diff = Z - means
    return float(np.sum(diff * diff))


def build_projector(H):
    """Dense projector K = I - H^T (HH^T)^{-1} H onto within-cluster deviations.

    Symmetric, idempotent, and annihilates H^T.  HH^T is diagonal with the
    cluster sizes, so its inverse is taken entrywise.
    """
    H = validate_assignment(H)
    labels = np.argmax(H, axis=0)
    counts = np.bincount(labels, minlength=H.shape[0]).astype(np.float64)
    n = H.shape[1]
    same = labels[:, None] == labels[None, :]
    K = np.eye(n) - same / counts[labels][:, None]
    return K


def _repair_empty(zt, labels, mindist, k):
    """Reseed each empty cluster with the worst-fit sample of a donor cluster.

    The chosen sample is the one farthest from its own centroid among
    clusters that can spare a member.  Mutates labels/mindist in place.
    """
    counts = np.bincount(labels, minlength=k)
    for c in np.flatnonzero(counts == 0):
        donors = counts[labels] > 1
        if not donors.any():
            raise EmptyClusterError("cannot repair empty cluster: no donor samples")
        j = int(np.flatnonzero(donors)[np.argmax(mindist[donors])])
        counts[labels[j]] -= 1
        labels[j] = c
        counts[c] = 1
        mindist[j] = 0.0
    return counts


def _lloyd(zt, ct, max_iter, tol):
    """Lloyd iterations from explicit starting centroids.

    Returns (labels, centroids, iterations, per-iteration losses).  The
    returned centroids are recomputed from the final labels, so they satisfy
    the cluster-mean invariant.
    """
    n, d = zt.shape
    k = ct.shape[0]
    losses = []
    labels_prev = None
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        labels, mindist = kernels.assign_labels(zt, ct)
        _repair_empty(zt, labels, mindist, k)
        losses.append(float(mindist.sum()))
        sums, counts = kernels.centroid_sums(zt, labels, k)
        new_ct = sums / counts[:, None]
        moved = float(np.max(np.linalg.norm(new_ct - ct, axis=1)))
        ct = new_ct
        if labels_prev is not None and np.array_equal(labels, labels_prev):
            break
        if moved < tol:
            break
        labels_prev = labels
    return labels, ct, iterations, losses


def update_assignments(
    Z,
    k,
    init=0,
    restarts=1,
    max_iter=_MAX_LLOYD_ITERS,
    tol=_CENTROID_TOL,
):
    """K-means on the columns of Z.

    ``init`` is either an integer seed (centroids drawn uniformly from the
    columns of Z, ``restarts`` independent draws, best final loss wins) or an
    explicit (d, k) centroid matrix to warm-start from (``restarts`` must
    stay 1).  Stops when assignments stop changing, the largest centroid
    movement drops below ``tol``, or after ``max_iter`` sweeps.

    Returns (H, centroids, iterations).
    """
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2:
        raise ValueError("Z must be a 2-D matrix")
    d, n = Z.shape
    if not np.all(np.isfinite(Z)):
        raise NumericalBreakdownError("non-finite coefficients in k-means")
    if k < 1:
        raise ValueError(f"cluster count must be at least 1, got {k}")
    if k > n:
        raise TooManyClustersError(f"requested {k} clusters for {n} samples")

    zt = np.ascontiguousarray(Z.T)
    if isinstance(init, (int, np.integer)):
        if restarts < 1:
            raise ValueError("restarts must be at least 1")
        rng = np.random.default_rng(int(init))
        best = None
        for _ in range(restarts):
            idx = rng.choice(n, size=k, replace=False)
            result = _lloyd(zt, zt[idx], max_iter, tol)
            if best is None or result[3][-1] < best[3][-1]:
                best = result
        labels, ct, iterations, _ = best
    else:
        ct = np.asarray(init, dtype=np.float64)
        if ct.shape != (d, k):
            raise ValueError(
                f"explicit centroids must have shape {(d, k)}, got {ct.shape}"
            )
        if restarts != 1:
            raise ValueError("restarts must be 1 with explicit centroids")
        labels, ct, iterations, _ = _lloyd(
            zt, np.ascontiguousarray(ct.T), max_iter, tol
        )

    H = labels_to_assignment(labels, k)
    return H, ct.T.copy(), iterations
