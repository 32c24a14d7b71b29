"""Clustering quality against ground-truth labels: purity and entropy.

Both metrics are computed from a contingency table whose entry (k, l)
counts the samples placed in cluster k that carry true class l.  Purity is
the fraction of samples belonging to their cluster's majority class (higher
is better, 1 for pure clusters).  Entropy is the size-weighted class
entropy of the clusters normalized by log2 of the class count, so it lives
in [0, 1] with 0 for pure clusters (lower is better).
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateClassCountError


@dataclass(frozen=True)
class ContingencyTable:
    """Cluster-by-class count matrix."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.size == 0:
            raise ValueError("contingency table must be a non-empty 2-D matrix")
        if np.any(counts < 0):
            raise ValueError("contingency counts must be nonnegative")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self):
        """Total number of samples."""
        return int(self.counts.sum())

    @property
    def cluster_sizes(self):
        """Row sums: samples per cluster."""
        return self.counts.sum(axis=1)

    @property
    def class_count(self):
        return self.counts.shape[1]


def contingency(pred_labels, true_labels):
    """Build the cluster-by-class count table from two label vectors."""
    pred = np.asarray(pred_labels, dtype=np.int64)
    true = np.asarray(true_labels, dtype=np.int64)
    if pred.ndim != 1 or true.ndim != 1:
        raise ValueError("label vectors must be 1-D")
    if pred.shape != true.shape:
        raise ValueError(
            f"label vectors differ in length: {pred.shape[0]} vs {true.shape[0]}"
        )
    if pred.size == 0:
        raise ValueError("label vectors must be non-empty")
    if pred.min() < 0 or true.min() < 0:
        raise ValueError("labels must be nonnegative")
    r = int(pred.max()) + 1
    q = int(true.max()) + 1
    counts = np.zeros((r, q), dtype=np.int64)
    np.add.at(counts, (pred, true), 1)
    return ContingencyTable(counts)


def purity(table):
    """Fraction of samples in their cluster's majority class, in (0, 1]."""
    n = table.n
    if n < 1:
        raise ValueError("contingency table is empty")
    return float(table.counts.max(axis=1).sum()) / n


def entropy(table):
    """Normalized cluster entropy in [0, 1]; 0 iff every cluster is pure.

        -(1 / (n log2 q)) * sum_k sum_l n_kl log2(n_kl / n_k)

    with 0 * log 0 taken as 0.  Requires q >= 2 classes.
    """
    q = table.class_count
    if q < 2:
        raise DegenerateClassCountError(
            f"entropy needs at least 2 classes, got {q}"
        )
    n = table.n
    if n < 1:
        raise ValueError("contingency table is empty")
    counts = table.counts.astype(np.float64)
    sizes = table.cluster_sizes.astype(np.float64)
    mask = counts > 0
    ratios = counts[mask] / np.broadcast_to(sizes[:, None], counts.shape)[mask]
    total = np.sum(counts[mask] * np.log2(ratios))
    # + 0.0 turns the -0.0 of a perfectly pure table into 0.0
    return float(-total / (n * np.log2(q)) + 0.0)
