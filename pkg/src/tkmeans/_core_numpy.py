"""Pure-numpy implementations of the hot kernels.

Fallback backend for :mod:`tkmeans.kernels`; mirrors the signatures of the
compiled extension ``tkmeans._core`` exactly.  Sample matrices are passed in
row-per-sample layout (n, d) so both backends share the cache-friendly
orientation.
"""

import numpy as np


def assign_labels(zt, ct):
    """Nearest-centroid assignment for every sample row.

    Parameters
    ----------
    zt : (n, d) float64 array, one sample per row.
    ct : (k, d) float64 array, one centroid per row.

    Returns
    -------
    labels : (n,) int64 array; ties go to the lowest centroid index.
    mindist : (n,) float64 array of squared distances to the chosen centroid.
    """
    # ||z - c||^2 = ||z||^2 + ||c||^2 - 2 z.c, computed as one GEMM
    d2 = (
        np.einsum("ij,ij->i", zt, zt)[:, None]
        + np.einsum("ij,ij->i", ct, ct)[None, :]
        - 2.0 * (zt @ ct.T)
    )
    labels = np.argmin(d2, axis=1)
    mindist = np.maximum(d2[np.arange(zt.shape[0]), labels], 0.0)
    return labels.astype(np.int64), mindist


def centroid_sums(zt, labels, k):
    """Per-cluster column sums and member counts.

    Returns ``(sums, counts)`` with shapes (k, d) and (k,).
    """
    sums = np.zeros((k, zt.shape[1]))
    np.add.at(sums, labels, zt)
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    return sums, counts


def group_mean_columns(m, labels, k):
    """Replace each column of ``m`` by the mean of its group's columns.

    Parameters
    ----------
    m : (d, n) float64 array.
    labels : (n,) int64 array of group indices in [0, k).
    k : number of groups; every group must be non-empty.
    """
    counts = np.bincount(labels, minlength=k)
    empty = np.nonzero(counts == 0)[0]
    if empty.size:
        raise ValueError("group %d is empty" % empty[0])
    sums = np.zeros((m.shape[0], k))
    np.add.at(sums.T, labels, m.T)
    return sums[:, labels] / counts[labels]
