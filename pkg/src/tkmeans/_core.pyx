# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: nearest-centroid assignment, centroid accumulation,
and group-mean column projection.

Same contracts as the numpy fallback in ``tkmeans._core_numpy``; fused loops
avoid the (n, k) distance temporaries of the numpy path.
"""

from libc.stdint cimport int64_t

import numpy as np

cimport numpy as cnp

cnp.import_array()


def assign_labels(double[:, ::1] zt, double[:, ::1] ct):
    """Nearest-centroid assignment; ties go to the lowest centroid index.

    Returns (labels (n,) int64, mindist (n,) float64).
    """
    cdef Py_ssize_t n = zt.shape[0]
    cdef Py_ssize_t d = zt.shape[1]
    cdef Py_ssize_t k = ct.shape[0]
    if ct.shape[1] != d:
        raise ValueError("centroid dimensionality mismatch")

    labels_arr = np.empty(n, dtype=np.int64)
    mindist_arr = np.empty(n, dtype=np.float64)
    cdef int64_t[::1] labels = labels_arr
    cdef double[::1] mindist = mindist_arr

    cdef Py_ssize_t j, c, i, best
    cdef double dist, diff, bestdist
    for j in range(n):
        best = 0
        bestdist = 0.0
        for c in range(k):
            dist = 0.0
            for i in range(d):
                diff = zt[j, i] - ct[c, i]
                dist += diff * diff
            if c == 0 or dist < bestdist:
                bestdist = dist
                best = c
        labels[j] = best
        mindist[j] = bestdist
    return labels_arr, mindist_arr


def centroid_sums(double[:, ::1] zt, int64_t[::1] labels, Py_ssize_t k):
    """Per-cluster column sums and member counts: ((k, d), (k,))."""
    cdef Py_ssize_t n = zt.shape[0]
    cdef Py_ssize_t d = zt.shape[1]
    sums_arr = np.zeros((k, d), dtype=np.float64)
    counts_arr = np.zeros(k, dtype=np.int64)
    cdef double[:, ::1] sums = sums_arr
    cdef int64_t[::1] counts = counts_arr

    cdef Py_ssize_t j, i, c
    for j in range(n):
        c = labels[j]
        counts[c] += 1
        for i in range(d):
            sums[c, i] += zt[j, i]
    return sums_arr, counts_arr


def group_mean_columns(double[:, ::1] m, int64_t[::1] labels, Py_ssize_t k):
    """Replace each column of the (d, n) matrix by its group's column mean."""
    cdef Py_ssize_t d = m.shape[0]
    cdef Py_ssize_t n = m.shape[1]
    if labels.shape[0] != n:
        raise ValueError("label count mismatch")

    counts_arr = np.zeros(k, dtype=np.int64)
    cdef int64_t[::1] counts = counts_arr
    cdef Py_ssize_t j, i, c
    for j in range(n):
        counts[labels[j]] += 1
    for c in range(k):
        if counts[c] == 0:
            raise ValueError("group %d is empty" % c)

    out_arr = np.empty((d, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    sums_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] sums = sums_arr
    for i in range(d):
        for c in range(k):
            sums[c] = 0.0
        for j in range(n):
            sums[labels[j]] += m[i, j]
        for c in range(k):
            sums[c] /= counts[c]
        for j in range(n):
            out[i, j] = sums[labels[j]]
    return out_arr
