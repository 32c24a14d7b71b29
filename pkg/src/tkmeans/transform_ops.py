"""Transform learning: objective and the two classical block updates.

The model learns a square analysis operator T mapping data X (d features x
n samples, one sample per column) to coefficients Z via TX ~ Z.  The
objective is

    ||TX - Z||_F^2 + lam * (||T||_F^2 - log|det T|) + mu * ||Z||_1

where the log-determinant term keeps T full rank and the Frobenius penalty
balances its scale.  ``update_coefficients_soft_threshold`` solves the Z
block exactly; ``update_transform`` solves the T block in closed form via a
Cholesky factorization and an SVD.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import NumericalBreakdownError, TransformSingularError


@dataclass(frozen=True)
class TlHyperparams:
    """Weights of the transform-learning objective; both must be positive."""

    lam: float
    mu: float

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")


def _as_matrix(a, name):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D matrix, got shape {a.shape}")
    return a


def _check_pair(T, X, Z):
    T = _as_matrix(T, "T")
    X = _as_matrix(X, "X")
    Z = _as_matrix(Z, "Z")
    d, n = X.shape
    if T.shape != (d, d):
        raise ValueError(f"T must be square {d}x{d} to match X, got {T.shape}")
    if Z.shape != (d, n):
        raise ValueError(f"Z must have shape {(d, n)} to match X, got {Z.shape}")
    return T, X, Z


def transform_logabsdet(T):
    """(sign, log|det T|) of a square transform.

    Raises :class:`TransformSingularError` when T is exactly singular.  A
    negative sign is legal: the objective only sees |det T|, and a transform
    with det < 0 scores the same as its row-flipped counterpart.
    """
    T = _as_matrix(T, "T")
    if T.shape[0] != T.shape[1]:
        raise ValueError(f"T must be square, got {T.shape}")
    sign, logabs = np.linalg.slogdet(T)
    if sign == 0 or not np.isfinite(logabs):
        raise TransformSingularError("transform is singular; log|det T| undefined")
    return float(sign), float(logabs)


def tl_objective(T, X, Z, lam, mu):
    """Transform-learning objective value.

    ``lam`` must be positive; ``mu`` may be zero (no sparsity penalty).
    """
    T, X, Z = _check_pair(T, X, Z)
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    if mu < 0:
        raise ValueError(f"mu must be nonnegative, got {mu}")
    _, logabs = transform_logabsdet(T)
    resid = T @ X - Z
    fit = float(np.sum(resid * resid))
    reg = float(np.sum(T * T)) - logabs
    return fit + lam * reg + mu * float(np.sum(np.abs(Z)))


def update_coefficients_soft_threshold(T, X, mu):
    """Elementwise soft threshold of TX with threshold mu.

    Entries with |(TX)_ij| <= mu become exactly zero, all others shrink
    toward zero by mu.  This is the exact minimizer over Z of

        0.5 ||TX - Z||_F^2 + mu ||Z||_1

    (equivalently ||TX - Z||_F^2 + 2 mu ||Z||_1): alternating it with
    ``update_transform`` monotonically decreases the objective with the
    l1 weight read as 2 mu.
    """
    T = _as_matrix(T, "T")
    X = _as_matrix(X, "X")
    if T.shape[1] != X.shape[0]:
        raise ValueError(f"T ({T.shape}) and X ({X.shape}) are not conformable")
    if mu < 0:
        raise ValueError(f"mu must be nonnegative, got {mu}")
    P = T @ X
    return np.sign(P) * np.maximum(np.abs(P) - mu, 0.0)


def update_transform(X, Z, lam):
    """Closed-form minimizer of ||TX - Z||_F^2 + lam (||T||_F^2 - log|det T|).

    Factor XX^T + lam*I = L L^T (lower Cholesky; positive definite for any
    finite X since lam > 0), take the full SVD L^{-1} X Z^T = U S V^T, and
    assemble

        T = 0.5 * V (S + (S^2 + 2*lam*I)^{1/2}) U^T L^{-1}.

    Note the swap: the right singular factor lands on the left.  This is the
    unique arrangement satisfying the stationarity condition
    2(TX - Z)X^T + 2*lam*T - lam*T^{-T} = 0.  L^{-1} is applied by
    triangular solves, never formed.  The result is always nonsingular:
    the middle factor's singular values are at least sqrt(lam/2), so
    sigma_min(T) >= sqrt(lam/2) / sigma_max(L) > 0.
    """
    X = _as_matrix(X, "X")
    Z = _as_matrix(Z, "Z")
    if Z.shape[1] != X.shape[1]:
        raise ValueError(
            f"X ({X.shape}) and Z ({Z.shape}) must have the same column count"
        )
    if Z.shape[0] != X.shape[0]:
        raise ValueError(
            f"X ({X.shape}) and Z ({Z.shape}) must have the same row count"
        )
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Z))):
        raise NumericalBreakdownError("non-finite input in transform update")

    d = X.shape[0]
    G = X @ X.T
    G[np.diag_indices(d)] += lam
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdownError(f"Cholesky factorization failed: {exc}") from exc

    M = solve_triangular(L, X @ Z.T, lower=True)
    U, s, Vt = np.linalg.svd(M)
    gains = 0.5 * (s + np.sqrt(s * s + 2.0 * lam))
    B = (Vt.T * gains) @ U.T
    # T = B L^{-1}  <=>  T^T = L^{-T} B^T
    return solve_triangular(L, B.T, trans="T", lower=True).T
