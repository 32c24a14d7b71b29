"""Joint solver: transform learning with an embedded K-means loss.

Minimizes, over (T, Z, H),

    ||TX - Z||_F^2 + lam (||T||_F^2 - log|det T|) + mu ||Z - Z H^T(HH^T)^{-1} H||_F^2

by block-coordinate descent over the three variables: a closed-form
transform update, a closed-form coefficient update, and a K-means sweep for
the assignments.  Each T-step and Z-step is an exact block minimizer, so
neither can increase the objective; the full per-iteration trace may still
be non-monotonic because the H-step optimizes only the clustering term.

The Z block has a cheap exact solution.  With P = H^T(HH^T)^{-1}H (the
projector onto cluster-wise constant vectors) and K = I - P, stationarity
gives TX = Z(I + mu K), and since P is a projector

    (I + mu K)^{-1} = P + (1/(1+mu)) (I - P)
    Z = (1/(1+mu)) TX + (mu/(1+mu)) (TX) P

where (TX)P just replaces each column by its cluster mean: O(d n), no n x n
inverse.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import kmeans_ops, transform_ops
from .exceptions import NumericalBreakdownError, TooManyClustersError
from .kernels import group_mean_columns
from .transform_ops import transform_logabsdet, update_transform


@dataclass(frozen=True)
class JointHyperparams:
    """Knobs of the joint objective and its outer loop.

    lam, mu          positive weights of the transform regularizer and the
                     clustering term
    k                number of clusters (at least 2, at most n)
    max_outer_iters  hard cap on outer iterations
    outer_tol        stop when |obj_t - obj_{t-1}| / |obj_{t-1}| drops below
                     this (0 disables early stopping)
    seed             seeds the initial K-means run
    """

    lam: float
    mu: float
    k: int
    max_outer_iters: int = 50
    outer_tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be at least 1")
        if self.outer_tol < 0:
            raise ValueError("outer_tol must be nonnegative")


@dataclass
class TraceRecord:
    """One outer iteration: objective split and timing.

    ``objective == fit_term + mu * cluster_term`` where fit_term is the
    transform-learning part (residual plus regularizer) and cluster_term is
    the raw within-cluster scatter.  The step diagnostics are populated only
    when the solver runs with ``record_step_objectives=True``.
    """

    iteration: int
    objective: float
    fit_term: float
    cluster_term: float
    seconds: float
    objective_start: float = None
    objective_after_transform: float = None
    objective_after_coefficients: float = None
    cluster_term_before_assign: float = None


@dataclass
class SolveTrace:
    """Per-iteration convergence record of one solve."""

    records: list = field(default_factory=list)

    CSV_HEADER = ("iteration", "objective", "fit_term", "cluster_term", "seconds")

    def append(self, record):
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def objectives(self):
        return np.array([r.objective for r in self.records])

    def rows(self):
        """Rows matching CSV_HEADER, ready for csv.writer."""
        return [
            (r.iteration, r.objective, r.fit_term, r.cluster_term, r.seconds)
            for r in self.records
        ]


@dataclass
class SolveResult:
    """Final state of a joint solve.

    ``labels[j]`` is the row index of the 1 in column j of ``assignments``.
    """

    transform: np.ndarray
    coefficients: np.ndarray
    assignments: np.ndarray
    labels: np.ndarray
    trace: SolveTrace


def joint_objective(T, X, Z, H, lam, mu):
    """Value of the joint objective at (T, Z, H)."""
    T = np.asarray(T, dtype=np.float64)
    cluster = kmeans_ops.kmeans_loss_factored(Z, H)
    return _tl_part(T, X, Z, lam) + mu * cluster


def update_coefficients_joint(T, X, H, mu):
    """Exact minimizer of ||TX - Z||_F^2 + mu ||ZK||_F^2 over Z.

    Satisfies the stationarity condition TX = Z(I + mu K).  ``mu`` may be
    zero, in which case the result is exactly TX.
    """
    if mu < 0:
        raise ValueError(f"mu must be nonnegative, got {mu}")
    T = np.asarray(T, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    H = kmeans_ops.validate_assignment(H)
    P = np.ascontiguousarray(T @ X)
    if P.shape[1] != H.shape[1]:
        raise ValueError(
            f"TX ({P.shape}) and H ({H.shape}) must have the same column count"
        )
    labels = np.argmax(H, axis=0).astype(np.int64)
    means = group_mean_columns(P, labels, H.shape[0])
    return (P + mu * means) / (1.0 + mu)


def _tl_part(T, X, Z, lam):
    _, logabs = transform_logabsdet(T)
    resid = T @ X - Z
    return float(np.sum(resid * resid)) + lam * (float(np.sum(T * T)) - logabs)


def solve(
    X,
    params,
    init_transform=None,
    init_assignments=None,
    init_restarts=50,
    inner_max_iter=300,
    inner_tol=1e-9,
    record_step_objectives=False,
):
    """Run the alternating solver on a d x n data matrix.

    Initialization: T0 = identity, Z0 = T0 X, and H0 from a best-of-
    ``init_restarts`` K-means run on Z0 seeded by ``params.seed`` (random
    columns as starting centroids).  Each later outer iteration updates T,
    then Z, then re-clusters Z with the inner K-means warm-started from the
    current centroids.  ``init_transform`` / ``init_assignments`` override
    the defaults.

    Deterministic for fixed (X, params) and a fixed kernel backend.
    Raises :class:`NumericalBreakdownError` (with the partial trace
    attached) if the objective ever turns non-finite.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D matrix")
    d, n = X.shape
    if not np.all(np.isfinite(X)):
        raise NumericalBreakdownError("non-finite data matrix")
    if params.k > n:
        raise TooManyClustersError(
            f"requested {params.k} clusters for {n} samples"
        )

    lam, mu, k = params.lam, params.mu, params.k

    T = np.eye(d) if init_transform is None else np.asarray(init_transform, float)
    if T.shape != (d, d):
        raise ValueError(f"init transform must be {d}x{d}, got {T.shape}")
    Z = T @ X
    if init_assignments is None:
        H, _, _ = kmeans_ops.update_assignments(
            Z, k, init=params.seed, restarts=init_restarts,
            max_iter=inner_max_iter, tol=inner_tol,
        )
    else:
        H = kmeans_ops.validate_assignment(init_assignments)
        if H.shape != (k, n):
            raise ValueError(f"init assignments must be {k}x{n}, got {H.shape}")

    trace = SolveTrace()
    prev_obj = None
    for it in range(1, params.max_outer_iters + 1):
        tic = time.perf_counter()
        rec = TraceRecord(iteration=it, objective=np.nan, fit_term=np.nan,
                          cluster_term=np.nan, seconds=0.0)
        if record_step_objectives:
            rec.objective_start = joint_objective(T, X, Z, H, lam, mu)

        T = update_transform(X, Z, lam)
        if record_step_objectives:
            rec.objective_after_transform = joint_objective(T, X, Z, H, lam, mu)

        Z = update_coefficients_joint(T, X, H, mu)
        if record_step_objectives:
            rec.objective_after_coefficients = joint_objective(T, X, Z, H, lam, mu)
            rec.cluster_term_before_assign = kmeans_ops.kmeans_loss_factored(Z, H)

        centroids = kmeans_ops.centroids_from(Z, H)
        H, centroids, _ = kmeans_ops.update_assignments(
            Z, k, init=centroids, max_iter=inner_max_iter, tol=inner_tol,
        )

        rec.fit_term = _tl_part(T, X, Z, lam)
        rec.cluster_term = kmeans_ops.kmeans_loss_factored(Z, H)
        rec.objective = rec.fit_term + mu * rec.cluster_term
        rec.seconds = time.perf_counter() - tic
        trace.append(rec)

        if not np.isfinite(rec.objective):
            raise NumericalBreakdownError(
                f"objective became non-finite at outer iteration {it}",
                trace=trace,
            )
        if prev_obj is not None and params.outer_tol > 0:
            rel = abs(rec.objective - prev_obj) / max(abs(prev_obj), 1e-300)
            if rel < params.outer_tol:
                break
        prev_obj = rec.objective

    labels = kmeans_ops.assignment_to_labels(H)
    return SolveResult(
        transform=T, coefficients=Z, assignments=H, labels=labels, trace=trace
    )
