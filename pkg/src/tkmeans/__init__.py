"""Transformed K-means: joint transform learning and K-means clustering.

Learns a square analysis transform T, sparse-free coefficients Z = TX pulled
toward their cluster means, and a hard cluster assignment H by alternating
closed-form updates on the joint objective

    ||T X - Z||_F^2 + lambda (||T||_F^2 - log|det T|)
        + mu ||Z - Z H^T (H H^T)^{-1} H||_F^2.

Subpackages: :mod:`tkmeans.transform_ops` (transform/coefficient updates),
:mod:`tkmeans.kmeans_ops` (assignment algebra and Lloyd iterations),
:mod:`tkmeans.joint_solver` (the alternating solver), :mod:`tkmeans.metrics`
(purity and normalized entropy), :mod:`tkmeans.data_pipeline` (corpus I/O,
tf-idf, SVD reduction, synthetic blobs), and :mod:`tkmeans.bench_cli`
(the ``tkmeans`` command line).  Hot kernels run through
:mod:`tkmeans.kernels`, which picks the compiled backend when available
(override with the ``TKMEANS_KERNELS`` environment variable).
"""

from . import exceptions
from .data_pipeline import (
    LabeledCorpus,
    ReducedDataset,
    ReductionMeta,
    as_reduced,
    blobs_corpus,
    load_corpus,
    make_blobs,
    reduce_dims,
    save_corpus,
    subsample_classes,
    tfidf_normalize,
)
from .exceptions import (
    CorpusFormatError,
    DegenerateClassCountError,
    EmptyClusterError,
    EmptyDocumentError,
    NumericalBreakdownError,
    TkmeansError,
    TooManyClustersError,
    TransformSingularError,
)
from .joint_solver import (
    JointHyperparams,
    SolveResult,
    SolveTrace,
    TraceRecord,
    joint_objective,
    solve,
    update_coefficients_joint,
)
from .kmeans_ops import (
    assignment_to_labels,
    build_projector,
    centroids_from,
    kmeans_loss_factored,
    kmeans_loss_sum,
    labels_to_assignment,
    update_assignments,
    validate_assignment,
)
from .metrics import ContingencyTable, contingency, entropy, purity
from .transform_ops import (
    TlHyperparams,
    tl_objective,
    transform_logabsdet,
    update_coefficients_soft_threshold,
    update_transform,
)

__version__ = "0.1.0"

__all__ = [
    "CorpusFormatError",
    "ContingencyTable",
    "DegenerateClassCountError",
    "EmptyClusterError",
    "EmptyDocumentError",
    "JointHyperparams",
    "LabeledCorpus",
    "NumericalBreakdownError",
    "ReducedDataset",
    "ReductionMeta",
    "SolveResult",
    "SolveTrace",
    "TkmeansError",
    "TlHyperparams",
    "TooManyClustersError",
    "TraceRecord",
    "TransformSingularError",
    "as_reduced",
    "assignment_to_labels",
    "blobs_corpus",
    "build_projector",
    "centroids_from",
    "contingency",
    "entropy",
    "exceptions",
    "joint_objective",
    "kmeans_loss_factored",
    "kmeans_loss_sum",
    "labels_to_assignment",
    "load_corpus",
    "make_blobs",
    "purity",
    "reduce_dims",
    "save_corpus",
    "solve",
    "subsample_classes",
    "tfidf_normalize",
    "tl_objective",
    "transform_logabsdet",
    "update_assignments",
    "update_coefficients_joint",
    "update_coefficients_soft_threshold",
    "update_transform",
    "validate_assignment",
    "__version__",
]
