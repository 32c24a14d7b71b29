"""Labeled-corpus ingestion and preparation.

Corpora arrive as two text files:

* features: a sparse coordinate-triplet file.  First line is a header
  ``rows cols nnz``; each following line is ``row col value`` with 0-based
  indices.  Duplicate coordinates, blank interior lines, and malformed
  lines are rejected with their line number.
* labels: one 0-based integer class id per line, one line per sample row.

The pipeline is: load -> optional TF-IDF -> truncated-SVD reduction to d
dimensions (columns of the resulting matrix are samples) -> per-trial class
subsampling.  Everything downstream of ingestion is deterministic given the
seeds it is handed.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import svds

from .exceptions import CorpusFormatError, EmptyDocumentError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabeledCorpus:
    """Sparse sample-by-feature matrix with one class label per sample."""

    features: sp.csr_matrix
    labels: np.ndarray
    class_count: int

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]


@dataclass(frozen=True)
class ReductionMeta:
    method: str
    dim: int
    seed: int


@dataclass(frozen=True)
class ReducedDataset:
    """Dense column-per-sample matrix ready for the solver."""

    X: np.ndarray
    labels: np.ndarray
    reduction_meta: ReductionMeta

    @property
    def n_samples(self):
        return self.X.shape[1]

    @property
    def class_count(self):
        return int(self.labels.max()) + 1 if self.labels.size else 0


def load_corpus(features_path, labels_path):
    """Parse a triplet feature file and a label file into a corpus."""
    with open(features_path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise CorpusFormatError(f"{features_path}: empty file", line_number=1)

    header = lines[0].split()
    if len(header) != 3:
        raise CorpusFormatError(
            f"{features_path}:1: header must be 'rows cols nnz'", line_number=1
        )
    try:
        n_rows, n_cols, nnz = (int(tok) for tok in header)
    except ValueError:
        raise CorpusFormatError(
            f"{features_path}:1: non-integer header fields", line_number=1
        ) from None
    if n_rows < 1 or n_cols < 1 or nnz < 0:
        raise CorpusFormatError(
            f"{features_path}:1: invalid dimensions {header}", line_number=1
        )
    if len(lines) != nnz + 1:
        raise CorpusFormatError(
            f"{features_path}: header promises {nnz} entries, file has "
            f"{len(lines) - 1} data lines",
            line_number=len(lines),
        )

    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.float64)
    seen = set()
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 3:
            raise CorpusFormatError(
                f"{features_path}:{i}: expected 'row col value', got {line!r}",
                line_number=i,
            )
        try:
            r, c, v = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise CorpusFormatError(
                f"{features_path}:{i}: malformed entry {line!r}", line_number=i
            ) from None
        if not (0 <= r < n_rows and 0 <= c < n_cols):
            raise CorpusFormatError(
                f"{features_path}:{i}: index ({r}, {c}) out of range", line_number=i
            )
        if not np.isfinite(v):
            raise CorpusFormatError(
                f"{features_path}:{i}: non-finite value {parts[2]}", line_number=i
            )
        key = r * n_cols + c
        if key in seen:
            raise CorpusFormatError(
                f"{features_path}:{i}: duplicate entry for ({r}, {c})", line_number=i
            )
        seen.add(key)
        rows[i - 2], cols[i - 2], vals[i - 2] = r, c, v

    features = sp.csr_matrix(
        (vals, (rows, cols)), shape=(n_rows, n_cols), dtype=np.float64
    )

    with open(labels_path, "r", encoding="utf-8") as fh:
        label_lines = fh.read().splitlines()
    labels = np.empty(len(label_lines), dtype=np.int64)
    for i, line in enumerate(label_lines, start=1):
        try:
            labels[i - 1] = int(line.strip())
        except ValueError:
            raise CorpusFormatError(
                f"{labels_path}:{i}: malformed label {line!r}", line_number=i
            ) from None
        if labels[i - 1] < 0:
            raise CorpusFormatError(
                f"{labels_path}:{i}: negative label {line!r}", line_number=i
            )
    if labels.size != n_rows:
        raise CorpusFormatError(
            f"{labels_path}: {labels.size} labels for {n_rows} samples",
            line_number=labels.size,
        )
    return LabeledCorpus(
        features=features, labels=labels, class_count=int(labels.max()) + 1
    )


def save_corpus(corpus, features_path, labels_path):
    """Write a corpus in the triplet format read by :func:`load_corpus`.

    Values are written with ``repr`` so a round trip is bit-identical.
    """
    coo = corpus.features.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(features_path, "w", encoding="utf-8") as fh:
        fh.write(f"{corpus.n_samples} {corpus.n_features} {coo.nnz}\n")
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{r} {c} {float(v)!r}\n")
    with open(labels_path, "w", encoding="utf-8") as fh:
        for lab in corpus.labels:
            fh.write(f"{lab}\n")


def tfidf_normalize(corpus, on_empty="error"):
    """TF-IDF weighting with smoothed IDF and unit-l2 sample rows.

    IDF of a term is ``log((1 + N) / (1 + df)) + 1`` (natural log), so a
    term present in every document keeps weight 1.  Rows that are all-zero
    raise :class:`EmptyDocumentError` by default; ``on_empty='drop'``
    removes them with a warning instead (their labels go with them).
    """
    if on_empty not in ("error", "drop"):
        raise ValueError(f"on_empty must be 'error' or 'drop', got {on_empty!r}")
    feats = corpus.features.tocsr().astype(np.float64)
    if feats.nnz and feats.data.min() < 0:
        raise ValueError("TF-IDF requires nonnegative counts")

    empty = np.flatnonzero(np.diff(feats.indptr) == 0)
    labels = corpus.labels
    if empty.size:
        if on_empty == "error":
            raise EmptyDocumentError(
                f"sample row {empty[0]} has no terms", row_index=int(empty[0])
            )
        logger.warning("dropping %d empty document(s): rows %s", empty.size, empty)
        keep = np.setdiff1d(np.arange(feats.shape[0]), empty)
        feats = feats[keep]
        labels = labels[keep]

    n_docs = feats.shape[0]
    df = np.diff(feats.tocsc().indptr)
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    weighted = feats.multiply(idf[None, :]).tocsr()
    norms = np.sqrt(weighted.multiply(weighted).sum(axis=1)).A1
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    weighted = sp.diags(inv) @ weighted
    return LabeledCorpus(
        features=weighted.tocsr(), labels=labels, class_count=corpus.class_count
    )


def reduce_dims(corpus, d, seed=0):
    """Project samples onto their top-d singular directions.

    The reduced matrix has one column per sample (shape d x n).  Like LSA,
    no centering is applied, so sparse input stays sparse throughout.  The
    Lanczos start vector is seeded and singular-vector signs are fixed by
    making each left vector's largest-magnitude entry positive, so the
    output is deterministic.
    """
    A = corpus.features
    n, m = A.shape
    if not (1 <= d <= min(n, m)):
        raise ValueError(f"target dim {d} out of range [1, {min(n, m)}]")

    if d < min(n, m):
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(min(n, m))
        u, s, _ = svds(A.astype(np.float64), k=d, v0=v0)
        order = np.argsort(s)[::-1]
        u, s = u[:, order], s[order]
    else:
        dense = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=np.float64)
        u, s, _ = np.linalg.svd(dense, full_matrices=False)
        u, s = u[:, :d], s[:d]

    flip = np.sign(u[np.argmax(np.abs(u), axis=0), np.arange(d)])
    flip[flip == 0] = 1.0
    u = u * flip
    X = np.ascontiguousarray((u * s).T)
    if not np.all(np.isfinite(X)):
        raise ValueError("reduction produced non-finite values")
    return ReducedDataset(
        X=X,
        labels=corpus.labels.copy(),
        reduction_meta=ReductionMeta(method="truncated_svd", dim=d, seed=seed),
    )


def as_reduced(corpus_or_reduced, d=None, seed=0):
    """Reduce a corpus, or pass a ReducedDataset through unchanged.

    ``d=None`` skips reduction and densifies the raw features (columns
    become samples).
    """
    if isinstance(corpus_or_reduced, ReducedDataset):
        return corpus_or_reduced
    corpus = corpus_or_reduced
    if d is None:
        X = np.ascontiguousarray(corpus.features.toarray().T.astype(np.float64))
        return ReducedDataset(
            X=X,
            labels=corpus.labels.copy(),
            reduction_meta=ReductionMeta(method="none", dim=X.shape[0], seed=seed),
        )
    return reduce_dims(corpus, d, seed=seed)


def subsample_classes(data, c, trial_seed):
    """Keep all samples of ``c`` uniformly drawn distinct classes.

    Works on either a :class:`LabeledCorpus` or a :class:`ReducedDataset`
    and returns the same kind.  Kept classes are relabeled to 0..c-1 in
    increasing order of their original ids; per-sample (features, label)
    pairings and the original sample order are preserved.
    """
    labels = data.labels
    q = data.class_count
    if not (2 <= c <= q):
        raise ValueError(f"class subset size {c} out of range [2, {q}]")

    rng = np.random.default_rng(trial_seed)
    chosen = np.sort(rng.choice(q, size=c, replace=False))
    keep = np.isin(labels, chosen)
    remap = np.full(q, -1, dtype=np.int64)
    remap[chosen] = np.arange(c)
    new_labels = remap[labels[keep]]

    if isinstance(data, ReducedDataset):
        return replace(data, X=data.X[:, keep], labels=new_labels)
    return LabeledCorpus(
        features=data.features[keep], labels=new_labels, class_count=c
    )


def make_blobs(n_samples, dim, clusters, separation=20.0, cluster_std=1.0, seed=0):
    """Gaussian blobs with guaranteed center separation.

    Centers are placed along random orthonormal directions scaled so every
    pair of centers is exactly ``separation * cluster_std`` apart (requires
    clusters <= dim); samples are split across clusters as evenly as
    possible and shuffled.  Returns (X, labels) with X of shape (dim, n).
    """
    if clusters < 1:
        raise ValueError("clusters must be at least 1")
    if clusters > dim:
        raise ValueError(
            f"separated centers need clusters <= dim, got {clusters} > {dim}"
        )
    if n_samples < clusters:
        raise ValueError("need at least one sample per cluster")

    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((dim, clusters)))
    centers = basis * (separation * cluster_std / np.sqrt(2.0))

    sizes = np.full(clusters, n_samples // clusters, dtype=np.int64)
    sizes[: n_samples % clusters] += 1
    labels = np.repeat(np.arange(clusters), sizes)
    X = centers[:, labels] + cluster_std * rng.standard_normal((dim, n_samples))
    perm = rng.permutation(n_samples)
    return np.ascontiguousarray(X[:, perm]), labels[perm]


def blobs_corpus(n_samples, dim, clusters, separation=20.0, cluster_std=1.0, seed=0):
    """Blob data wrapped as a dense LabeledCorpus (samples as rows)."""
    X, labels = make_blobs(n_samples, dim, clusters, separation, cluster_std, seed)
    return LabeledCorpus(
        features=sp.csr_matrix(X.T), labels=labels, class_count=clusters
    )
