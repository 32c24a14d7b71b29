"""Exception types shared across the package."""


class TkmeansError(Exception):
    """Base class for all tkmeans errors."""


class TransformSingularError(TkmeansError):
    """The transform matrix is singular; log|det T| is undefined."""


class NumericalBreakdownError(TkmeansError):
    """Non-finite values or a failed factorization interrupted a computation.

    Solver aborts attach the partial iteration trace as ``.trace`` when one
    is available.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class EmptyClusterError(TkmeansError):
    """An assignment matrix has a row with no members (HH^T singular)."""


class TooManyClustersError(TkmeansError):
    """Requested more clusters than there are samples."""


class DegenerateClassCountError(TkmeansError):
    """Entropy needs at least two ground-truth classes (log2 q > 0)."""


class EmptyDocumentError(TkmeansError):
    """A sample row became all-zero during normalization."""

    def __init__(self, message, row_index=None):
        super().__init__(message)
        self.row_index = row_index


class CorpusFormatError(TkmeansError):
    """A corpus file failed to parse; carries the offending line number."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number
