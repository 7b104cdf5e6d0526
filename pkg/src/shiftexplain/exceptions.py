"""Exception types raised by the shiftexplain library."""


class ShiftExplainError(Exception):
    """Base class for all shiftexplain errors."""


class SizeLimitExceededError(ShiftExplainError):
    """Exact solver refused: N*M exceeds the configured exact_size_limit.

    Callers should fall back to the Sinkhorn solver (or use solver="auto").
    """


class ConvergenceError(ShiftExplainError):
    """Iterative solver failed to reach its tolerance within max_iters."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class DegeneratePlanError(ShiftExplainError):
    """A transport plan row carries (numerically) zero mass."""


class NothingToExplainError(ShiftExplainError):
    """Source and target are already aligned: W2^2(source, target) == 0."""


class ClusteringError(ShiftExplainError):
    """Clustering produced an empty cluster on every allowed restart."""


class EmptySplitError(ShiftExplainError):
    """A dataset split left the source or the target side empty."""


class CsvError(ShiftExplainError):
    """A CSV file could not be parsed into a numeric dataset."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column
