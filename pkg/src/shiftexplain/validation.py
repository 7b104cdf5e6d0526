"""Input validation helpers shared by solvers, estimators and the CLI.

All numeric entry points funnel through :func:`as_float_matrix`, which accepts
anything array-like (ndarray, list of rows, pandas DataFrame, TabularDataset)
and returns a validated float64 matrix.
"""

from __future__ import annotations

import numpy as np


def as_float_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce ``X`` to a 2-D float64 array with at least one row and column.

    Raises ValueError if the result is not 2-D, is empty, or contains
    non-finite entries.
    """
    values = getattr(X, "values", X)
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise ValueError(f"{name} contains a non-finite entry at row {bad[0]}, column {bad[1]}")
    return arr


def check_paired_matrices(X, Y, x_name: str = "source", y_name: str = "target"):
    """Validate two sample matrices that must share a feature dimension."""
    X = as_float_matrix(X, x_name)
    Y = as_float_matrix(Y, y_name)
    if X.shape[1] != Y.shape[1]:
        raise ValueError(
            f"{x_name} and {y_name} must have the same number of features: "
            f"{X.shape[1]} != {Y.shape[1]}"
        )
    return X, Y


def check_same_shape(A, B, a_name: str = "A", b_name: str = "B"):
    A = as_float_matrix(A, a_name)
    B = as_float_matrix(B, b_name)
    if A.shape != B.shape:
        raise ValueError(f"{a_name} and {b_name} must have identical shapes: {A.shape} != {B.shape}")
    return A, B


def check_k(k: int, upper: int, what: str = "features") -> int:
    """Validate a sparsity/cluster level 1 <= k <= upper."""
    if not isinstance(k, (int, np.integer)):
        raise ValueError(f"k must be an integer, got {type(k).__name__}")
    if not 1 <= k <= upper:
        raise ValueError(f"k must be between 1 and the number of {what} ({upper}), got {k}")
    return int(k)


def feature_names_of(X) -> list[str] | None:
    """Extract column names from a DataFrame/TabularDataset-like object, if any."""
    cols = getattr(X, "columns", None)
    if cols is None:
        return None
    return [str(c) for c in cols]


def check_unique_columns(columns) -> list[str]:
    columns = [str(c) for c in columns]
    seen = set()
    for c in columns:
        if c in seen:
            raise ValueError(f"column names must be unique; {c!r} appears more than once")
        seen.add(c)
    return columns
