"""Input validation helpers used by the estimators and module functions."""

from __future__ import annotations

import numpy as np

from .errors import InputError


def as_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce X (array-like or DesignMatrix) to a finite 2-D float array."""
    values = getattr(X, "values", X)
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InputError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


def as_vector(y, name: str = "y") -> np.ndarray:
    """Coerce y to a finite 1-D float array."""
    arr = np.asarray(y, dtype=float).ravel()
    if arr.size and not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


def check_paired(X: np.ndarray, y: np.ndarray) -> None:
    if X.shape[0] != y.shape[0]:
        raise InputError(
            f"X has {X.shape[0]} rows but y has {y.shape[0]} entries"
        )


def column_labels(X, n_columns: int) -> tuple[str, ...]:
    """Labels from a DesignMatrix, or positional names for bare arrays."""
    labels = getattr(X, "labels", None)
    if labels is not None:
        return tuple(labels)
    return tuple(f"x{j}" for j in range(n_columns))


def readonly(arr: np.ndarray) -> np.ndarray:
    """Return a C-contiguous float copy with the writeable flag cleared."""
    out = np.ascontiguousarray(arr, dtype=float)
    if out is arr:
        out = arr.copy()
    out.flags.writeable = False
    return out
