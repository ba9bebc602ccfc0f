"""Column standardization and Pearson correlation analysis.

Sample statistics use the n-1 denominator throughout so that pearson,
covariance and PCA agree on the same convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DegenerateColumnError, InputError
from .timeseries import AlignedPanel, DesignMatrix
from .validation import as_matrix, as_vector, column_labels, readonly


def column_stats(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-column mean and sample (n-1) standard deviation."""
    mean = X.mean(axis=0)
    sd = X.std(axis=0, ddof=1)
    return mean, sd


class Standardizer(BaseEstimator, TransformerMixin):
    """Scale columns to zero mean and unit sample standard deviation.

    Fitted attributes ``mean_`` and ``scale_`` allow exact inversion via
    :meth:`inverse_transform`. Constant columns are rejected because they
    cannot be scaled.
    """

    def fit(self, X, y=None):
        arr = as_matrix(X)
        if arr.shape[0] < 2:
            raise InputError("standardization needs at least 2 rows")
        labels = column_labels(X, arr.shape[1])
        mean, sd = column_stats(arr)
        dead = np.flatnonzero(sd == 0.0)
        if dead.size:
            raise DegenerateColumnError(
                f"column '{labels[dead[0]]}' is constant and cannot be standardized"
            )
        self.mean_ = readonly(mean)
        self.scale_ = readonly(sd)
        self.labels_ = labels
        return self

    def transform(self, X):
        arr = as_matrix(X)
        if arr.shape[1] != self.mean_.shape[0]:
            raise InputError(
                f"expected {self.mean_.shape[0]} columns, got {arr.shape[1]}"
            )
        return (arr - self.mean_) / self.scale_

    def inverse_transform(self, X):
        arr = as_matrix(X)
        return arr * self.scale_ + self.mean_


def standardize(matrix: DesignMatrix) -> tuple[DesignMatrix, Standardizer]:
    """Standardize a labelled design matrix, returning the scaling params."""
    scaler = Standardizer().fit(matrix)
    scaled = DesignMatrix(scaler.transform(matrix), matrix.labels, matrix.dates)
    return scaled, scaler


def pearson(x, y) -> float:
    """Sample Pearson correlation coefficient, clamped to [-1, 1]."""
    xa, ya = as_vector(x, "x"), as_vector(y, "y")
    if xa.shape[0] != ya.shape[0]:
        raise InputError(f"length mismatch: {xa.shape[0]} vs {ya.shape[0]}")
    if xa.shape[0] < 2:
        raise InputError("correlation needs at least 2 observations")
    xc, yc = xa - xa.mean(), ya - ya.mean()
    sx = float(np.sqrt(xc @ xc))
    sy = float(np.sqrt(yc @ yc))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateColumnError("correlation of a constant vector is undefined")
    return float(np.clip((xc @ yc) / (sx * sy), -1.0, 1.0))


@dataclass(frozen=True)
class CorrMatrix:
    """Symmetric correlation matrix with its column labels."""

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", readonly(np.asarray(self.values, dtype=float)))
        object.__setattr__(self, "labels", tuple(self.labels))

    def entry(self, a: str, b: str) -> float:
        return float(self.values[self.labels.index(a), self.labels.index(b)])

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.labels)]
        for i, label in enumerate(self.labels):
            cells = ",".join(f"{v:.6f}" for v in self.values[i])
            lines.append(f"{label},{cells}")
        return "\n".join(lines) + "\n"


def log_returns(panel: AlignedPanel) -> AlignedPanel:
    """Per-column log returns; drops the first panel row."""
    if len(panel) < 2:
        raise InputError("log returns need at least 2 rows")
    columns = {}
    for label, values in panel.columns.items():
        if np.any(values <= 0):
            raise InputError(f"column '{label}' has non-positive values; "
                             "log returns undefined")
        columns[label] = np.diff(np.log(values))
    return AlignedPanel(dates=panel.dates[1:], columns=columns)


def correlation_matrix(panel: AlignedPanel) -> CorrMatrix:
    """Pairwise Pearson correlations of all panel columns.

    The result is exactly symmetric with a unit diagonal: each off-diagonal
    pair is computed once and mirrored.
    """
    labels = panel.labels
    if len(labels) < 2:
        raise InputError("correlation matrix needs at least 2 columns")
    for label in labels:
        if np.ptp(panel.columns[label]) == 0.0:
            raise DegenerateColumnError(f"column '{label}' is constant")
    p = len(labels)
    values = np.eye(p)
    for i in range(p):
        for j in range(i + 1, p):
            r = pearson(panel.columns[labels[i]], panel.columns[labels[j]])
            values[i, j] = values[j, i] = r
    return CorrMatrix(labels=labels, values=values)
