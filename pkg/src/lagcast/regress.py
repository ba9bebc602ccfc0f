"""Ordinary least squares by Householder QR, plus forecast-quality metrics.

QR (rather than normal equations) keeps the conditioning of the post-PCA
designs, which can run to hundreds of columns. Rank deficiency is a hard
error: in this pipeline it signals a lag-construction bug, not something to
paper over with a pseudo-inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .errors import DegenerateColumnError, InputError, RankError
from .validation import as_matrix, as_vector, check_paired, column_labels, readonly

RANK_RTOL = 1e-10


def qr_least_squares(A: np.ndarray, b: np.ndarray, labels: tuple[str, ...]):
    """Minimize ||A x - b|| via Householder reflections.

    Returns the solution vector. Raises RankError naming the first column
    whose R diagonal falls below RANK_RTOL times the largest diagonal.
    """
    n, m = A.shape
    if n < m:
        raise InputError(f"need at least {m} rows for {m} columns, got {n}")
    R = A.astype(float, copy=True)
    rhs = b.astype(float, copy=True)
    diag = np.empty(m)
    for j in range(m):
        col = R[j:, j].copy()
        norm = float(np.sqrt(col @ col))
        if norm == 0.0:
            diag[j] = 0.0
            continue
        alpha = -math.copysign(norm, col[0] if col[0] != 0.0 else 1.0)
        col[0] -= alpha
        vsq = float(col @ col)
        if vsq > 0.0:
            factor = 2.0 / vsq
            if j + 1 < m:
                R[j:, j + 1:] -= np.outer(col, factor * (col @ R[j:, j + 1:]))
            rhs[j:] -= col * (factor * float(col @ rhs[j:]))
        R[j, j] = alpha
        R[j + 1:, j] = 0.0
        diag[j] = alpha
    max_diag = float(np.max(np.abs(diag))) if m else 0.0
    small = np.flatnonzero(np.abs(diag) < RANK_RTOL * max_diag) if max_diag > 0 \
        else np.arange(m)
    if small.size:
        raise RankError(
            f"design is rank deficient at column '{labels[small[0]]}'"
        )
    x = np.empty(m)
    for j in range(m - 1, -1, -1):
        x[j] = (rhs[j] - R[j, j + 1:] @ x[j + 1:]) / R[j, j]
    return x


class LeastSquares(BaseEstimator):
    """Unpenalized linear regression with an internally added intercept.

    Fitted attributes: ``intercept_``, ``coef_``, ``feature_labels_``.
    """

    def fit(self, X, y):
        arr = as_matrix(X)
        target = as_vector(y)
        check_paired(arr, target)
        n, p = arr.shape
        if n < p + 1:
            raise InputError(
                f"need at least {p + 1} rows for {p} features plus intercept, got {n}"
            )
        labels = column_labels(X, p)
        augmented = np.column_stack([np.ones(n), arr])
        solution = qr_least_squares(augmented, target, ("intercept",) + labels)
        self.intercept_ = float(solution[0])
        self.coef_ = readonly(solution[1:])
        self.feature_labels_ = labels
        return self

    def predict(self, X):
        labels = getattr(X, "labels", None)
        if labels is not None and tuple(labels) != self.feature_labels_:
            raise InputError(
                f"column labels {tuple(labels)} do not match the fitted "
                f"labels {self.feature_labels_}"
            )
        arr = as_matrix(X)
        if arr.shape[1] != self.coef_.shape[0]:
            raise InputError(
                f"expected {self.coef_.shape[0]} feature columns, got {arr.shape[1]}"
            )
        return self.intercept_ + arr @ self.coef_

    def coefficients(self) -> list[tuple[str, float]]:
        return [(label, float(w)) for label, w in zip(self.feature_labels_, self.coef_)]

    def to_dict(self) -> dict:
        return {
            "intercept": self.intercept_,
            "coefficients": [
                {"label": label, "weight": weight}
                for label, weight in self.coefficients()
            ],
        }


@dataclass(frozen=True)
class MetricsReport:
    """Forecast error magnitudes in target units (mse is squared)."""

    mse: float
    rmse: float
    mae: float
    r2: float | None

    def to_dict(self) -> dict:
        return {"mse": self.mse, "rmse": self.rmse, "mae": self.mae, "r2": self.r2}


def metrics(y, yhat, include_r2: bool = True) -> MetricsReport:
    """Mean squared/absolute error and, unless disabled, R^2.

    R^2 is undefined for a constant actual vector; pass include_r2=False to
    still get the error magnitudes in that case.
    """
    actual = as_vector(y, "y")
    predicted = as_vector(yhat, "yhat")
    if actual.shape[0] != predicted.shape[0]:
        raise InputError(
            f"length mismatch: {actual.shape[0]} vs {predicted.shape[0]}"
        )
    if actual.shape[0] < 2:
        raise InputError("metrics need at least 2 observations")
    err = actual - predicted
    mse = float(err @ err) / actual.shape[0]
    mae = float(np.mean(np.abs(err)))
    r2 = None
    if include_r2:
        centered = actual - actual.mean()
        ss_tot = float(centered @ centered)
        if ss_tot == 0.0:
            raise DegenerateColumnError(
                "R^2 undefined for a constant actual vector "
                "(set include_r2=False for the other metrics)"
            )
        r2 = 1.0 - float(err @ err) / ss_tot
    return MetricsReport(mse=mse, rmse=math.sqrt(mse), mae=mae, r2=r2)
