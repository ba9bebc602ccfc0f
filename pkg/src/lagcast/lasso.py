"""L1-penalized least squares by cyclic coordinate descent.

The objective is the plain residual sum of squares plus an L1 penalty,

    sum_i (y_i - a - sum_j b_j x_ij)^2 + lam * sum_j |b_j|

with no 1/n or 1/(2n) factor. A coefficient fitted by the common
1/(2n)-scaled convention at penalty alpha equals this solver's solution at
lam = 2 * n * alpha. The intercept is handled by centering: a = mean(y) -
sum_j b_j mean(x_j), so the descent runs on centered columns where each
coordinate update has the closed form

    b_j <- soft_threshold(2 x_j . r_minus_j, lam) / (2 x_j . x_j).

Updates are applied in fixed column order from a zero start, making every
fit deterministic.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ConfigError, DegenerateColumnError, InputError
from .timeseries import AlignedPanel, DesignMatrix
from .validation import as_matrix, as_vector, check_paired, column_labels, readonly

DEFAULT_TOL = 1e-7
DEFAULT_MAX_SWEEPS = 10_000


def soft_threshold(z: float, t: float) -> float:
    """sign(z) * max(|z| - t, 0); the scalar L1 proximal map."""
    if t < 0:
        raise InputError(f"threshold must be nonnegative, got {t}")
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def _prepare(X, y, standardize: bool):
    """Centered (optionally unit-variance) columns plus centering metadata."""
    arr = as_matrix(X)
    target = as_vector(y)
    check_paired(arr, target)
    if arr.shape[0] < 2:
        raise InputError("lasso needs at least 2 rows")
    labels = column_labels(X, arr.shape[1])
    means = arr.mean(axis=0)
    centered = arr - means
    if standardize:
        scales = arr.std(axis=0, ddof=1)
        dead = np.flatnonzero(scales == 0.0)
        if dead.size:
            raise DegenerateColumnError(
                f"column '{labels[dead[0]]}' is constant and cannot be standardized"
            )
        centered = centered / scales
    else:
        scales = None
    y_mean = float(target.mean())
    return centered, target - y_mean, means, scales, y_mean, labels


def lambda_max(X, y, standardize: bool = False) -> float:
    """Smallest penalty at which the fitted coefficient vector is all zero:
    2 * max_j |x_j . (y - mean(y))| over centered (optionally standardized)
    columns."""
    centered, y_c, *_ = _prepare(X, y, standardize)
    if centered.shape[1] == 0:
        return 0.0
    return float(2.0 * np.max(np.abs(centered.T @ y_c)))


class LassoRegression(BaseEstimator):
    """Cyclic coordinate-descent solver for the L1-penalized objective above.

    Parameters
    ----------
    lam : penalty weight >= 0, or None to pick one on a 50-point log grid by
        chronological validation (the last ``val_fraction`` of the rows).
    tol : convergence threshold on the largest absolute coefficient change
        per sweep.
    max_sweeps : hard sweep cap.
    standardize : fit on unit-variance columns and report coefficients in
        those units (per-standard-deviation effects).

    Fitted attributes: ``coef_``, ``intercept_``, ``lambda_``, ``budget_``
    (sum of |coef|), ``n_sweeps_``, ``converged_``, ``objective_``,
    ``objective_trace_`` (one entry per sweep, starting from the zero
    vector), ``feature_labels_``, ``feature_means_``/``feature_scales_``
    (scaling metadata; scales are None unless standardizing).
    """

    def __init__(self, lam: float | None = None, tol: float = DEFAULT_TOL,
                 max_sweeps: int = DEFAULT_MAX_SWEEPS, standardize: bool = False,
                 val_fraction: float = 0.2):
        self.lam = lam
        self.tol = tol
        self.max_sweeps = max_sweeps
        self.standardize = standardize
        self.val_fraction = val_fraction

    def _check_params(self):
        if self.lam is not None and self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")
        if self.tol <= 0:
            raise ConfigError(f"tolerance must be > 0, got {self.tol}")
        if self.max_sweeps < 1:
            raise ConfigError(f"max_sweeps must be >= 1, got {self.max_sweeps}")

    def fit(self, X, y):
        self._check_params()
        lam = self.lam
        if lam is None:
            lam, _ = select_lambda(
                X, y, standardize=self.standardize, tol=self.tol,
                max_sweeps=self.max_sweeps, val_fraction=self.val_fraction,
            )
        centered, y_c, means, scales, y_mean, labels = _prepare(
            X, y, self.standardize
        )
        coef, trace, sweeps, converged = _coordinate_descent(
            centered, y_c, lam, self.tol, self.max_sweeps
        )
        self.lambda_ = float(lam)
        self.coef_ = readonly(coef)
        self.feature_means_ = readonly(means)
        self.feature_scales_ = readonly(scales) if scales is not None else None
        self.feature_labels_ = labels
        if self.standardize:
            self.intercept_ = y_mean
        else:
            self.intercept_ = y_mean - float(means @ coef)
        self.budget_ = float(np.sum(np.abs(coef)))
        self.objective_trace_ = tuple(trace)
        self.objective_ = trace[-1]
        self.n_sweeps_ = sweeps
        self.converged_ = converged
        return self

    def predict(self, X):
        arr = as_matrix(X)
        if arr.shape[1] != self.coef_.shape[0]:
            raise InputError(
                f"expected {self.coef_.shape[0]} feature columns, got {arr.shape[1]}"
            )
        if self.feature_scales_ is not None:
            arr = (arr - self.feature_means_) / self.feature_scales_
        return self.intercept_ + arr @ self.coef_

    def coefficients(self) -> list[tuple[str, float]]:
        """(label, weight) pairs in input column order."""
        return [(label, float(w)) for label, w in zip(self.feature_labels_, self.coef_)]

    def to_dict(self) -> dict:
        return {
            "intercept": self.intercept_,
            "coefficients": [
                {"label": label, "weight": weight}
                for label, weight in self.coefficients()
            ],
            "lambda": self.lambda_,
            "budget": self.budget_,
            "converged": self.converged_,
            "sweeps_used": self.n_sweeps_,
            "objective": self.objective_,
        }


def _coordinate_descent(Xc: np.ndarray, yc: np.ndarray, lam: float,
                        tol: float, max_sweeps: int):
    n, p = Xc.shape
    col_sq = np.einsum("ij,ij->j", Xc, Xc)
    coef = np.zeros(p)
    resid = yc.copy()
    trace = [float(resid @ resid)]
    converged = False
    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        max_delta = 0.0
        for j in range(p):
            cj = col_sq[j]
            if cj == 0.0:
                continue
            xj = Xc[:, j]
            old = coef[j]
            rho = float(xj @ resid) + cj * old
            new = soft_threshold(2.0 * rho, lam) / (2.0 * cj)
            if new != old:
                resid -= (new - old) * xj
                coef[j] = new
                max_delta = max(max_delta, abs(new - old))
        trace.append(float(resid @ resid) + lam * float(np.sum(np.abs(coef))))
        if max_delta < tol:
            converged = True
            break
    return coef, trace, sweeps, converged


def select_lambda(X, y, *, standardize: bool = False, tol: float = DEFAULT_TOL,
                  max_sweeps: int = DEFAULT_MAX_SWEEPS, n_grid: int = 50,
                  grid_decades: float = 4.0, val_fraction: float = 0.2):
    """Pick the penalty by chronological validation.

    The last ``val_fraction`` of the rows form the validation block (time
    order forbids shuffled cross-validation). Candidates form a log grid of
    ``n_grid`` points from lambda_max of the training block down by
    ``grid_decades`` decades; the smallest validation MSE wins, ties going
    to the larger (more shrinking) penalty. Returns (lam, [(lam, mse)...]).
    """
    arr = as_matrix(X)
    target = as_vector(y)
    check_paired(arr, target)
    n = arr.shape[0]
    split = int(math.floor(n * (1.0 - val_fraction)))
    if split < 2 or split >= n:
        raise ConfigError(
            f"{n} rows are too few for validation-based lambda selection; "
            "pass an explicit lambda"
        )
    X_tr, y_tr = arr[:split], target[:split]
    X_val, y_val = arr[split:], target[split:]
    lam_hi = lambda_max(X_tr, y_tr, standardize)
    if lam_hi == 0.0:
        return 0.0, [(0.0, 0.0)]
    grid = lam_hi * np.power(10.0, -np.linspace(0.0, grid_decades, n_grid))
    best_lam, best_mse = None, math.inf
    records = []
    for lam in grid:
        model = LassoRegression(lam=float(lam), tol=tol, max_sweeps=max_sweeps,
                                standardize=standardize).fit(X_tr, y_tr)
        mse = float(np.mean((y_val - model.predict(X_val)) ** 2))
        records.append((float(lam), mse))
        if mse < best_mse:
            best_lam, best_mse = float(lam), mse
    return best_lam, records


def influence_weights(panel: AlignedPanel, target: str,
                      lam: float | None = None, standardize: bool = False,
                      tol: float = DEFAULT_TOL,
                      max_sweeps: int = DEFAULT_MAX_SWEEPS) -> LassoRegression:
    """Regress one panel column on all the others with the L1 penalty.

    Returns the fitted model; ``coefficients()`` lists per-instrument
    weights in panel order. Defaults to raw (unstandardized) features so the
    weights are in target-units per predictor-unit.
    """
    if target not in panel.labels:
        raise InputError(f"target '{target}' not in panel columns {panel.labels}")
    predictors = [label for label in panel.labels if label != target]
    if not predictors:
        raise InputError("need at least one predictor column besides the target")
    X = DesignMatrix(
        np.column_stack([panel.columns[label] for label in predictors]),
        labels=tuple(predictors),
        dates=panel.dates,
    )
    model = LassoRegression(lam=lam, tol=tol, max_sweeps=max_sweeps,
                            standardize=standardize)
    return model.fit(X, panel.columns[target])
