"""Principal component analysis via covariance eigendecomposition.

The eigensolver is a cyclic Jacobi iteration: deterministic, produces the
full spectrum, and is robust for symmetric matrices up to the few-hundred
column sizes the lag designs reach.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DegenerateColumnError, InputError
from .validation import as_matrix, column_labels, readonly

JACOBI_TOL = 1e-12


def covariance_matrix(X) -> np.ndarray:
    """Sample covariance (n-1 denominator) of the centered columns,
    symmetrized exactly."""
    arr = as_matrix(X)
    if arr.shape[0] < 2:
        raise InputError(f"covariance needs at least 2 rows, got {arr.shape[0]}")
    centered = arr - arr.mean(axis=0)
    cov = centered.T @ centered / (arr.shape[0] - 1)
    return (cov + cov.T) / 2.0


def _off_diagonal_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigh(S, tol: float = JACOBI_TOL, max_sweeps: int = 100):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi
    rotations.

    Sweeps over all (p, q) pairs in fixed order, rotating each off-diagonal
    entry to zero, until the off-diagonal Frobenius norm falls below ``tol``
    relative to the matrix's Frobenius norm (an absolute cutoff is
    unreachable in float64 once entries are large). Returns (eigenvalues,
    eigenvectors) with eigenvectors as columns, in no particular order.
    """
    A = np.array(S, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"matrix must be square, got shape {A.shape}")
    n = A.shape[0]
    asym = float(np.max(np.abs(A - A.T))) if n else 0.0
    scale = float(np.max(np.abs(A))) if n else 0.0
    if asym > 1e-8 * max(1.0, scale):
        raise InputError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    A = (A + A.T) / 2.0
    V = np.eye(n)
    if n < 2:
        return np.diag(A).copy(), V

    norm = float(np.sqrt(np.sum(A * A)))
    if norm == 0.0:
        return np.zeros(n), V
    stop = tol * norm
    # rotations on entries far below the current off-norm are no-ops; the
    # skip threshold shrinks each sweep so convergence is unaffected
    converged = False
    for _ in range(max_sweeps):
        off = _off_diagonal_norm(A)
        if off <= stop:
            converged = True
            break
        skip = off / (n * 10.0)
        for p in range(n - 1):
            row_p = A[p]
            for q in range(p + 1, n):
                apq = row_p[q]
                if abs(apq) < skip:
                    continue
                _rotate(A, V, p, q, apq)
    if not converged and _off_diagonal_norm(A) > stop:
        raise RuntimeError(
            f"Jacobi iteration failed to converge in {max_sweeps} sweeps"
        )
    evals = np.diag(A).copy()
    return evals, V


def _rotate(A: np.ndarray, V: np.ndarray, p: int, q: int, apq: float) -> None:
    """One Jacobi rotation zeroing A[p, q], applied in place."""
    theta = (A[q, q] - A[p, p]) / (2.0 * apq)
    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    col_p = A[:, p].copy()
    col_q = A[:, q].copy()
    A[:, p] = c * col_p - s * col_q
    A[:, q] = s * col_p + c * col_q
    row_p = A[p, :].copy()
    row_q = A[q, :].copy()
    A[p, :] = c * row_p - s * row_q
    A[q, :] = s * row_p + c * row_q
    A[p, q] = 0.0
    A[q, p] = 0.0
    vec_p = V[:, p].copy()
    vec_q = V[:, q].copy()
    V[:, p] = c * vec_p - s * vec_q
    V[:, q] = s * vec_p + c * vec_q


def _ordered_spectrum(evals: np.ndarray, vecs: np.ndarray):
    """Descending eigenvalues (stable on exact ties, so the Jacobi output
    order survives within an eigenspace), roundoff negatives clamped to
    zero, and each eigenvector's largest-magnitude entry made positive.
    Only covariance spectra pass through here, so any negative eigenvalue
    is numerical noise."""
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    vecs = vecs[:, order]
    evals[evals < 0] = 0.0
    for j in range(vecs.shape[1]):
        lead = np.argmax(np.abs(vecs[:, j]))
        if vecs[lead, j] < 0:
            vecs[:, j] = -vecs[:, j]
    return evals, vecs


class PrincipalComponents(BaseEstimator, TransformerMixin):
    """Top-k projection onto covariance eigenvectors.

    Parameters
    ----------
    n_components : how many components to retain (None keeps all).
    scale : standardize columns before the eigendecomposition, turning it
        into correlation-matrix PCA. Off by default: lag designs share price
        units, so plain covariance is the defensible choice.

    Fitted attributes: ``mean_``, ``scale_`` (None unless scaling),
    ``components_`` (columns are the k retained eigenvectors),
    ``eigenvalues_`` (retained, descending), ``all_eigenvalues_`` (full
    spectrum), ``total_variance_``, ``explained_variance_ratio_``,
    ``n_components_``.
    """

    def __init__(self, n_components: int | None = None, scale: bool = False):
        self.n_components = n_components
        self.scale = scale

    def fit(self, X, y=None):
        arr = as_matrix(X)
        n, p = arr.shape
        if n < 2:
            raise InputError(f"PCA needs at least 2 rows, got {n}")
        k = p if self.n_components is None else int(self.n_components)
        if not 1 <= k <= p:
            raise InputError(f"n_components must be in [1, {p}], got {k}")
        labels = column_labels(X, p)
        self.mean_ = readonly(arr.mean(axis=0))
        if self.scale:
            sd = arr.std(axis=0, ddof=1)
            dead = np.flatnonzero(sd == 0.0)
            if dead.size:
                raise DegenerateColumnError(
                    f"column '{labels[dead[0]]}' is constant and cannot be scaled"
                )
            self.scale_ = readonly(sd)
            work = (arr - self.mean_) / self.scale_
        else:
            self.scale_ = None
            work = arr - self.mean_
        cov = work.T @ work / (n - 1)
        cov = (cov + cov.T) / 2.0
        evals, vecs = jacobi_eigh(cov)
        evals, vecs = _ordered_spectrum(evals, vecs)
        self.all_eigenvalues_ = readonly(evals)
        self.eigenvalues_ = readonly(evals[:k])
        self.components_ = readonly(vecs[:, :k])
        self.total_variance_ = float(np.sum(evals))
        self.n_components_ = k
        self.feature_labels_ = labels
        return self

    @property
    def explained_variance_ratio_(self) -> np.ndarray:
        if self.total_variance_ <= 0.0:
            raise DegenerateColumnError(
                "total variance is zero; explained-variance ratios undefined"
            )
        return self.eigenvalues_ / self.total_variance_

    def transform(self, X) -> np.ndarray:
        arr = as_matrix(X)
        if arr.shape[1] != self.mean_.shape[0]:
            raise InputError(
                f"expected {self.mean_.shape[0]} columns, got {arr.shape[1]}"
            )
        work = arr - self.mean_
        if self.scale_ is not None:
            work = work / self.scale_
        return work @ self.components_

    def inverse_transform(self, scores) -> np.ndarray:
        arr = as_matrix(scores, "scores")
        if arr.shape[1] != self.n_components_:
            raise InputError(
                f"expected {self.n_components_} score columns, got {arr.shape[1]}"
            )
        work = arr @ self.components_.T
        if self.scale_ is not None:
            work = work * self.scale_
        return work + self.mean_

    def score_labels(self) -> tuple[str, ...]:
        return tuple(f"PC{i + 1}" for i in range(self.n_components_))

    def basis_hash(self) -> str:
        """SHA-256 over the centering vector, scaling and components; used
        by the leakage audit to prove projection never touches the basis."""
        digest = hashlib.sha256()
        digest.update(self.mean_.tobytes())
        if self.scale_ is not None:
            digest.update(self.scale_.tobytes())
        digest.update(self.components_.tobytes())
        digest.update(np.asarray(self.eigenvalues_).tobytes())
        return digest.hexdigest()

    def to_dict(self) -> dict:
        return {
            "center": [float(v) for v in self.mean_],
            "scale": None if self.scale_ is None else [float(v) for v in self.scale_],
            "eigenvalues": [float(v) for v in self.all_eigenvalues_],
            "components_row_major": [float(v) for v in self.components_.ravel()],
            "k": self.n_components_,
        }


def fit_pca(X, k: int, scale: bool = False) -> PrincipalComponents:
    """Fit a k-component basis on X (convenience wrapper)."""
    return PrincipalComponents(n_components=k, scale=scale).fit(X)


def project(X, basis: PrincipalComponents):
    """Scores of X in the basis, labelled PC1..PCk. Returns a DesignMatrix
    when X carries dates/labels, else a bare array."""
    from .timeseries import DesignMatrix

    scores = basis.transform(X)
    dates = getattr(X, "dates", None)
    return DesignMatrix(scores, basis.score_labels(), dates)


def explained_variance_ratio(basis: PrincipalComponents) -> np.ndarray:
    return basis.explained_variance_ratio_
