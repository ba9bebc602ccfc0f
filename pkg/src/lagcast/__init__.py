"""lagcast: cross-asset influence analysis and lag-feature forecasting with
built-in LASSO, PCA and OLS solvers."""

__version__ = "0.1.0"

from .errors import (AlignmentError, ConfigError, DegenerateColumnError,
                     InputError, LagcastError, ParseError, RankError,
                     SplitError, ValidationError)
from .lagfeatures import LagMatrix, LagSpec, build_lag_matrix, feedback_profile, node_count
from .lasso import LassoRegression, influence_weights, lambda_max, select_lambda, soft_threshold
from .pca import PrincipalComponents, covariance_matrix, fit_pca, jacobi_eigh, project
from .regress import LeastSquares, MetricsReport, metrics
from .stats import CorrMatrix, Standardizer, correlation_matrix, pearson, standardize
from .synthdata import GeneratorSpec, Xorshift64Star, generate
from .timeseries import (AlignedPanel, DesignMatrix, SeriesFrame, align_inner,
                         chronological_split, parse_ohlcv_csv, read_ohlcv_csv)

__all__ = [
    "AlignedPanel", "AlignmentError", "ConfigError", "CorrMatrix",
    "DegenerateColumnError", "DesignMatrix", "GeneratorSpec", "InputError",
    "LagMatrix", "LagSpec", "LagcastError", "LassoRegression", "LeastSquares",
    "MetricsReport", "ParseError", "PrincipalComponents", "RankError",
    "SeriesFrame", "SplitError", "Standardizer", "ValidationError",
    "Xorshift64Star", "align_inner", "build_lag_matrix", "chronological_split",
    "correlation_matrix", "covariance_matrix", "feedback_profile", "fit_pca",
    "generate", "influence_weights", "jacobi_eigh", "lambda_max", "metrics",
    "node_count", "parse_ohlcv_csv", "pearson", "project", "read_ohlcv_csv",
    "select_lambda", "soft_threshold", "standardize",
]
