import numpy as np
import pytest

from lagcast.errors import ConfigError, DegenerateColumnError, InputError
from lagcast.lasso import (LassoRegression, influence_weights, lambda_max,
                           select_lambda, soft_threshold)
from lagcast.regress import LeastSquares
from lagcast.timeseries import AlignedPanel, DesignMatrix

from conftest import brute_force_lasso, weekdays


class TestSoftThreshold:
    def test_shrinks(self):
        assert soft_threshold(3.0, 1.0) == 2.0

    def test_clips_to_zero(self):
        assert soft_threshold(-0.5, 1.0) == 0.0

    def test_identity_at_zero_threshold(self):
        assert soft_threshold(1.234, 0.0) == 1.234

    def test_matches_definition(self, rng):
        for _ in range(200):
            z = float(rng.normal(scale=3.0))
            t = float(rng.uniform(0.0, 3.0))
            expected = np.sign(z) * max(abs(z) - t, 0.0)
            assert soft_threshold(z, t) == pytest.approx(expected, abs=1e-15)

    def test_negative_threshold_rejected(self):
        with pytest.raises(InputError):
            soft_threshold(1.0, -0.1)


class TestFit:
    def test_zero_penalty_matches_ols(self, rng):
        X = rng.normal(size=(25, 4))
        y = X @ np.array([1.0, -2.0, 0.0, 0.5]) + rng.normal(size=25) + 2.0
        lasso = LassoRegression(lam=0.0).fit(X, y)
        ols = LeastSquares().fit(X, y)
        assert np.allclose(lasso.coef_, ols.coef_, atol=1e-8)
        assert lasso.intercept_ == pytest.approx(ols.intercept_, abs=1e-8)

    def test_orthonormal_shrinkage_half_lambda(self):
        # unit-norm centered column with OLS coefficient 3: solution 3 - lam/2
        x = np.array([1.0, -1.0]) / np.sqrt(2.0)
        y = 3.0 * x
        fit = LassoRegression(lam=2.0).fit(x.reshape(-1, 1), y)
        assert fit.coef_[0] == pytest.approx(2.0, abs=1e-10)
        oracle = brute_force_lasso(x.reshape(-1, 1), y, 2.0)
        assert abs(fit.coef_[0] - oracle[0]) < 1e-3

    def test_lambda_max_zeroes_everything(self, rng):
        X = rng.normal(size=(12, 3))
        y = rng.normal(size=12)
        lam_top = lambda_max(X, y)
        fit = LassoRegression(lam=lam_top).fit(X, y)
        assert np.all(fit.coef_ == 0.0)
        assert fit.intercept_ == pytest.approx(float(y.mean()), abs=1e-12)
        below = LassoRegression(lam=0.99 * lam_top).fit(X, y)
        assert np.count_nonzero(below.coef_) >= 1

    def test_all_zero_target(self):
        X = np.array([[1.0, 2.0], [3.0, 1.0], [0.0, 4.0]])
        fit = LassoRegression().fit(X, np.zeros(3))
        assert np.all(fit.coef_ == 0.0)
        assert fit.intercept_ == 0.0

    def test_budget_matches_coefficients(self, rng):
        X = rng.normal(size=(30, 5))
        y = rng.normal(size=30)
        fit = LassoRegression(lam=0.7).fit(X, y)
        assert fit.budget_ == float(np.sum(np.abs(fit.coef_)))

    def test_objective_trace_monotone(self, rng):
        for _ in range(10):
            X = rng.normal(size=(40, 6))
            y = X @ rng.normal(size=6) + rng.normal(size=40)
            lam = float(rng.uniform(0.0, 0.5)) * lambda_max(X, y)
            fit = LassoRegression(lam=lam).fit(X, y)
            trace = np.asarray(fit.objective_trace_)
            assert np.all(np.diff(trace) <= 1e-9 * np.maximum(1.0, trace[:-1]))
            assert fit.objective_ == trace[-1]

    def test_non_finite_rejected(self):
        X = np.array([[1.0], [np.nan]])
        with pytest.raises(InputError):
            LassoRegression(lam=0.1).fit(X, np.array([1.0, 2.0]))

    def test_degenerate_column_under_standardization(self):
        X = np.column_stack([np.arange(4.0), np.full(4, 2.0)])
        with pytest.raises(DegenerateColumnError):
            LassoRegression(lam=0.1, standardize=True).fit(X, np.arange(4.0))

    def test_invalid_params(self):
        with pytest.raises(ConfigError):
            LassoRegression(lam=-1.0).fit(np.eye(2), np.ones(2))
        with pytest.raises(ConfigError):
            LassoRegression(lam=0.0, tol=0.0).fit(np.eye(2), np.ones(2))
        with pytest.raises(ConfigError):
            LassoRegression(lam=0.0, max_sweeps=0).fit(np.eye(2), np.ones(2))

    def test_predict_standardized_mode(self, rng):
        X = rng.normal(size=(50, 3)) * np.array([1.0, 10.0, 100.0])
        y = X @ np.array([0.5, 0.05, 0.005]) + 1.0
        fit = LassoRegression(lam=1e-6, standardize=True).fit(X, y)
        assert np.allclose(fit.predict(X), y, atol=1e-4)

    def test_get_params_clone_roundtrip(self):
        model = LassoRegression(lam=0.5, tol=1e-6, max_sweeps=99,
                                standardize=True)
        params = model.get_params()
        again = LassoRegression(**params)
        assert again.lam == 0.5 and again.max_sweeps == 99


class TestOracleEquivalence:
    def test_grid_minimization_small_instances(self, rng):
        for trial in range(25):
            n = int(rng.integers(4, 31))
            p = int(rng.integers(1, 3))
            X = rng.normal(size=(n, p)) * float(rng.uniform(0.5, 2.0))
            beta = rng.normal(size=p)
            y = X @ beta + 0.3 * rng.normal(size=n) + float(rng.normal())
            lam = float(rng.uniform(0.0, 1.0)) * max(lambda_max(X, y), 1e-6)
            fit = LassoRegression(lam=lam).fit(X, y)
            oracle = brute_force_lasso(X, y, lam)
            assert np.max(np.abs(fit.coef_ - oracle)) < 1e-3, (trial, lam)


class TestStationarity:
    def test_subgradient_conditions(self, rng):
        for _ in range(20):
            n = int(rng.integers(12, 60))
            p = int(rng.integers(1, 11))
            X = rng.normal(size=(n, p))
            y = X @ rng.normal(size=p) + rng.normal(size=n)
            lam = float(rng.uniform(0.05, 0.8)) * lambda_max(X, y)
            fit = LassoRegression(lam=lam).fit(X, y)
            Xc = X - X.mean(axis=0)
            resid = (y - y.mean()) - Xc @ fit.coef_
            grad = 2.0 * Xc.T @ resid
            for j in range(p):
                if fit.coef_[j] == 0.0:
                    assert abs(grad[j]) <= lam + 1e-6
                else:
                    assert grad[j] == pytest.approx(
                        lam * np.sign(fit.coef_[j]), abs=1e-6)


class TestLambdaPath:
    def test_lambda_max_formula_single_column(self):
        # centered column with correlation 5 against the centered target
        x = np.array([1.0, -1.0])
        y = np.array([6.0, -4.0])  # y - mean = [5, -5]; x^T (y - ybar) = 10... scaled below
        x_col = x.reshape(-1, 1)
        xc = x - x.mean()
        expected = 2.0 * abs(float(xc @ (y - y.mean())))
        assert lambda_max(x_col, y) == pytest.approx(expected, abs=1e-12)

    def test_constant_target_gives_zero(self):
        X = np.arange(6.0).reshape(3, 2)
        assert lambda_max(X, np.full(3, 4.2)) == 0.0

    def test_budget_monotone_along_grid(self, rng):
        X = rng.normal(size=(40, 5))
        y = X @ rng.normal(size=5) + rng.normal(size=40)
        lam_top = lambda_max(X, y)
        budgets = []
        for lam in np.linspace(0.0, lam_top, 20):
            budgets.append(LassoRegression(lam=float(lam)).fit(X, y).budget_)
        diffs = np.diff(budgets)  # increasing lam shrinks the budget
        assert np.all(diffs <= 1e-8)


class TestSelection:
    def test_selects_small_lambda_for_clean_signal(self, rng):
        X = rng.normal(size=(100, 3))
        y = X @ np.array([2.0, -1.0, 0.5]) + 0.01 * rng.normal(size=100)
        lam, records = select_lambda(X, y)
        assert lam < 0.01 * lambda_max(X, y)
        assert len(records) == 50

    def test_too_few_rows(self):
        with pytest.raises(ConfigError):
            select_lambda(np.eye(2), np.ones(2))

    def test_auto_lambda_fit_populates_lambda(self, rng):
        X = rng.normal(size=(60, 2))
        y = X @ np.array([1.0, 0.0]) + 0.1 * rng.normal(size=60)
        fit = LassoRegression().fit(X, y)
        assert fit.lambda_ >= 0.0
        assert fit.converged_


class TestInfluenceWeights:
    def _panel(self, columns):
        n = len(next(iter(columns.values())))
        return AlignedPanel(dates=weekdays(n),
                            columns={k: np.asarray(v, float)
                                     for k, v in columns.items()})

    def test_copycat_predictor_wins(self, rng):
        base = rng.normal(size=80).cumsum() + 50.0
        other = rng.normal(size=80)
        third = rng.normal(size=80)
        panel = self._panel({"tgt": base, "copy": base,
                             "noise1": other, "noise2": third})
        model = influence_weights(panel, "tgt", lam=1e-4)
        weights = dict(model.coefficients())
        assert weights["copy"] == pytest.approx(1.0, abs=1e-2)
        assert abs(weights["noise1"]) < 1e-2
        assert abs(weights["noise2"]) < 1e-2

    def test_label_order_preserved(self, rng):
        panel = self._panel({"b": rng.normal(size=30),
                             "tgt": rng.normal(size=30),
                             "a": rng.normal(size=30)})
        model = influence_weights(panel, "tgt", lam=0.1)
        assert model.feature_labels_ == ("b", "a")

    def test_missing_target(self, rng):
        panel = self._panel({"a": rng.normal(size=10),
                             "b": rng.normal(size=10)})
        with pytest.raises(InputError):
            influence_weights(panel, "zzz", lam=0.1)

    def test_to_dict_schema(self, rng):
        panel = self._panel({"tgt": rng.normal(size=40),
                             "a": rng.normal(size=40)})
        model = influence_weights(panel, "tgt", lam=0.2)
        payload = model.to_dict()
        assert set(payload) == {"intercept", "coefficients", "lambda",
                                "budget", "converged", "sweeps_used",
                                "objective"}
        assert payload["coefficients"][0]["label"] == "a"


class TestDesignMatrixInput:
    def test_labels_flow_through(self, rng):
        X = DesignMatrix(rng.normal(size=(20, 2)), ("alpha", "beta"))
        fit = LassoRegression(lam=0.1).fit(X, rng.normal(size=20))
        assert fit.feature_labels_ == ("alpha", "beta")
