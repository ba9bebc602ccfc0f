import numpy as np
import pytest

from lagcast.errors import DegenerateColumnError, InputError
from lagcast.pca import jacobi_eigh
from lagcast.stats import (CorrMatrix, Standardizer, correlation_matrix,
                           log_returns, pearson, standardize)
from lagcast.timeseries import AlignedPanel, DesignMatrix

from conftest import weekdays


class TestStandardizer:
    def test_column_1_2_3(self):
        scaler = Standardizer().fit(np.array([[1.0], [2.0], [3.0]]))
        out = scaler.transform(np.array([[1.0], [2.0], [3.0]]))
        assert abs(out.mean()) < 1e-10
        assert abs(out.std(ddof=1) - 1.0) < 1e-10

    def test_idempotent_on_standardized(self, rng):
        X = rng.normal(size=(30, 3))
        once = Standardizer().fit_transform(X)
        twice = Standardizer().fit_transform(once)
        assert np.allclose(once, twice, atol=1e-10)

    def test_constant_column_named(self):
        X = DesignMatrix(np.column_stack([np.arange(3.0), [5.0, 5.0, 5.0]]),
                         ("a", "flat"))
        with pytest.raises(DegenerateColumnError, match="flat"):
            standardize(X)

    def test_exact_inversion(self, rng):
        X = rng.normal(size=(20, 4)) * 7.0 + 3.0
        scaler = Standardizer().fit(X)
        assert np.allclose(scaler.inverse_transform(scaler.transform(X)), X,
                           atol=1e-12)

    def test_sklearn_params_roundtrip(self):
        assert Standardizer().get_params() == {}


class TestPearson:
    def test_perfect_linear(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        assert pearson(x, 2 * x + 1) == pytest.approx(1.0)

    def test_perfect_anticorrelation(self):
        x = np.array([1.0, 2.0, 3.0])
        assert pearson(x, -x) == pytest.approx(-1.0)

    def test_hand_computed_value(self):
        # cov = 3/2, sx = 1, sy = sqrt(7/3) with the n-1 convention
        expected = 1.5 / np.sqrt(7.0 / 3.0)
        assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(expected, abs=1e-12)
        assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.9820, abs=5e-5)

    def test_symmetry_and_affine_invariance(self, rng):
        for _ in range(25):
            n = int(rng.integers(3, 40))
            x = rng.normal(size=n)
            y = rng.normal(size=n)
            r = pearson(x, y)
            assert pearson(y, x) == pytest.approx(r, abs=1e-12)
            a = float(rng.uniform(0.1, 5.0)) * float(rng.choice([-1.0, 1.0]))
            b = float(rng.normal())
            assert pearson(a * x + b, y) == pytest.approx(np.sign(a) * r, abs=1e-10)

    def test_constant_input_rejected(self):
        with pytest.raises(DegenerateColumnError):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            pearson([1.0, 2.0], [1.0, 2.0, 3.0])


def _panel(columns: dict) -> AlignedPanel:
    n = len(next(iter(columns.values())))
    return AlignedPanel(dates=weekdays(n),
                        columns={k: np.asarray(v, float) for k, v in columns.items()})


class TestCorrelationMatrix:
    def test_identical_columns(self):
        panel = _panel({"a": [1, 2, 3], "b": [1, 2, 3]})
        corr = correlation_matrix(panel)
        assert np.allclose(corr.values, np.ones((2, 2)))

    def test_negated_column(self):
        panel = _panel({"a": [1, 2, 4], "b": [5, 6, 9], "c": [-1, -2, -4]})
        corr = correlation_matrix(panel)
        assert corr.entry("a", "c") == pytest.approx(-1.0)

    def test_invariants_on_random_panels(self, rng):
        for _ in range(50):
            n = int(rng.integers(5, 60))
            p = int(rng.integers(2, 6))
            data = rng.normal(size=(n, p)) @ rng.normal(size=(p, p))
            panel = _panel({f"c{j}": data[:, j] for j in range(p)})
            corr = correlation_matrix(panel)
            v = corr.values
            assert np.array_equal(v, v.T)
            assert np.allclose(np.diag(v), 1.0)
            assert np.all(v >= -1.0) and np.all(v <= 1.0)
            evals, _ = jacobi_eigh(v)
            assert float(np.min(evals)) > -1e-8

    def test_scale_invariance(self, rng):
        data = rng.normal(size=(40, 3))
        panel = _panel({f"c{j}": data[:, j] for j in range(3)})
        scaled = _panel({f"c{j}": 3.5 * data[:, j] + j for j in range(3)})
        raw = correlation_matrix(panel).values
        after = correlation_matrix(scaled).values
        assert np.allclose(raw, after, atol=1e-10)

    def test_constant_column_named(self):
        panel = _panel({"a": [1, 2, 3], "flat": [7, 7, 7]})
        with pytest.raises(DegenerateColumnError, match="flat"):
            correlation_matrix(panel)

    def test_csv_layout(self):
        corr = CorrMatrix(labels=("a", "b"),
                          values=np.array([[1.0, 0.5], [0.5, 1.0]]))
        lines = corr.to_csv().strip().split("\n")
        assert lines[0] == ",a,b"
        assert lines[1].startswith("a,1.000000,0.500000")


class TestLogReturns:
    def test_shapes_and_values(self):
        panel = _panel({"a": [100.0, 110.0, 99.0]})
        out = log_returns(panel)
        assert len(out) == 2
        assert out.columns["a"][0] == pytest.approx(np.log(1.1))

    def test_nonpositive_rejected(self):
        panel = _panel({"a": [1.0, -1.0, 2.0]})
        with pytest.raises(InputError):
            log_returns(panel)
