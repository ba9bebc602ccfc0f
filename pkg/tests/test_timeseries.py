from datetime import date

import numpy as np
import pytest

from lagcast.errors import (AlignmentError, InputError, ParseError, SplitError,
                            ValidationError)
from lagcast.timeseries import (AlignedPanel, DesignMatrix, align_inner,
                                chronological_split, parse_ohlcv_csv)

from conftest import frame_from_close, weekdays

HEADER = "Date,Open,High,Low,Close,Volume\n"


class TestParse:
    def test_single_row(self):
        frame = parse_ohlcv_csv(HEADER + "2020-01-02,10,12,9,11,1000\n", "x")
        assert frame.dates == (date(2020, 1, 2),)
        assert frame.open[0] == 10 and frame.close[0] == 11
        assert frame.volume[0] == 1000
        assert not frame.volume_missing

    def test_out_of_order_rows_sorted(self):
        text = (HEADER
                + "2020-01-03,11,13,10,12,500\n"
                + "2020-01-02,10,12,9,11,1000\n")
        shuffled = parse_ohlcv_csv(text, "x")
        ordered = parse_ohlcv_csv(
            HEADER + "2020-01-02,10,12,9,11,1000\n2020-01-03,11,13,10,12,500\n",
            "x")
        assert shuffled.dates == ordered.dates
        assert np.array_equal(shuffled.close, ordered.close)

    def test_low_above_open_rejected(self):
        with pytest.raises(ValidationError, match="OHLC"):
            parse_ohlcv_csv(HEADER + "2020-01-02,10,14,13,11,1000\n", "x")

    def test_duplicate_date_rejected(self):
        text = (HEADER
                + "2020-01-02,10,12,9,11,1000\n"
                + "2020-01-02,10,12,9,11,900\n")
        with pytest.raises(ValidationError, match="duplicate"):
            parse_ohlcv_csv(text, "x")

    def test_malformed_date_reports_line(self):
        text = HEADER + "2020-01-02,10,12,9,11,1\n2020-13-40,10,12,9,11,1\n"
        with pytest.raises(ParseError, match="line 3"):
            parse_ohlcv_csv(text, "x")

    def test_non_numeric_price_reports_line(self):
        with pytest.raises(ParseError, match="line 2.*close"):
            parse_ohlcv_csv(HEADER + "2020-01-02,10,12,9,oops,1000\n", "x")

    def test_missing_header_column(self):
        with pytest.raises(ParseError, match="close"):
            parse_ohlcv_csv("Date,Open,High,Low,Volume\n", "x")

    def test_us_date_format_autodetected(self):
        frame = parse_ohlcv_csv(HEADER + "01/02/2020,10,12,9,11,1000\n", "x")
        assert frame.dates == (date(2020, 1, 2),)

    def test_extra_columns_ignored(self):
        text = ("Date,Open,High,Low,Close,Adj Close,Volume\n"
                "2020-01-02,10,12,9,11,10.5,1000\n")
        frame = parse_ohlcv_csv(text, "x")
        assert frame.close[0] == 11

    def test_missing_volume_flagged_and_zeroed(self):
        frame = parse_ohlcv_csv("Date,Open,High,Low,Close\n"
                                "2020-01-02,10,12,9,11\n", "x")
        assert frame.volume_missing
        assert frame.volume[0] == 0.0

    def test_case_insensitive_header(self):
        frame = parse_ohlcv_csv("DATE,open,HIGH,Low,CLOSE,volume\n"
                                "2020-01-02,10,12,9,11,3\n", "x")
        assert frame.close[0] == 11

    def test_nonpositive_price_rejected(self):
        with pytest.raises(ValidationError, match="price"):
            parse_ohlcv_csv(HEADER + "2020-01-02,10,12,-1,11,1000\n", "x")

    def test_roundtrip_identity(self, rng):
        closes = 50.0 + np.cumsum(rng.normal(size=40))
        closes = np.abs(closes) + 1.0
        frame = frame_from_close(closes, "rt")
        again = parse_ohlcv_csv(frame.to_csv(), "rt")
        assert again.dates == frame.dates
        for ch in ("open", "high", "low", "close", "volume"):
            assert np.array_equal(frame.channel(ch), again.channel(ch)), ch


class TestAlign:
    def test_intersection(self):
        a = frame_from_close([10, 11, 12], "a")
        b_dates = a.dates[1:] + (date(2021, 1, 4),)
        b = frame_from_close([20, 21, 22], "b")
        b = type(b)(instrument="b", dates=b_dates, open=b.open, high=b.high,
                    low=b.low, close=b.close, volume=b.volume)
        panel = align_inner([a, b])
        assert panel.dates == a.dates[1:]
        assert np.array_equal(panel.columns["a"], a.close[1:])
        assert np.array_equal(panel.columns["b"], b.close[:2])

    def test_identical_calendars(self):
        a = frame_from_close([10, 11, 12], "a")
        b = frame_from_close([5, 6, 7], "b")
        panel = align_inner([a, b])
        assert panel.dates == a.dates

    def test_disjoint_calendars_error_reports_ranges(self):
        a = frame_from_close([10, 11], "a")
        b = frame_from_close([5, 6], "b")
        b = type(b)(instrument="b", dates=weekdays(2, date(2021, 6, 7)),
                    open=b.open, high=b.high, low=b.low, close=b.close,
                    volume=b.volume)
        with pytest.raises(AlignmentError) as err:
            align_inner([a, b])
        message = str(err.value)
        assert "2020-01-06" in message and "2021-06-07" in message

    def test_channel_selection(self):
        a = frame_from_close([10, 11], "a")
        b = frame_from_close([5, 6], "b")
        panel = align_inner([a, b], channel="open")
        assert np.array_equal(panel.columns["a"], a.open)

    def test_order_insensitive(self):
        a = frame_from_close([10, 11, 12], "a")
        b = frame_from_close([5, 6, 7], "b")
        p1 = align_inner([a, b])
        p2 = align_inner([b, a])
        assert p1.dates == p2.dates
        assert np.array_equal(p1.columns["a"], p2.columns["a"])
        assert np.array_equal(p1.columns["b"], p2.columns["b"])

    def test_single_frame_rejected(self):
        with pytest.raises(InputError):
            align_inner([frame_from_close([1, 2], "a")])


class TestSplit:
    def test_floor_80(self):
        panel = AlignedPanel(dates=weekdays(10),
                             columns={"a": np.arange(10.0)})
        head, tail = chronological_split(panel, 0.8)
        assert len(head) == 8 and len(tail) == 2

    def test_floor_half_of_five(self):
        panel = AlignedPanel(dates=weekdays(5), columns={"a": np.arange(5.0)})
        head, tail = chronological_split(panel, 0.5)
        assert len(head) == 2 and len(tail) == 3

    def test_empty_head_rejected(self):
        panel = AlignedPanel(dates=weekdays(2), columns={"a": np.arange(2.0)})
        with pytest.raises(SplitError):
            chronological_split(panel, 0.1)

    def test_no_leakage_and_order(self, rng):
        for n in (3, 7, 20, 51):
            frac = float(rng.uniform(0.15, 0.85))
            matrix = DesignMatrix(rng.normal(size=(n, 2)), ("a", "b"),
                                  dates=weekdays(n))
            try:
                head, tail = chronological_split(matrix, frac)
            except SplitError:
                continue
            assert head.n_rows + tail.n_rows == n
            assert max(head.dates) < min(tail.dates)
            rebuilt = np.vstack([head.values, tail.values])
            assert np.array_equal(rebuilt, matrix.values)

    def test_fraction_bounds(self):
        panel = AlignedPanel(dates=weekdays(4), columns={"a": np.arange(4.0)})
        for bad in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(SplitError):
                chronological_split(panel, bad)


class TestImmutability:
    def test_frame_arrays_readonly(self):
        frame = frame_from_close([10, 11, 12])
        with pytest.raises(ValueError):
            frame.close[0] = 99.0

    def test_panel_csv_shape(self):
        a = frame_from_close([10, 11], "a")
        b = frame_from_close([5, 6], "b")
        text = align_inner([a, b]).to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "Date,a,b"
        assert len(lines) == 3
