"""Ingestion, derived series, and their brute-force oracles."""

import math

import numpy as np
import pytest

from mace.errors import DataError, WarmupError
from mace.market_data import (
    ADV_WINDOW, compute_adv20, compute_sigma, load_ohlcv, log_return,
)
from mace.synthetic import make_ohlcv_table

from conftest import constant_table, frame_from_table


def load_table(table, tickers):
    return frame_from_table(table, tickers)


class TestLoadOhlcv:
    def test_thirty_rows_give_thirty_days_with_adv_from_day_twenty(self):
        frame = load_table(make_ohlcv_table(["AAA"], 30, seed=1), ["AAA"])
        assert frame.n_days == 30
        assert np.all(np.isnan(frame.adv20[0, : ADV_WINDOW - 1]))
        assert np.all(np.isfinite(frame.adv20[0, ADV_WINDOW - 1 :]))

    def test_missing_volume_column_is_a_schema_error(self):
        table = make_ohlcv_table(["AAA"], 10, seed=1).drop(columns=["volume"])
        with pytest.raises(DataError, match="volume"):
            load_table(table, ["AAA"])

    def test_absent_ticker_is_reported_by_name(self):
        table = make_ohlcv_table(["AAA"], 10, seed=1)
        with pytest.raises(DataError, match="ZZZ"):
            load_table(table, ["AAA", "ZZZ"])

    def test_mismatched_calendars_list_missing_pairs(self):
        table = make_ohlcv_table(["AAA", "BBB"], 10, seed=1)
        dropped = table[~((table["ticker"] == "BBB") & (table["date"] == table["date"].iloc[3]))]
        with pytest.raises(DataError, match=r"\(BBB, 2020-01-06\)"):
            load_table(dropped, ["AAA", "BBB"])

    def test_non_positive_price_names_the_row(self):
        table = make_ohlcv_table(["AAA"], 10, seed=1)
        table.loc[4, "close"] = -1.0
        with pytest.raises(DataError, match=r"\(AAA, "):
            load_table(table, ["AAA"])

    def test_duplicate_rows_rejected(self):
        import pandas as pd

        table = make_ohlcv_table(["AAA"], 10, seed=1)
        table = pd.concat([table, table.iloc[[2]]], ignore_index=True)
        with pytest.raises(DataError, match="duplicate"):
            load_table(table, ["AAA"])

    def test_missing_file_is_a_data_error(self):
        with pytest.raises(DataError, match="not found"):
            load_ohlcv("/nonexistent/file.csv", ["AAA"])

    def test_frame_arrays_are_immutable(self, small_frame):
        with pytest.raises(ValueError):
            small_frame.close[0, 0] = 1.0


class TestLogReturn:
    def test_flat_price_gives_zero(self, flat_frame):
        assert log_return(flat_frame, "AAA", 5) == 0.0

    def test_ten_percent_move(self):
        table = constant_table({"AAA": 100.0}, 5)
        table.loc[1:, ["open", "high", "low", "close", "adj_close"]] = 110.0
        frame = load_table(table, ["AAA"])
        assert log_return(frame, "AAA", 1) == pytest.approx(math.log(1.1), rel=1e-12)
        assert log_return(frame, "AAA", 1) == pytest.approx(0.0953102, abs=1e-7)

    def test_first_day_is_undefined(self, flat_frame):
        with pytest.raises(WarmupError):
            log_return(flat_frame, "AAA", 0)

    def test_day_lookup_by_date_string(self, flat_frame):
        day = flat_frame.calendar[3]
        assert log_return(flat_frame, "AAA", day) == 0.0


class TestAdv20:
    def test_constant_volumes(self):
        assert compute_adv20([1_000_000.0] * 20) == 1_000_000.0

    def test_half_zero_half_double(self):
        assert compute_adv20([0.0] * 10 + [2_000_000.0] * 10) == 1_000_000.0

    def test_nineteen_values_is_a_warmup_error(self):
        with pytest.raises(WarmupError):
            compute_adv20([1.0] * 19)

    def test_frame_adv_matches_brute_force(self, small_frame):
        vol = small_frame.volume
        for t in range(small_frame.n_tickers):
            for d in range(ADV_WINDOW - 1, small_frame.n_days):
                expected = vol[t, d - ADV_WINDOW + 1 : d + 1].mean()
                assert small_frame.adv20[t, d] == pytest.approx(expected, rel=1e-12)


class TestSigma:
    def test_constant_returns_give_zero(self):
        assert compute_sigma([0.01] * 20, window=20) == pytest.approx(0.0, abs=1e-15)

    def test_two_point_window(self):
        assert compute_sigma([0.01, -0.01], window=2) == pytest.approx(0.0141421, abs=1e-7)

    def test_single_observation_is_a_warmup_error(self):
        with pytest.raises(WarmupError):
            compute_sigma([0.01], window=2)

    def test_invariant_under_price_rescaling(self):
        table = make_ohlcv_table(["AAA"], 40, seed=5)
        scaled = table.copy()
        for col in ("open", "high", "low", "close", "adj_close"):
            scaled[col] = scaled[col] * 3.7
        f1 = load_table(table, ["AAA"])
        f2 = load_table(scaled, ["AAA"])
        np.testing.assert_allclose(f1.sigma[0, 20:], f2.sigma[0, 20:], rtol=1e-12)

    def test_frame_sigma_matches_standalone(self, small_frame):
        t, d = 1, 40
        window = small_frame.log_returns[t, d - 19 : d + 1]
        assert small_frame.sigma[t, d] == pytest.approx(compute_sigma(window), rel=1e-12)


class TestWarmup:
    def test_first_usable_day_with_full_set_needs_sixty_days(self, small_frame):
        assert small_frame.first_usable_index() == 59

    def test_first_usable_day_without_indicators(self, small_frame):
        assert small_frame.first_usable_index(()) == 20

    def test_too_short_history_raises(self):
        frame = load_table(make_ohlcv_table(["AAA"], 30, seed=1), ["AAA"])
        with pytest.raises(WarmupError):
            frame.first_usable_index()

    def test_unknown_indicator_name_rejected(self, small_frame):
        with pytest.raises(DataError, match="unknown indicator"):
            small_frame.first_usable_index(("nope",))
