"""Shared fixtures: deterministic market-data builders and env helpers."""

from __future__ import annotations

import io

import numpy as np
import pandas as pd
import pytest

from mace.market_data import MarketFrame, load_ohlcv
from mace.synthetic import make_ohlcv_table

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid and report.when == "call":
        _acceptance_results.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion."""
    if not _acceptance_results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _acceptance_results:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"  {status}  {name}")

#: Indicator subset with a short warm-up, used by fixtures that need more
#: tradable days than a 60-day-warm-up set would leave.
SHORT_INDICATORS = ("macd", "rsi_14")


def frame_from_table(table: pd.DataFrame, tickers: list[str]) -> MarketFrame:
    buf = io.StringIO()
    table.to_csv(buf, index=False)
    buf.seek(0)
    return load_ohlcv(buf, tickers)


def constant_table(prices: dict[str, float], n_days: int, volume: float = 1_000_000.0) -> pd.DataFrame:
    """Flat price series per ticker: every OHLC field equals the given price."""
    dates = [d.date().isoformat() for d in pd.bdate_range("2021-01-04", periods=n_days)]
    rows = [
        {
            "date": day, "ticker": t, "open": p, "high": p, "low": p,
            "close": p, "adj_close": p, "volume": volume,
        }
        for t, p in prices.items()
        for day in dates
    ]
    return pd.DataFrame(rows)


def zigzag_table(
    tickers: list[str], n_days: int, ret: float = 0.02,
    volume: float = 1500.0, start_price: float = 100.0,
) -> pd.DataFrame:
    """Deterministic alternating +/-`ret` log returns, constant volume.

    Gives every ticker a stable trailing volatility close to `ret` without
    random number generators, so cost arithmetic in tests is predictable.
    """
    dates = [d.date().isoformat() for d in pd.bdate_range("2021-01-04", periods=n_days)]
    rows = []
    for k, t in enumerate(tickers):
        close = start_price * (1.0 + 0.5 * k)
        for i, day in enumerate(dates):
            prev = close
            close = prev * float(np.exp(ret if i % 2 == 0 else -ret))
            rows.append(
                {
                    "date": day, "ticker": t, "open": prev,
                    "high": max(prev, close), "low": min(prev, close),
                    "close": close, "adj_close": close, "volume": volume,
                }
            )
    return pd.DataFrame(rows)


@pytest.fixture(scope="session")
def small_frame() -> MarketFrame:
    """3 tickers x 120 random-walk days; full indicator set usable from day 59."""
    tickers = ["AAA", "BBB", "CCC"]
    return frame_from_table(make_ohlcv_table(tickers, 120, seed=3), tickers)


@pytest.fixture(scope="session")
def flat_frame() -> MarketFrame:
    """3 tickers x 60 constant-price days for hand-checkable ledgers."""
    prices = {"AAA": 50.0, "BBB": 100.0, "CCC": 20.0}
    return frame_from_table(constant_table(prices, 60), list(prices))
