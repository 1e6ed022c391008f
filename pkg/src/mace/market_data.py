"""Daily OHLCV ingestion and derived per-ticker series.

A loaded MarketFrame carries, per ticker and day: raw bars, one-day log
returns on adjusted close, 20-day average daily volume, trailing daily
return volatility, and a configurable set of technical indicators. The
frame is immutable after load; any number of environment instances may
read it concurrently.

Adjusted close drives returns; unadjusted close drives notional and
volume arithmetic, since execution costs depend on actually traded prices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import DataError, WarmupError
from .indicators import DEFAULT_INDICATORS, compute_indicator_panel

REQUIRED_COLUMNS = ("date", "ticker", "open", "high", "low", "close", "adj_close", "volume")

ADV_WINDOW = 20
#: Estimation window for daily return volatility. The choice mirrors the ADV
#: window so all derived fields share one warm-up horizon.
SIGMA_WINDOW = 20


@dataclass(frozen=True)
class Bar:
    """One ticker-day of OHLCV data."""

    date: str
    open: float
    high: float
    low: float
    close: float
    adj_close: float
    volume: float

    def validate(self, row_label: str) -> None:
        prices = (self.open, self.high, self.low, self.close, self.adj_close)
        if any(not math.isfinite(p) or p <= 0.0 for p in prices):
            raise DataError(f"non-positive or non-finite price in row {row_label}")
        if not math.isfinite(self.volume) or self.volume < 0.0:
            raise DataError(f"negative or non-finite volume in row {row_label}")
        if self.high < max(self.open, self.close) - 1e-9:
            raise DataError(f"high below open/close in row {row_label}")
        if self.low > min(self.open, self.close) + 1e-9:
            raise DataError(f"low above open/close in row {row_label}")


@dataclass
class MarketFrame:
    """Aligned per-ticker daily series plus derived fields.

    All 2-D arrays are shaped (n_tickers, n_days) and ordered to match
    `tickers` and `calendar`. Entries are NaN on days before the relevant
    warm-up window is full.
    """

    tickers: tuple[str, ...]
    calendar: tuple[str, ...]
    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    adj_close: np.ndarray
    volume: np.ndarray
    log_returns: np.ndarray = field(init=False)
    adv20: np.ndarray = field(init=False)
    sigma: np.ndarray = field(init=False)
    indicators: dict[str, np.ndarray] = field(init=False)

    def __post_init__(self) -> None:
        self.log_returns = np.pad(
            np.log(self.adj_close[:, 1:] / self.adj_close[:, :-1]),
            ((0, 0), (1, 0)),
            constant_values=np.nan,
        )
        self.adv20 = _rolling_mean(self.volume, ADV_WINDOW)
        # sigma at day t uses the SIGMA_WINDOW log returns ending at t; the
        # first return exists at day 1, so sigma is defined from SIGMA_WINDOW.
        self.sigma = np.full_like(self.volume, np.nan)
        if self.n_days > SIGMA_WINDOW:
            sw = np.lib.stride_tricks.sliding_window_view(
                self.log_returns[:, 1:], SIGMA_WINDOW, axis=1
            )
            self.sigma[:, SIGMA_WINDOW:] = sw.std(axis=2, ddof=1)
        self.indicators = {name: np.empty_like(self.close) for name in DEFAULT_INDICATORS}
        for i in range(self.n_tickers):
            panel = compute_indicator_panel(self.high[i], self.low[i], self.close[i])
            for name, series in panel.items():
                self.indicators[name][i] = series
        for arr in (self.open, self.high, self.low, self.close, self.adj_close,
                    self.volume, self.log_returns, self.adv20, self.sigma,
                    *self.indicators.values()):
            arr.setflags(write=False)

    @property
    def n_tickers(self) -> int:
        return len(self.tickers)

    @property
    def n_days(self) -> int:
        return len(self.calendar)

    def ticker_index(self, ticker: str) -> int:
        try:
            return self.tickers.index(ticker)
        except ValueError:
            raise DataError(f"unknown ticker {ticker!r}") from None

    def day_index(self, day: int | str) -> int:
        if isinstance(day, str):
            try:
                return self.calendar.index(day)
            except ValueError:
                raise DataError(f"day {day!r} not in calendar") from None
        if not 0 <= day < self.n_days:
            raise DataError(f"day index {day} out of range [0, {self.n_days})")
        return day

    def first_usable_index(self, indicator_names: tuple[str, ...] = DEFAULT_INDICATORS) -> int:
        """First day on which every observation input is defined for all tickers.

        Covers log returns (day 1), adv20, sigma, and the selected indicators.
        """
        first = max(1, ADV_WINDOW - 1, SIGMA_WINDOW)
        for name in indicator_names:
            if name not in self.indicators:
                raise DataError(f"unknown indicator {name!r}; known: {sorted(self.indicators)}")
            defined = np.all(np.isfinite(self.indicators[name]), axis=0)
            idx = int(np.argmax(defined))
            if not defined[idx]:
                raise WarmupError(f"indicator {name!r} never becomes defined on this history")
            first = max(first, idx)
        if first >= self.n_days:
            raise WarmupError(
                f"history of {self.n_days} days too short for warm-up ({first} days needed)"
            )
        return first


def _rolling_mean(values: np.ndarray, window: int) -> np.ndarray:
    out = np.full_like(values, np.nan, dtype=float)
    if values.shape[1] >= window:
        sw = np.lib.stride_tricks.sliding_window_view(values, window, axis=1)
        out[:, window - 1 :] = sw.mean(axis=2)
    return out


def load_ohlcv(source, tickers: list[str]) -> MarketFrame:
    """Load a tidy OHLCV CSV into a MarketFrame.

    The file must carry the header date,ticker,open,high,low,close,
    adj_close,volume with ISO-8601 dates. Every requested ticker must be
    present on every day any of them trades; missing (ticker, day) pairs
    are an ingestion error rather than silently forward-filled, because a
    filled gap corrupts ADV and impact costs downstream.
    """
    if not tickers:
        raise DataError("at least one ticker must be requested")
    try:
        df = pd.read_csv(source, dtype={"date": str, "ticker": str})
    except FileNotFoundError:
        raise DataError(f"data file not found: {source}") from None
    missing_cols = [c for c in REQUIRED_COLUMNS if c not in df.columns]
    if missing_cols:
        raise DataError(f"missing required column(s): {', '.join(missing_cols)}")

    df = df[df["ticker"].isin(tickers)]
    present = set(df["ticker"])
    absent = [t for t in tickers if t not in present]
    if absent:
        raise DataError(f"requested ticker(s) not in file: {', '.join(absent)}")

    if df.duplicated(subset=["date", "ticker"]).any():
        dupes = df[df.duplicated(subset=["date", "ticker"])]
        first = dupes.iloc[0]
        raise DataError(f"duplicate row for ({first['ticker']}, {first['date']})")

    calendar = tuple(sorted(df["date"].unique()))
    missing_pairs = []
    per_ticker: dict[str, pd.DataFrame] = {}
    for t in tickers:
        sub = df[df["ticker"] == t].sort_values("date").set_index("date")
        have = set(sub.index)
        missing_pairs.extend((t, d) for d in calendar if d not in have)
        per_ticker[t] = sub
    if missing_pairs:
        shown = ", ".join(f"({t}, {d})" for t, d in missing_pairs[:10])
        more = "" if len(missing_pairs) <= 10 else f" and {len(missing_pairs) - 10} more"
        raise DataError(f"mismatched calendars; missing rows: {shown}{more}")

    n, d = len(tickers), len(calendar)
    arrays = {name: np.empty((n, d)) for name in ("open", "high", "low", "close", "adj_close", "volume")}
    for i, t in enumerate(tickers):
        sub = per_ticker[t]
        for j, day in enumerate(calendar):
            row = sub.loc[day]
            bar = Bar(
                date=day,
                open=float(row["open"]),
                high=float(row["high"]),
                low=float(row["low"]),
                close=float(row["close"]),
                adj_close=float(row["adj_close"]),
                volume=float(row["volume"]),
            )
            bar.validate(f"({t}, {day})")
            for name in arrays:
                arrays[name][i, j] = getattr(bar, name)

    return MarketFrame(tickers=tuple(tickers), calendar=calendar, **arrays)


def log_return(frame: MarketFrame, ticker: str, day: int | str) -> float:
    """One-day log return of adjusted close: ln(P_t / P_{t-1})."""
    i = frame.ticker_index(ticker)
    j = frame.day_index(day)
    if j == 0:
        raise WarmupError("log return undefined on the first calendar day")
    return float(frame.log_returns[i, j])


def compute_adv20(volumes) -> float:
    """Arithmetic mean of exactly the last 20 daily volumes."""
    v = np.asarray(volumes, dtype=float)
    if v.size != ADV_WINDOW:
        raise WarmupError(f"adv20 needs exactly {ADV_WINDOW} volumes, got {v.size}")
    if np.any(v < 0):
        raise DataError("negative volume in adv20 window")
    return float(v.mean())


def compute_sigma(returns, window: int = SIGMA_WINDOW) -> float:
    """Sample standard deviation (n-1 denominator) of a trailing return window."""
    r = np.asarray(returns, dtype=float)
    if window < 2 or r.size < window:
        raise WarmupError(f"sigma needs at least {max(window, 2)} observations, got {r.size}")
    return float(np.std(r[-window:], ddof=1))
