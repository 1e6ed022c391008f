"""Technical indicators over daily OHLCV arrays.

All functions take 1-D float arrays indexed by trading day and return arrays
of the same length with NaN on days where the indicator's warm-up window is
not yet full. Definitions are the common textbook ones:

- MACD: EMA(12) - EMA(26) of close, signal = EMA(9) of the MACD line,
  histogram = MACD - signal. EMAs are recursive (alpha = 2/(span+1)) and
  seeded with the first observation, so MACD is defined from day 0.
- RSI(14): Wilder smoothing. Zero price range over the window maps to the
  neutral 50 so observation vectors stay finite.
- CCI(20): (TP - SMA(TP)) / (0.015 * mean |TP - SMA(TP)|) with typical
  price TP = (high + low + close) / 3; zero mean deviation maps to 0.
- Bollinger(20, 2): middle = SMA(20) of close, bands at +/- 2 population
  standard deviations, bandwidth = (upper - lower) / middle.
- SMA(30), SMA(60): plain rolling means of close.
"""

from __future__ import annotations

import numpy as np

DEFAULT_INDICATORS = (
    "macd",
    "macd_signal",
    "macd_hist",
    "rsi_14",
    "cci_20",
    "boll_mid",
    "boll_ub",
    "boll_lb",
    "boll_bw",
    "sma_30",
    "sma_60",
)


def ema(values: np.ndarray, span: int) -> np.ndarray:
    """Recursive exponential moving average seeded with the first value."""
    values = np.asarray(values, dtype=float)
    alpha = 2.0 / (span + 1.0)
    out = np.empty_like(values)
    if values.size == 0:
        return out
    out[0] = values[0]
    for t in range(1, values.size):
        out[t] = (1.0 - alpha) * out[t - 1] + alpha * values[t]
    return out


def sma(values: np.ndarray, window: int) -> np.ndarray:
    """Rolling mean; NaN for the first window-1 days."""
    values = np.asarray(values, dtype=float)
    out = np.full(values.size, np.nan)
    if values.size >= window:
        sw = np.lib.stride_tricks.sliding_window_view(values, window)
        out[window - 1 :] = sw.mean(axis=1)
    return out


def rolling_std(values: np.ndarray, window: int, ddof: int = 0) -> np.ndarray:
    """Rolling standard deviation; NaN for the first window-1 days."""
    values = np.asarray(values, dtype=float)
    out = np.full(values.size, np.nan)
    if values.size >= window:
        sw = np.lib.stride_tricks.sliding_window_view(values, window)
        out[window - 1 :] = sw.std(axis=1, ddof=ddof)
    return out


def macd(close: np.ndarray, fast: int = 12, slow: int = 26, signal: int = 9):
    """Return (macd_line, signal_line, histogram)."""
    line = ema(close, fast) - ema(close, slow)
    sig = ema(line, signal)
    return line, sig, line - sig


def rsi(close: np.ndarray, period: int = 14) -> np.ndarray:
    """Wilder RSI; defined from day `period` onward."""
    close = np.asarray(close, dtype=float)
    out = np.full(close.size, np.nan)
    if close.size <= period:
        return out
    delta = np.diff(close)
    gains = np.where(delta > 0, delta, 0.0)
    losses = np.where(delta < 0, -delta, 0.0)
    avg_gain = gains[:period].mean()
    avg_loss = losses[:period].mean()
    out[period] = _rsi_value(avg_gain, avg_loss)
    for t in range(period + 1, close.size):
        avg_gain = (avg_gain * (period - 1) + gains[t - 1]) / period
        avg_loss = (avg_loss * (period - 1) + losses[t - 1]) / period
        out[t] = _rsi_value(avg_gain, avg_loss)
    return out


def _rsi_value(avg_gain: float, avg_loss: float) -> float:
    if avg_loss == 0.0 and avg_gain == 0.0:
        return 50.0
    if avg_loss == 0.0:
        return 100.0
    rs = avg_gain / avg_loss
    return 100.0 - 100.0 / (1.0 + rs)


def cci(high: np.ndarray, low: np.ndarray, close: np.ndarray, period: int = 20) -> np.ndarray:
    """Commodity Channel Index; zero mean deviation maps to 0."""
    tp = (np.asarray(high, float) + np.asarray(low, float) + np.asarray(close, float)) / 3.0
    out = np.full(tp.size, np.nan)
    if tp.size < period:
        return out
    sw = np.lib.stride_tricks.sliding_window_view(tp, period)
    means = sw.mean(axis=1)
    mean_dev = np.abs(sw - means[:, None]).mean(axis=1)
    vals = np.zeros(means.size)
    nz = mean_dev > 0.0
    vals[nz] = (tp[period - 1 :][nz] - means[nz]) / (0.015 * mean_dev[nz])
    out[period - 1 :] = vals
    return out


def bollinger(close: np.ndarray, period: int = 20, num_std: float = 2.0):
    """Return (middle, upper, lower, bandwidth)."""
    mid = sma(close, period)
    sd = rolling_std(close, period, ddof=0)
    upper = mid + num_std * sd
    lower = mid - num_std * sd
    width = (upper - lower) / mid
    return mid, upper, lower, width


def compute_indicator_panel(
    high: np.ndarray, low: np.ndarray, close: np.ndarray
) -> dict[str, np.ndarray]:
    """All default indicators for one ticker, keyed by name."""
    line, sig, hist = macd(close)
    b_mid, b_ub, b_lb, b_bw = bollinger(close)
    return {
        "macd": line,
        "macd_signal": sig,
        "macd_hist": hist,
        "rsi_14": rsi(close),
        "cci_20": cci(high, low, close),
        "boll_mid": b_mid,
        "boll_ub": b_ub,
        "boll_lb": b_lb,
        "boll_bw": b_bw,
        "sma_30": sma(close, 30),
        "sma_60": sma(close, 60),
    }
