"""Deterministic synthetic OHLCV generation for fixtures and demos.

Prices follow a lognormal random walk with configurable daily volatility;
volumes are lognormal around a per-ticker level. Everything is driven by a
seeded PCG64 generator, so a given parameter set always produces the same
file, byte for byte.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from .market_data import MarketFrame, load_ohlcv


def make_ohlcv_table(
    tickers: list[str],
    n_days: int,
    seed: int = 0,
    start_price: float = 100.0,
    daily_vol: float = 0.02,
    volume_level: float = 1_000_000.0,
    volume_vol: float = 0.2,
    drift: float = 0.0,
    start_date: str = "2020-01-01",
) -> pd.DataFrame:
    """Tidy OHLCV table with the loader's exact schema."""
    rng = np.random.default_rng(seed)
    dates = [d.date().isoformat() for d in pd.bdate_range(start_date, periods=n_days)]
    rows = []
    for k, ticker in enumerate(tickers):
        # Stagger price levels so tickers are distinguishable in fixtures.
        close = start_price * (1.0 + 0.5 * k)
        for day in dates:
            z = rng.standard_normal()
            prev = close
            close = prev * float(np.exp(drift + daily_vol * z))
            spread = abs(rng.standard_normal()) * daily_vol * 0.5
            high = max(prev, close) * (1.0 + spread)
            low = min(prev, close) * (1.0 - spread)
            volume = volume_level * float(np.exp(volume_vol * rng.standard_normal()))
            rows.append(
                {
                    "date": day,
                    "ticker": ticker,
                    "open": prev,
                    "high": high,
                    "low": low,
                    "close": close,
                    "adj_close": close,
                    "volume": round(volume),
                }
            )
    return pd.DataFrame(rows)


def write_ohlcv_csv(path, **kwargs) -> None:
    """Write a synthetic OHLCV CSV suitable for `load_ohlcv` / the CLI."""
    make_ohlcv_table(**kwargs).to_csv(path, index=False)


def make_frame(tickers: list[str], n_days: int, tmp_path=None, **kwargs) -> MarketFrame:
    """Generate and load a synthetic MarketFrame in one step (test helper)."""
    import io

    buf = io.StringIO()
    make_ohlcv_table(tickers, n_days, **kwargs).to_csv(buf, index=False)
    buf.seek(0)
    return load_ohlcv(buf, tickers)
