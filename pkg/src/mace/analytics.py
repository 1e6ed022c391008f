"""Trade-level logging and backtest metrics.

An EpisodeLog collects one environment episode's trade records and daily
diagnostics; EpisodeMetrics condenses them into the usual backtest summary
(returns, Sharpe, drawdown, turnover, participation, costs). Trace and
report writers emit diff-able CSV/JSON whose numeric fields round-trip
exactly, so two identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

TRADING_DAYS_PER_YEAR = 252
TURNOVER_PCTILE_WINDOW = 252

TRACE_HEADER = (
    "day,ticker,side,shares,exec_price,notional,pov,"
    "spread_cost,temp_cost,perm_cost,ledger_after,ledger_bps"
)

REPORT_VERSION = 1


@dataclass(frozen=True)
class TradeRecord:
    """One executed order with its cost decomposition and ledger state."""

    day: str
    ticker: str
    side: str
    shares: int
    exec_price: float
    notional: float
    pov: float
    spread_cost: float
    temporary_cost: float
    permanent_cost: float
    ledger_displacement_after: float
    ledger_displacement_bps: float

    @property
    def total_cost(self) -> float:
        return self.spread_cost + self.temporary_cost + self.permanent_cost

    @property
    def signed_shares(self) -> int:
        return self.shares if self.side == "buy" else -self.shares

    def trace_row(self, extra: tuple = ()) -> str:
        cells = (
            self.day, self.ticker, self.side, str(self.shares),
            repr(self.exec_price), repr(self.notional), repr(self.pov),
            repr(self.spread_cost), repr(self.temporary_cost), repr(self.permanent_cost),
            repr(self.ledger_displacement_after), repr(self.ledger_displacement_bps),
        )
        return ",".join(cells + tuple(str(e) for e in extra))


def daily_turnover(trades, equity: float) -> float:
    """Sum of absolute traded notionals over portfolio equity."""
    if equity <= 0:
        raise ValueError("equity must be > 0")
    return sum(t.notional for t in trades) / equity


def annualized_sharpe(returns) -> float:
    """mean/stdev of daily returns scaled to a yearly horizon."""
    r = np.asarray(returns, dtype=float)
    if r.size < 2:
        raise ValueError("annualized Sharpe needs at least 2 returns")
    sd = float(np.std(r, ddof=1))
    if sd < 1e-12:
        return 0.0
    return float(np.mean(r)) / sd * np.sqrt(TRADING_DAYS_PER_YEAR)


def annualized_volatility(returns) -> float:
    r = np.asarray(returns, dtype=float)
    if r.size < 2:
        return 0.0
    return float(np.std(r, ddof=1)) * float(np.sqrt(TRADING_DAYS_PER_YEAR))


def max_drawdown(equity_series) -> float:
    """Largest peak-to-trough equity decline, as a fraction of the peak."""
    eq = np.asarray(equity_series, dtype=float)
    if eq.size == 0 or np.any(eq <= 0):
        raise ValueError("equity series must be nonempty and positive")
    peaks = np.maximum.accumulate(eq)
    return float(np.max(1.0 - eq / peaks))


def turnover_percentile(today: float, history) -> float:
    """Empirical percentile rank of today's turnover in a trailing window.

    Ties count half, so a value equal to the median of its history ranks 0.5.
    """
    h = np.asarray(history, dtype=float)
    if h.size == 0:
        raise ValueError("turnover history must be nonempty")
    below = int(np.sum(h < today))
    ties = int(np.sum(h == today))
    return (below + 0.5 * ties) / h.size


@dataclass
class EpisodeMetrics:
    total_return: float
    annualized_return: float
    annualized_sharpe: float
    annualized_volatility: float
    max_drawdown: float
    avg_daily_turnover: float
    avg_order_pov: float
    total_cost: float
    avg_daily_cost: float
    turnover_percentile_series: list = field(default_factory=list)

    SCALAR_FIELDS = (
        "total_return", "annualized_return", "annualized_sharpe",
        "annualized_volatility", "max_drawdown", "avg_daily_turnover",
        "avg_order_pov", "total_cost", "avg_daily_cost",
    )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "EpisodeMetrics":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in raw.items() if k in names})


class EpisodeLog:
    """Per-episode collector owned by exactly one environment instance."""

    def __init__(self, initial_equity: float) -> None:
        self.initial_equity = initial_equity
        self.days: list[str] = []
        self.equity: list[float] = []
        self.returns: list[float] = []
        self.rewards: list[float] = []
        self.day_cost: list[float] = []
        self.day_turnover: list[float] = []
        self.day_turnover_pctile: list = []
        self.trades: list[TradeRecord] = []
        self.extra_columns: tuple[str, ...] = ()
        self.trade_extras: list[tuple] = []

    def record_day(self, day: str, equity: float, ret: float, reward: float,
                   trades, turnover_equity: float, extras=None) -> None:
        cost = sum(t.total_cost for t in trades)
        turnover = daily_turnover(trades, turnover_equity)
        history = self.day_turnover[-TURNOVER_PCTILE_WINDOW:]
        pctile = turnover_percentile(turnover, history) if history else None
        self.days.append(day)
        self.equity.append(equity)
        self.returns.append(ret)
        self.rewards.append(reward)
        self.day_cost.append(cost)
        self.day_turnover.append(turnover)
        self.day_turnover_pctile.append(pctile)
        self.trades.extend(trades)
        self.trade_extras.extend(extras if extras is not None else [()] * len(trades))

    def metrics(self) -> EpisodeMetrics:
        # A wiped-out margin book can close at equity <= 0; clamp so the
        # drawdown and annualization stay defined (drawdown -> ~100%).
        eq = np.maximum([self.initial_equity] + self.equity, 1e-9)
        n = max(len(self.returns), 1)
        total_return = self.equity[-1] / self.initial_equity - 1.0 if self.equity else 0.0
        growth = max(1.0 + total_return, 0.0)
        try:
            sharpe = annualized_sharpe(self.returns)
        except ValueError:
            sharpe = 0.0
        povs = [t.pov for t in self.trades]
        return EpisodeMetrics(
            total_return=total_return,
            annualized_return=growth ** (TRADING_DAYS_PER_YEAR / n) - 1.0,
            annualized_sharpe=sharpe,
            annualized_volatility=annualized_volatility(self.returns),
            max_drawdown=max_drawdown(eq),
            avg_daily_turnover=float(np.mean(self.day_turnover)) if self.day_turnover else 0.0,
            avg_order_pov=float(np.mean(povs)) if povs else 0.0,
            total_cost=sum(t.total_cost for t in self.trades),
            avg_daily_cost=float(np.mean(self.day_cost)) if self.day_cost else 0.0,
            turnover_percentile_series=list(self.day_turnover_pctile),
        )

    def write_trace_csv(self, path) -> None:
        header = TRACE_HEADER
        if self.extra_columns:
            header = header + "," + ",".join(self.extra_columns)
        lines = [header]
        lines += [t.trace_row(extra) for t, extra in zip(self.trades, self.trade_extras)]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def write_daily_csv(self, path) -> None:
        lines = ["day,equity,return,reward,cost,turnover,turnover_percentile"]
        for i, day in enumerate(self.days):
            pct = self.day_turnover_pctile[i]
            lines.append(
                f"{day},{self.equity[i]!r},{self.returns[i]!r},{self.rewards[i]!r},"
                f"{self.day_cost[i]!r},{self.day_turnover[i]!r},"
                f"{'' if pct is None else repr(pct)}"
            )
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trace_csv(path) -> list[TradeRecord]:
    """Parse a trace CSV back into records (extra env-specific columns dropped)."""
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    records = []
    for line in text[1:]:
        cells = line.split(",")
        records.append(
            TradeRecord(
                day=cells[0], ticker=cells[1], side=cells[2], shares=int(cells[3]),
                exec_price=float(cells[4]), notional=float(cells[5]), pov=float(cells[6]),
                spread_cost=float(cells[7]), temporary_cost=float(cells[8]),
                permanent_cost=float(cells[9]), ledger_displacement_after=float(cells[10]),
                ledger_displacement_bps=float(cells[11]),
            )
        )
    return records


def write_report_json(path, payload: dict) -> None:
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n",
        encoding="utf-8",
    )


def read_report_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def epoch_report(episodes: list[EpisodeMetrics], labels: list[str]) -> dict:
    """Per-epoch series of every scalar metric, grouped by split label.

    `labels` carries one "IS" or "OOS" entry per episode, in epoch order.
    """
    if not episodes:
        raise ValueError("epoch report needs at least one episode")
    if len(labels) != len(episodes):
        raise ValueError("one split label per episode required")
    series: dict[str, dict[str, list]] = {}
    detail: dict[str, list] = {}
    for label, ep in zip(labels, episodes):
        bucket = series.setdefault(label, {name: [] for name in EpisodeMetrics.SCALAR_FIELDS})
        for name in EpisodeMetrics.SCALAR_FIELDS:
            bucket[name].append(getattr(ep, name))
        detail.setdefault(label, []).append(ep.to_dict())
    return {"report_version": REPORT_VERSION, "series": series, "episodes": detail}


def write_epoch_csvs(report: dict, out_dir) -> list:
    """One plot-ready CSV per split label: rows are epochs, columns metrics."""
    out_dir = Path(out_dir)
    written = []
    for label, bucket in report["series"].items():
        names = list(EpisodeMetrics.SCALAR_FIELDS)
        lines = ["epoch," + ",".join(names)]
        n_epochs = len(bucket[names[0]])
        for e in range(n_epochs):
            lines.append(str(e) + "," + ",".join(repr(bucket[name][e]) for name in names))
        path = out_dir / f"epoch_{label.lower()}.csv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
    return written
