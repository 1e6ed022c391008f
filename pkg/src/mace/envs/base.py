"""Shared daily-bar environment core: sizing, clipping, settlement, observations.

Timing model: the observation built at day t reflects day t's close; the
actions chosen on it execute at day t+1's close against day t+1's volume,
so decisions never see the bar they trade. One step therefore settles one
trading day: size trades, clip to volume, execute sells before buys (sells
free cash first), post permanent impact, decay the ledger, mark to market,
and hand the day's return to the reward signal.

Effective prices (base close plus outstanding permanent displacement) are
used for execution and mark-to-market alike, so an agent's own permanent
impact degrades its equity.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from ..analytics import EpisodeLog, TradeRecord
from ..errors import ConfigError, InvariantViolation
from ..impact import ImpactLedger, ImpactModel, ImpactParams, make_model
from ..indicators import DEFAULT_INDICATORS
from ..market_data import MarketFrame
from ..normalize import OnlineNormalizer

#: Scaling applied to raw technical-indicator values inside observations.
INDICATOR_SCALE = 2.0 ** -7

OPTIONAL_FEATURES = ("perm_impact_bps", "cooldown", "risk_free_rate")
COOLDOWN_CAP = 255


def coerce_numeric_fields(cls, raw: dict, section: str) -> dict:
    """Convert int/float fields of a dataclass payload, naming bad values."""
    out = dict(raw)
    for f in fields(cls):
        if f.name not in out or out[f.name] is None:
            continue
        value = out[f.name]
        kind = str(f.type)
        try:
            if kind.startswith("float") and not isinstance(value, bool):
                out[f.name] = float(value)
            elif kind.startswith("int") and not isinstance(value, bool):
                out[f.name] = int(value)
            elif kind.startswith("bool") and not isinstance(value, bool):
                raise ValueError("expected true/false")
        except (TypeError, ValueError):
            raise ConfigError(f"{section}.{f.name}: not a valid {kind}: {value!r}") from None
    return out


@dataclass
class EnvConfig:
    """Environment knobs shared by all three environment kinds."""

    phi: float = 0.02
    max_pov: float = 0.05
    initial_cash: float = 1_000_000.0
    dsr_horizon: int = 20
    eta_dd: float = 10.0
    scale_s: float = 1.0
    optional_features: tuple[str, ...] = ()
    normalize_obs: bool = False
    indicators: tuple[str, ...] = DEFAULT_INDICATORS
    long_only: bool = True
    max_leverage: float = 2.0
    maintenance_ratio: float = 0.25
    w_sharpe: float = 0.1
    sharpe_window: int = 20
    risk_free_rate: float = 0.0

    def validate(self) -> None:
        if not 0.0 < self.phi <= 1.0:
            raise ConfigError(f"phi must be in (0, 1], got {self.phi}")
        if not 0.0 < self.max_pov <= 1.0:
            raise ConfigError(f"max_pov must be in (0, 1], got {self.max_pov}")
        if self.initial_cash <= 0:
            raise ConfigError("initial_cash must be > 0")
        if self.dsr_horizon < 1:
            raise ConfigError("dsr_horizon must be >= 1")
        if self.eta_dd < 0 or self.scale_s < 0:
            raise ConfigError("eta_dd and scale_s must be >= 0")
        unknown = set(self.optional_features) - set(OPTIONAL_FEATURES)
        if unknown:
            raise ConfigError(
                f"unknown optional feature(s) {sorted(unknown)}; allowed: {OPTIONAL_FEATURES}"
            )
        if self.max_leverage < 1.0:
            raise ConfigError("max_leverage must be >= 1")
        if not 0.0 <= self.maintenance_ratio < 1.0:
            raise ConfigError("maintenance_ratio must be in [0, 1)")
        if self.sharpe_window < 1:
            raise ConfigError("sharpe_window must be >= 1")

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["optional_features"] = list(self.optional_features)
        out["indicators"] = list(self.indicators)
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "EnvConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown env_config key(s): {', '.join(sorted(unknown))}")
        raw = dict(raw)
        for name in ("optional_features", "indicators"):
            if name in raw:
                raw[name] = tuple(raw[name])
        # YAML 1.1 reads unsigned exponents like 1.0e6 as strings; coerce
        # numeric fields so configs behave the way they look.
        raw = coerce_numeric_fields(cls, raw, "env_config")
        cfg = cls(**raw)
        cfg.validate()
        return cfg


@dataclass
class PortfolioState:
    """Cash, integer share holdings, and the latest mark."""

    cash: float
    holdings: np.ndarray
    equity: float
    day_index: int


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    terminated: bool
    info: dict


def max_position(equity: float, price: float, phi: float) -> int:
    """Largest position allowed per ticker: floor(phi * equity / price) shares."""
    if price <= 0:
        raise ValueError("price must be > 0")
    return max(int(np.floor(phi * equity / price)), 0)


def desired_trade(action: float, n_bar: int, holding: int, long_only: bool) -> int:
    """Signal in [-1, 1] to a signed share delta, clamped to the position cap.

    Out-of-range signals are clipped rather than rejected (callers count the
    clips as diagnostics). The delta truncates toward zero, then shrinks so
    the resulting position stays inside [-n_bar, n_bar] (or [0, n_bar] long
    only).
    """
    a = min(max(action, -1.0), 1.0)
    delta = int(a * n_bar)
    lo = 0 if long_only else -n_bar
    # Positions pushed past the cap by price drift are kept, not force-
    # trimmed: execution never increases a breach, and a zero signal never
    # trades.
    target = min(max(holding + delta, min(lo, holding)), max(n_bar, holding))
    return target - holding


def clip_to_volume(delta: int, day_volume: float, max_pov: float) -> int:
    """Truncate a trade so its share count is at most max_pov of day volume."""
    cap = int(max_pov * day_volume)
    mag = min(abs(delta), cap)
    return mag if delta > 0 else -mag


def affordable_shares(
    desired: int, cash: float, price: float, model: ImpactModel, sigma: float, adv: float
) -> int:
    """Largest buy quantity <= desired whose notional plus cost fits in cash."""

    def outlay(q: int) -> float:
        return q * price + model.cost(q, price, sigma, adv).total

    if desired <= 0 or outlay(desired) <= cash:
        return max(desired, 0)
    lo, hi = 0, desired
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if outlay(mid) <= cash:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass
class DayContext:
    """Market slice for one settlement day."""

    date: str
    base_prices: np.ndarray
    volumes: np.ndarray
    sigmas: np.ndarray
    advs: np.ndarray


def execute_day(
    cash: float,
    holdings: np.ndarray,
    deltas: Sequence[int],
    ctx: DayContext,
    model: ImpactModel,
    ledger: ImpactLedger,
    tickers: Sequence[str],
    cash_capped: bool,
) -> tuple[float, list[TradeRecord]]:
    """Execute one day's trades in place: sells first, then buys in ticker order.

    Buys are additionally capped by remaining cash (including their own
    nonlinear cost) when `cash_capped`, so long-only books never borrow.
    Mutates `holdings`; returns the post-trade cash and the trade records.
    """
    trades: list[TradeRecord] = []
    sells = [i for i, d in enumerate(deltas) if d < 0]
    buys = [i for i, d in enumerate(deltas) if d > 0]
    for i in sells + buys:
        delta = int(deltas[i])
        ticker = tickers[i]
        base = float(ctx.base_prices[i])
        exec_price = ledger.effective_price(base, ticker)
        if delta > 0 and cash_capped:
            delta = affordable_shares(delta, cash, exec_price, model, ctx.sigmas[i], ctx.advs[i])
            if delta == 0:
                continue
        breakdown = model.cost(delta, exec_price, float(ctx.sigmas[i]), float(ctx.advs[i]))
        notional = abs(delta) * exec_price
        cash += (-notional if delta > 0 else notional) - breakdown.total
        holdings[i] += delta
        ledger.apply_trade(ticker, breakdown.permanent_price_shift)
        disp = ledger.displacement[ticker]
        trades.append(
            TradeRecord(
                day=ctx.date,
                ticker=ticker,
                side="buy" if delta > 0 else "sell",
                shares=abs(delta),
                exec_price=exec_price,
                notional=notional,
                pov=abs(delta) / float(ctx.volumes[i]),
                spread_cost=breakdown.spread_cost,
                temporary_cost=breakdown.temporary_cost,
                permanent_cost=breakdown.permanent_cost,
                ledger_displacement_after=disp,
                ledger_displacement_bps=disp / base * 1e4,
            )
        )
    return cash, trades


class TradingEnvBase:
    """Deterministic episodic core shared by the three environment kinds.

    One instance is strictly sequential; run many instances over a shared
    (immutable) MarketFrame for parallel rollouts. The observation
    normalizer, when enabled, persists across resets so statistics fitted
    in training carry into evaluation.
    """

    #: Length of the leading portfolio block in the observation.
    head_length = 1

    def __init__(
        self,
        frame: MarketFrame,
        env_config: EnvConfig | None = None,
        impact_params: ImpactParams | None = None,
        start: int | None = None,
        end: int | None = None,
    ) -> None:
        self.frame = frame
        self.config = env_config or EnvConfig()
        self.config.validate()
        self.impact_params = impact_params or ImpactParams()
        self.model: ImpactModel = make_model(self.impact_params)
        first_usable = frame.first_usable_index(self.config.indicators)
        self.start = first_usable if start is None else max(int(start), first_usable)
        self.end = frame.n_days - 1 if end is None else int(end)
        if not self.start < self.end <= frame.n_days - 1:
            raise ConfigError(
                f"empty episode: start={self.start}, end={self.end}, "
                f"first usable day {first_usable} of {frame.n_days}"
            )
        self.n = frame.n_tickers
        self.normalizer = (
            OnlineNormalizer(self.observation_length()) if self.config.normalize_obs else None
        )
        self.mark_prices = np.zeros(self.n)
        self.terminated = True  # episodic contract: reset() before step()

    # -- dimensions ---------------------------------------------------------

    @property
    def action_dim(self) -> int:
        return self.n

    def observation_length(self) -> int:
        cfg = self.config
        length = self.head_length + self.n * (3 + len(cfg.indicators))
        if "perm_impact_bps" in cfg.optional_features:
            length += self.n
        if "cooldown" in cfg.optional_features:
            length += self.n
        if "risk_free_rate" in cfg.optional_features:
            length += 1
        return length

    # -- episode control ----------------------------------------------------

    def reset(self) -> np.ndarray:
        cfg = self.config
        self.day = self.start
        self.cash = cfg.initial_cash
        self.holdings = np.zeros(self.n, dtype=np.int64)
        self.ledger = ImpactLedger(self.frame.tickers)
        self.v_prev = cfg.initial_cash
        self.terminated = False
        self.cooldown = np.full(self.n, COOLDOWN_CAP, dtype=np.int64)
        self.return_window: list[float] = []
        self.log = EpisodeLog(cfg.initial_cash)
        self._init_reward_state()
        self.mark_prices = self._effective_prices(self.day)
        return self._observe()

    def state(self) -> PortfolioState:
        """Snapshot of the book at the current (end-of-day) mark."""
        return PortfolioState(
            cash=self.cash, holdings=self.holdings.copy(),
            equity=self.v_prev, day_index=self.day,
        )

    def step(self, actions) -> StepResult:
        if self.terminated:
            raise InvariantViolation("step() called on a terminated episode; reset() first")
        actions = np.asarray(actions, dtype=float).reshape(-1)
        if actions.shape != (self.action_dim,):
            raise ValueError(f"action shape {actions.shape} != ({self.action_dim},)")
        if not np.all(np.isfinite(actions)):
            raise ValueError("actions must be finite")
        day = self.day + 1
        result = self._settle(day, actions)
        self.day = day
        if result.terminated or day >= self.end:
            self.terminated = True
            result.terminated = True
        return result

    # -- hooks implemented per environment kind ------------------------------

    def _init_reward_state(self) -> None:
        raise NotImplementedError

    def _settle(self, day: int, actions: np.ndarray) -> StepResult:
        raise NotImplementedError

    # -- shared mechanics ----------------------------------------------------

    def _day_context(self, day: int) -> DayContext:
        f = self.frame
        return DayContext(
            date=f.calendar[day],
            base_prices=f.close[:, day],
            volumes=f.volume[:, day],
            sigmas=f.sigma[:, day],
            advs=f.adv20[:, day],
        )

    def _effective_prices(self, day: int) -> np.ndarray:
        base = self.frame.close[:, day]
        return np.array(
            [self.ledger.effective_price(float(base[i]), t) for i, t in enumerate(self.frame.tickers)]
        )

    def _portfolio_value(self, prices: np.ndarray) -> float:
        return self.cash + float(np.sum(self.holdings * prices))

    def _size_trades(self, actions: np.ndarray, prices: np.ndarray, volumes: np.ndarray,
                     equity: float, long_only: bool) -> tuple[list[int], np.ndarray, int]:
        """Position caps -> desired deltas -> volume clipping."""
        cfg = self.config
        clipped = int(np.sum((actions < -1.0) | (actions > 1.0)))
        n_bar = np.array([max_position(equity, float(p), cfg.phi) for p in prices])
        deltas = [
            clip_to_volume(
                desired_trade(float(actions[i]), int(n_bar[i]), int(self.holdings[i]), long_only),
                float(volumes[i]),
                cfg.max_pov,
            )
            for i in range(self.n)
        ]
        return deltas, n_bar, clipped

    def _finish_day(self, day: int, ctx: DayContext, trades: list[TradeRecord],
                    pretrade_equity: float) -> tuple[float, float]:
        """Ledger decay, end-of-day mark, return vs previous close."""
        self.ledger.decay_step(self.model.decay_lambda())
        self.mark_prices = self._effective_prices(day)
        equity = self._portfolio_value(self.mark_prices)
        ret = equity / self.v_prev - 1.0
        for i in range(self.n):
            self.cooldown[i] = min(self.cooldown[i] + 1, COOLDOWN_CAP)
        for t in trades:
            self.cooldown[self.frame.ticker_index(t.ticker)] = 0
        return equity, ret

    def _observe(self) -> np.ndarray:
        obs = self._raw_observation()
        if not np.all(np.isfinite(obs)):
            raise InvariantViolation("non-finite observation component")
        if self.normalizer is not None:
            obs = self.normalizer.update(obs)
        return obs

    def _raw_observation(self) -> np.ndarray:
        """Flat vector: portfolio head, then per-ticker market/position blocks.

        Layout after the head block: one-day log returns per ticker,
        position value fractions per ticker, then for each ticker the
        selected indicators (fixed order) scaled by 2^-7, then holdings
        over 20-day ADV, then the optional blocks in OPTIONAL_FEATURES
        order.
        """
        cfg = self.config
        f = self.frame
        day = self.day
        prices = self.mark_prices
        equity = self._portfolio_value(prices)
        # A margin account can terminate with non-positive equity; clamp the
        # denominator so the final observation stays finite.
        v = equity if equity > 0 else 1e-9
        parts = [self._head_block(equity)]
        parts.append(f.log_returns[:, day])
        parts.append(self.holdings * prices / v)
        ind = np.empty(self.n * len(cfg.indicators))
        k = 0
        for i in range(self.n):
            for name in cfg.indicators:
                ind[k] = f.indicators[name][i, day] * INDICATOR_SCALE
                k += 1
        parts.append(ind)
        parts.append(self.holdings / f.adv20[:, day])
        if "perm_impact_bps" in cfg.optional_features:
            base = f.close[:, day]
            disp = np.array([self.ledger.displacement[t] for t in f.tickers])
            parts.append(disp / base * 1e4)
        if "cooldown" in cfg.optional_features:
            parts.append(self.cooldown.astype(float))
        if "risk_free_rate" in cfg.optional_features:
            parts.append(np.array([cfg.risk_free_rate]))
        return np.concatenate(parts)

    def _head_block(self, equity: float) -> np.ndarray:
        v = equity if equity > 0 else 1e-9
        return np.array([self.cash / v])

    def _base_info(self, day: int, trades: list[TradeRecord], equity: float,
                   pretrade_equity: float, n_bar: np.ndarray, clipped: int) -> dict:
        return {
            "date": self.frame.calendar[day],
            "day_index": day,
            "trades": trades,
            "total_cost": sum(t.total_cost for t in trades),
            "equity": equity,
            "pretrade_equity": pretrade_equity,
            "mark_prices": self.mark_prices.copy(),
            "n_bar": n_bar,
            "clipped_actions": clipped,
        }
