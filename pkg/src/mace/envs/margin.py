"""Long/short environment with leverage and margin accounting.

Signed positions share the stock environment's execution path. Projected
gross leverage above the cap proportionally scales the post-trade book
back inside it (preserving the agent's relative allocation); equity below
the maintenance requirement forces a full (volume-clipped) liquidation and
terminates the episode. Short proceeds sit in cash; borrow fees and rebate
interest are out of scope.

Reward is the one-step profit as a return plus a weighted trailing Sharpe
term over recent daily returns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rewards import reward_margin
from .base import DayContext, StepResult, TradingEnvBase, clip_to_volume, execute_day


@dataclass
class MarginState:
    """Snapshot of a margin book at the current mark."""

    cash: float
    holdings: np.ndarray
    equity: float
    gross_leverage: float
    max_leverage: float
    maintenance_ratio: float


def margin_features(cash: float, holdings: np.ndarray, prices: np.ndarray, equity: float) -> np.ndarray:
    """[cash fraction, gross leverage, net exposure fraction] of equity."""
    if equity <= 0:
        raise ValueError("equity must be > 0 for margin features")
    notional = holdings * prices
    return np.array(
        [cash / equity, float(np.sum(np.abs(notional))) / equity, float(np.sum(notional)) / equity]
    )


class MarginTradingEnv(TradingEnvBase):
    head_length = 3

    def _init_reward_state(self) -> None:
        self.forced_liquidation = False

    def _settle(self, day: int, actions: np.ndarray) -> StepResult:
        cfg = self.config
        ctx = self._day_context(day)
        exec_prices = self._effective_prices(day)
        pretrade_equity = self._portfolio_value(exec_prices)
        gross = float(np.sum(np.abs(self.holdings) * exec_prices))

        liquidate = pretrade_equity <= 0 or pretrade_equity < cfg.maintenance_ratio * gross
        if liquidate:
            self.forced_liquidation = True
            deltas = [
                clip_to_volume(-int(h), float(ctx.volumes[i]), cfg.max_pov)
                for i, h in enumerate(self.holdings)
            ]
            n_bar = np.zeros(self.n, dtype=np.int64)
            clipped = 0
        else:
            deltas, n_bar, clipped = self._size_trades(
                actions, exec_prices, ctx.volumes, pretrade_equity, long_only=False
            )
            deltas = self._enforce_leverage(deltas, exec_prices, ctx, pretrade_equity)

        self.cash, trades = execute_day(
            self.cash, self.holdings, deltas, ctx, self.model, self.ledger,
            self.frame.tickers, cash_capped=False,
        )
        equity, ret = self._finish_day(day, ctx, trades, pretrade_equity)
        self.return_window.append(ret)
        window = self.return_window[-cfg.sharpe_window :]
        reward = reward_margin(equity - self.v_prev, self.v_prev, window, cfg.w_sharpe)
        self.v_prev = equity
        gross_after = float(np.sum(np.abs(self.holdings) * self.mark_prices))
        turnover_equity = pretrade_equity if pretrade_equity > 0 else self.config.initial_cash
        self.log.extra_columns = ("signed_shares", "gross_leverage")
        lev = gross_after / equity if equity > 0 else 0.0
        extras = [(t.signed_shares, repr(lev)) for t in trades]
        self.log.record_day(ctx.date, equity, ret, reward, trades, turnover_equity, extras)
        info = self._base_info(day, trades, equity, pretrade_equity, n_bar, clipped)
        info["gross_leverage"] = lev
        info["forced_liquidation"] = liquidate
        terminated = liquidate or equity <= 0
        # A liquidated book's ratios against (near-)zero equity are garbage;
        # the terminal observation is a zero sentinel instead.
        obs = np.zeros(self.observation_length()) if terminated else self._observe()
        return StepResult(obs, reward, terminated, info)

    def _enforce_leverage(self, deltas, prices: np.ndarray, ctx: DayContext, equity: float):
        """Scale the projected book back under the gross-leverage cap.

        The cap is taken against equity net of the (pre-scaling, hence
        conservative) cost estimate of the day's trades, and scaled integer
        targets truncate toward zero, so post-settlement gross notional
        stays within max_leverage times post-settlement equity. The implied
        adjustment trades are still volume-clipped, which can leave a
        residual breach only when liquidity has vanished.
        """
        cfg = self.config
        est_cost = sum(
            self.model.cost(d, float(prices[i]), float(ctx.sigmas[i]), float(ctx.advs[i])).total
            for i, d in enumerate(deltas)
            if d != 0
        )
        projected = self.holdings + np.asarray(deltas, dtype=np.int64)
        gross = float(np.sum(np.abs(projected) * prices))
        cap = cfg.max_leverage * max(equity - est_cost, 0.0)
        if gross <= cap:
            return deltas
        kappa = cap / gross if gross > 0 else 0.0
        targets = np.trunc(kappa * projected).astype(np.int64)
        return [
            clip_to_volume(int(targets[i] - self.holdings[i]), float(ctx.volumes[i]), cfg.max_pov)
            for i in range(self.n)
        ]

    def _head_block(self, equity: float) -> np.ndarray:
        v = equity if equity > 0 else 1e-9
        return margin_features(self.cash, self.holdings, self.mark_prices, v)

    def state(self) -> MarginState:
        gross = float(np.sum(np.abs(self.holdings) * self.mark_prices))
        return MarginState(
            cash=self.cash, holdings=self.holdings.copy(), equity=self.v_prev,
            gross_leverage=gross / self.v_prev if self.v_prev > 0 else 0.0,
            max_leverage=self.config.max_leverage,
            maintenance_ratio=self.config.maintenance_ratio,
        )
