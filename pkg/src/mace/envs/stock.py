"""Long-only stock trading environment with impact-aware execution.

Per-ticker signals in [-1, 1] map to share deltas capped by the per-stock
exposure limit and clipped to a fraction of daily volume. Reward is the
differential Sharpe ratio net of a drawdown penalty, scaled.

With `long_only=False` the clamp widens to signed positions and buys are
no longer cash-capped; there is no leverage cap in this mode, so managed
leverage belongs in the margin environment instead.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvariantViolation
from ..rewards import DrawdownTracker, DsrState, reward_mace
from .base import StepResult, TradingEnvBase, execute_day


class StockTradingEnv(TradingEnvBase):
    def _init_reward_state(self) -> None:
        cfg = self.config
        self.dsr = DsrState(horizon=cfg.dsr_horizon)
        self.drawdown = DrawdownTracker(peak_equity=cfg.initial_cash, eta_dd=cfg.eta_dd)

    def _settle(self, day: int, actions: np.ndarray) -> StepResult:
        cfg = self.config
        ctx = self._day_context(day)
        exec_prices = self._effective_prices(day)
        pretrade_equity = self._portfolio_value(exec_prices)
        deltas, n_bar, clipped = self._size_trades(
            actions, exec_prices, ctx.volumes, pretrade_equity, long_only=cfg.long_only
        )
        self.cash, trades = execute_day(
            self.cash, self.holdings, deltas, ctx, self.model, self.ledger,
            self.frame.tickers, cash_capped=cfg.long_only,
        )
        if cfg.long_only and (self.cash < 0.0 or np.any(self.holdings < 0)):
            raise InvariantViolation(
                f"long-only book went negative on {ctx.date}: cash={self.cash}"
            )
        equity, ret = self._finish_day(day, ctx, trades, pretrade_equity)
        dsr = self.dsr.update(ret)
        penalty = self.drawdown.penalty(equity)
        reward = reward_mace(dsr, penalty, cfg.scale_s)
        self.v_prev = equity
        self.log.record_day(ctx.date, equity, ret, reward, trades, pretrade_equity)
        info = self._base_info(day, trades, equity, pretrade_equity, n_bar, clipped)
        info["dsr"] = dsr
        info["drawdown_penalty"] = penalty
        return StepResult(self._observe(), reward, False, info)
