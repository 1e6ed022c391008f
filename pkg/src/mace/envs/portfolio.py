"""Long-only portfolio environment driven by softmax target weights.

Actions are raw logits over N+1 slots (cash first, then one per stock).
Each day the environment computes the share-level rebalancing trades that
move the book toward the target weights, clips them to the volume cap,
and settles sells before buys with per-buy cash affordability, so holdings
and cash stay nonnegative by construction. When clipping prevents reaching
a target the shortfall stays in cash; there is no intraday retry. Reward
is the post-cost log return of portfolio value.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvariantViolation
from ..rewards import reward_log_return
from .base import StepResult, TradingEnvBase, clip_to_volume, execute_day


def logits_to_weights(logits) -> np.ndarray:
    """Numerically stable softmax: finite logits in, weights summing to 1 out."""
    z = np.asarray(logits, dtype=float)
    if not np.all(np.isfinite(z)):
        raise ValueError("logits must be finite")
    shifted = z - z.max()
    e = np.exp(shifted)
    return e / e.sum()


def rebalance_deltas(weights, equity, prices, holdings, volumes, max_pov) -> list[int]:
    """Volume-clipped share trades moving the book toward target weights.

    `weights` has the cash slot first; cash is the residual and is never
    traded. Share counts truncate toward zero, biasing rounding dust into
    cash.
    """
    if equity <= 0:
        raise ValueError("equity must be > 0 to rebalance")
    return [
        clip_to_volume(
            int(weights[i + 1] * equity / prices[i] - holdings[i]),
            float(volumes[i]),
            max_pov,
        )
        for i in range(len(holdings))
    ]


class PortfolioEnv(TradingEnvBase):
    @property
    def action_dim(self) -> int:
        return self.n + 1

    def _init_reward_state(self) -> None:
        self.weights_log: list[tuple[str, np.ndarray, np.ndarray]] = []

    def _settle(self, day: int, logits: np.ndarray) -> StepResult:
        cfg = self.config
        weights = logits_to_weights(logits)
        ctx = self._day_context(day)
        exec_prices = self._effective_prices(day)
        pretrade_equity = self._portfolio_value(exec_prices)
        deltas = rebalance_deltas(
            weights, pretrade_equity, exec_prices, self.holdings, ctx.volumes, cfg.max_pov
        )
        self.cash, trades = execute_day(
            self.cash, self.holdings, deltas, ctx, self.model, self.ledger,
            self.frame.tickers, cash_capped=True,
        )
        if self.cash < 0.0 or np.any(self.holdings < 0):
            raise InvariantViolation(f"long-only book went negative on {ctx.date}")
        equity, ret = self._finish_day(day, ctx, trades, pretrade_equity)
        reward = reward_log_return(equity, self.v_prev)
        self.v_prev = equity
        achieved = np.concatenate(
            ([self.cash / equity], self.holdings * self.mark_prices / equity)
        )
        self.weights_log.append((ctx.date, weights, achieved))
        self.log.record_day(ctx.date, equity, ret, reward, trades, pretrade_equity)
        info = self._base_info(day, trades, equity, pretrade_equity, np.zeros(self.n), 0)
        info["target_weights"] = weights
        info["achieved_weights"] = achieved
        return StepResult(self._observe(), reward, False, info)

    def write_weights_csv(self, path) -> None:
        """Per-day target and achieved weight record (slot 0 = cash)."""
        names = ["cash"] + list(self.frame.tickers)
        lines = ["day,slot,target_weight,achieved_weight"]
        for date, target, achieved in self.weights_log:
            for s, name in enumerate(names):
                lines.append(f"{date},{name},{float(target[s])!r},{float(achieved[s])!r}")
        from pathlib import Path

        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
