"""Reward signals: differential Sharpe with drawdown penalty, log return,
and profit plus rolling Sharpe.

The differential Sharpe reward is an online recurrence over exponentially
weighted return moments. Both moment estimates update every step; the
reward itself is zero for the first `horizon` steps while the estimates
accumulate, since the variance estimate is degenerate until then.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Variance floor inside the volatility estimate of the DSR recurrence.
EPS_VAR = 1e-12


@dataclass
class DsrState:
    """EWMA return moments driving the differential Sharpe reward."""

    horizon: int = 20
    mu: float = 0.0
    m2: float = 0.0
    warm_count: int = 0
    eps_var: float = EPS_VAR
    alpha_ew: float = field(init=False)

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        self.alpha_ew = 1.0 / self.horizon

    def update(self, r_t: float) -> float:
        """Advance the moment estimates and return the one-step reward.

        The excess-return numerator uses the pre-update mean and Sharpe, the
        denominator the post-update volatility; during warm-up the reward is
        0 while the state still advances.
        """
        if not math.isfinite(r_t):
            raise ValueError(f"non-finite return {r_t!r}")
        warm = self.warm_count < self.horizon
        mu_prev = self.mu
        sigma_prev = math.sqrt(max(self.m2 - mu_prev * mu_prev, self.eps_var))
        sr_prev = mu_prev / sigma_prev

        a = self.alpha_ew
        self.mu = (1.0 - a) * mu_prev + a * r_t
        self.m2 = (1.0 - a) * self.m2 + a * r_t * r_t
        self.warm_count += 1

        if warm:
            return 0.0
        sigma_t = math.sqrt(max(self.m2 - self.mu * self.mu, self.eps_var))
        z = (r_t - mu_prev) / sigma_t
        return z - 0.5 * sr_prev * z * z


def dsr_update(state: DsrState, r_t: float) -> tuple[float, DsrState]:
    """Functional wrapper around DsrState.update."""
    return state.update(r_t), state


@dataclass
class DrawdownTracker:
    """Running peak equity and the penalty on drawdown increases."""

    peak_equity: float
    eta_dd: float = 10.0
    dd_prev: float = 0.0

    def penalty(self, equity: float) -> float:
        """Penalty term for this step: eta_dd * max(0, DD_t - DD_{t-1})^2."""
        if equity > self.peak_equity:
            self.peak_equity = equity
        dd = 1.0 - equity / self.peak_equity
        delta = max(0.0, dd - self.dd_prev)
        self.dd_prev = dd
        return self.eta_dd * delta * delta


def reward_mace(dsr: float, penalty: float, scale_s: float) -> float:
    """Scaled differential Sharpe net of the drawdown penalty."""
    return (dsr - penalty) * scale_s


def reward_log_return(v_t: float, v_prev: float) -> float:
    """Log growth of portfolio value over one step."""
    if v_t <= 0 or v_prev <= 0:
        raise ValueError("portfolio values must be > 0 for a log-return reward")
    return math.log(v_t / v_prev)


def rolling_sharpe(returns, eps: float = EPS_VAR) -> float:
    """Mean over sample standard deviation of a return window; 0 if degenerate."""
    r = np.asarray(returns, dtype=float)
    if r.size < 2:
        return 0.0
    sd = float(np.std(r, ddof=1))
    if sd < eps:
        return 0.0
    return float(np.mean(r)) / sd


def reward_margin(profit_t: float, v_prev: float, sharpe_window, w_sharpe: float) -> float:
    """One-step profit as a return plus a weighted trailing Sharpe term."""
    if v_prev <= 0:
        raise ValueError("previous portfolio value must be > 0")
    return profit_t / v_prev + w_sharpe * rolling_sharpe(sharpe_window)
