"""Deterministic scripted policies for exercising the environments.

These stand in for trained agents when validating execution, costs, and
reporting. Every policy is a pure function of (seed, context); the random
policy draws from a counter-based generator keyed by (seed, day, asset),
so its actions do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .market_data import MarketFrame

#: Logit magnitude used when a portfolio policy wants an (almost) one-hot
#: allocation; matches the bounded action box exposed to trainers.
LOGIT_SCALE = 50.0


@dataclass
class PolicyContext:
    """Snapshot handed to a policy before each step.

    `day_index` is the observed day; the resulting actions execute on the
    next trading day. Scripted policies are white-box test harness code, so
    they may read the frame and portfolio directly.
    """

    env_kind: str
    day_index: int
    step: int
    n_assets: int
    frame: MarketFrame
    holdings: np.ndarray
    cash: float
    equity: float
    prices: np.ndarray


class ScriptedPolicy:
    kind = "abstract"
    env_kinds = ("mace", "margin", "poe")

    def __init__(self, seed: int = 0, **params) -> None:
        self.seed = seed
        if params:
            raise ConfigError(f"policy {self.kind!r} takes no parameter {sorted(params)}")

    def reset(self) -> None:
        pass

    def act(self, ctx: PolicyContext) -> np.ndarray:
        raise NotImplementedError

    @classmethod
    def supports(cls, env_kind: str) -> bool:
        return env_kind in cls.env_kinds

    def _logits(self, ctx: PolicyContext, stock_logits: np.ndarray, cash_logit: float) -> np.ndarray:
        return np.concatenate(([cash_logit], stock_logits))


class HoldPolicy(ScriptedPolicy):
    """Never trades: zero signals, or an all-cash target for portfolios."""

    kind = "hold"

    def act(self, ctx):
        if ctx.env_kind == "poe":
            return self._logits(ctx, np.full(ctx.n_assets, -LOGIT_SCALE), LOGIT_SCALE)
        return np.zeros(ctx.n_assets)


class BuyAndHoldPolicy(ScriptedPolicy):
    """Full buy signal on the first step, nothing afterwards."""

    kind = "buy_and_hold"
    env_kinds = ("mace", "margin")

    def act(self, ctx):
        if ctx.step == 0:
            return np.ones(ctx.n_assets)
        return np.zeros(ctx.n_assets)


class EqualWeightPolicy(ScriptedPolicy):
    """Rebalance toward an equal split every day.

    Portfolios target 1/(N+1) per slot (cash included); trading
    environments emit signals proportional to each stock's distance from
    its equal-weight value, scaled by the exposure limit.
    """

    kind = "equal_weight_rebalance"

    def __init__(self, seed: int = 0, phi: float = 0.02, **params) -> None:
        super().__init__(seed, **params)
        self.phi = phi

    def act(self, ctx):
        if ctx.env_kind == "poe":
            return np.zeros(ctx.n_assets + 1)
        target_value = ctx.equity / ctx.n_assets
        gap = target_value - ctx.holdings * ctx.prices
        return np.clip(gap / (self.phi * ctx.equity), -1.0, 1.0)


class MomentumPolicy(ScriptedPolicy):
    """Trade in the direction of the trailing adjusted-close return."""

    kind = "momentum"

    def __init__(self, seed: int = 0, lookback: int = 20, gain: float = 10.0, **params) -> None:
        super().__init__(seed, **params)
        self.lookback = lookback
        self.gain = gain

    def act(self, ctx):
        d = ctx.day_index
        back = d - self.lookback
        if back < 0:
            mom = np.zeros(ctx.n_assets)
        else:
            adj = ctx.frame.adj_close
            mom = np.log(adj[:, d] / adj[:, back])
        if ctx.env_kind == "poe":
            return self._logits(ctx, np.clip(self.gain * mom, -LOGIT_SCALE, LOGIT_SCALE), 0.0)
        return np.sign(mom)


class RandomPolicy(ScriptedPolicy):
    """Uniform actions from a counter-based generator keyed (seed, day, asset)."""

    kind = "random"

    def act(self, ctx):
        slots = ctx.n_assets + 1 if ctx.env_kind == "poe" else ctx.n_assets
        out = np.empty(slots)
        for j in range(slots):
            bg = np.random.Philox(key=self.seed, counter=[ctx.day_index, j, 0, 0])
            out[j] = np.random.Generator(bg).uniform(-1.0, 1.0)
        return out


class OvertraderPolicy(ScriptedPolicy):
    """Maximal churn: flips the whole book every day."""

    kind = "overtrader"

    def act(self, ctx):
        if ctx.env_kind == "poe":
            stock = np.full(ctx.n_assets, -LOGIT_SCALE)
            stock[ctx.step % ctx.n_assets] = LOGIT_SCALE
            return self._logits(ctx, stock, -LOGIT_SCALE)
        sign = 1.0 if ctx.step % 2 == 0 else -1.0
        return np.full(ctx.n_assets, sign)


POLICY_KINDS: dict[str, type[ScriptedPolicy]] = {
    cls.kind: cls
    for cls in (
        HoldPolicy,
        BuyAndHoldPolicy,
        EqualWeightPolicy,
        MomentumPolicy,
        RandomPolicy,
        OvertraderPolicy,
    )
}


def make_policy(kind: str, seed: int, params: dict | None = None) -> ScriptedPolicy:
    try:
        cls = POLICY_KINDS[kind]
    except KeyError:
        raise ConfigError(
            f"unknown policy kind {kind!r}; allowed: {', '.join(sorted(POLICY_KINDS))}"
        ) from None
    return cls(seed=seed, **(params or {}))
