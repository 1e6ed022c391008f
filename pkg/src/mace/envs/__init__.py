from .base import EnvConfig, PortfolioState, StepResult, TradingEnvBase
from .margin import MarginState, MarginTradingEnv, margin_features
from .portfolio import PortfolioEnv, logits_to_weights, rebalance_deltas
from .stock import StockTradingEnv

ENV_KINDS = {
    "mace": StockTradingEnv,
    "margin": MarginTradingEnv,
    "poe": PortfolioEnv,
}

__all__ = [
    "ENV_KINDS",
    "EnvConfig",
    "MarginState",
    "MarginTradingEnv",
    "PortfolioEnv",
    "PortfolioState",
    "StepResult",
    "StockTradingEnv",
    "TradingEnvBase",
    "logits_to_weights",
    "margin_features",
    "rebalance_deltas",
]
