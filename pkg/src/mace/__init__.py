"""Cost-aware daily-bar trading environments with nonlinear market impact.

Three deterministic episodic environments (long-only stock trading,
long/short margin trading, softmax portfolio optimization) share pluggable
execution-cost models, a decaying permanent-impact ledger, trade-level
analytics, and a scripted-policy CLI harness.
"""

from .analytics import EpisodeMetrics, TradeRecord
from .config import RunConfig, load_config, validate_config
from .envs import (
    ENV_KINDS,
    EnvConfig,
    MarginTradingEnv,
    PortfolioEnv,
    StepResult,
    StockTradingEnv,
    logits_to_weights,
)
from .impact import CostBreakdown, ImpactLedger, ImpactParams, make_model
from .market_data import MarketFrame, load_ohlcv
from .normalize import OnlineNormalizer
from .rewards import DrawdownTracker, DsrState
from .runner import build_env, compare_cost_models, run_episode

__version__ = "0.1.0"

__all__ = [
    "CostBreakdown",
    "DrawdownTracker",
    "DsrState",
    "ENV_KINDS",
    "EnvConfig",
    "EpisodeMetrics",
    "ImpactLedger",
    "ImpactParams",
    "MarginTradingEnv",
    "MarketFrame",
    "OnlineNormalizer",
    "PortfolioEnv",
    "RunConfig",
    "StepResult",
    "StockTradingEnv",
    "TradeRecord",
    "build_env",
    "compare_cost_models",
    "load_config",
    "load_ohlcv",
    "logits_to_weights",
    "make_model",
    "run_episode",
    "validate_config",
    "__version__",
]
