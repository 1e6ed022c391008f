"""Gymnasium wrapper around the core trading environments.

The bridge is a thin in-process binding: flat numeric vectors in, flat
numeric vectors plus a scalar reward out. The wrapped core is built from a
standard run-configuration file, so anything expressible there (data,
impact model, costs, features) is available to a trainer unchanged.

Episodes truncate never and terminate exactly when the core does (end of
data, or a margin liquidation). The core is deterministic; `seed` only
seeds the action-space sampler.
"""

from __future__ import annotations

from pathlib import Path

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from mace.config import RunConfig, load_config
from mace.market_data import MarketFrame, load_ohlcv
from mace.runner import build_env

#: Finite bound declared for the portfolio environment's logit actions.
#: Softmax shift-invariance makes clipping to a wide box loss-free, and
#: bounded boxes keep samplers and squashing policies happy.
POE_LOGIT_BOUND = 50.0

#: Declared observation bound: generous enough for any sane market data
#: (price-scale indicators divided by 128, leverage ratios, volume ratios)
#: while keeping the box finite for checkers and normalizing wrappers.
OBS_BOUND = 1e9


class MaceGymEnv(gym.Env):
    """One core environment behind the standard reset/step surface.

    Args:
        config_path: run-configuration file describing data and parameters.
        env_kind: overrides the config's environment kind; the registered
            environment IDs pin this so `mace/Margin-v0` is always margin.
        run_config: already-loaded configuration (alternative to the path).
        frame: preloaded market data, shared across vectorized instances.
    """

    metadata = {"render_modes": []}

    def __init__(
        self,
        config_path: str | Path | None = None,
        env_kind: str | None = None,
        run_config: RunConfig | None = None,
        frame: MarketFrame | None = None,
    ) -> None:
        if run_config is None:
            if config_path is None:
                raise ValueError("provide config_path or run_config")
            run_config = load_config(config_path)
        if env_kind is not None:
            run_config.env = env_kind
        self.run_config = run_config
        self.frame = frame if frame is not None else load_ohlcv(run_config.data, run_config.tickers)
        self.core = build_env(self.frame, run_config)
        n = self.core.n
        obs_len = self.core.observation_length()
        self.observation_space = spaces.Box(-OBS_BOUND, OBS_BOUND, shape=(obs_len,), dtype=np.float64)
        if run_config.env == "poe":
            self.action_space = spaces.Box(
                -POE_LOGIT_BOUND, POE_LOGIT_BOUND, shape=(n + 1,), dtype=np.float64
            )
        else:
            self.action_space = spaces.Box(-1.0, 1.0, shape=(n,), dtype=np.float64)

    def reset(self, *, seed: int | None = None, options: dict | None = None):
        super().reset(seed=seed)
        obs = np.asarray(self.core.reset(), dtype=np.float64)
        info = {
            "day_index": self.core.day,
            "date": self.frame.calendar[self.core.day],
            "segment": self.run_config.segment,
        }
        return obs, info

    def step(self, action):
        arr = np.asarray(action, dtype=np.float64).reshape(-1)
        if arr.shape != self.action_space.shape:
            raise ValueError(
                f"action shape {arr.shape} does not match declared {self.action_space.shape}"
            )
        result = self.core.step(arr)
        obs = np.asarray(result.observation, dtype=np.float64)
        info = dict(result.info)
        return obs, float(result.reward), bool(result.terminated), False, info

    def close(self) -> None:
        pass
