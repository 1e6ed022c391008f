"""Gymnasium environment IDs for the mace trading environments.

Importing this package registers:

    mace/StockTrading-v0   long-only stock trading
    mace/Margin-v0         long/short margin trading
    mace/Portfolio-v0      softmax portfolio optimization

Each expects a `config_path` (or `run_config`) kwarg at make() time; the
ID pins the environment kind regardless of what the config says:

    import gymnasium as gym
    import mace_gym  # noqa: F401
    env = gym.make("mace/StockTrading-v0", config_path="run.yaml")
"""

from gymnasium.envs.registration import register

from .envs import POE_LOGIT_BOUND, MaceGymEnv

ENV_IDS = {
    "mace/StockTrading-v0": "mace",
    "mace/Margin-v0": "margin",
    "mace/Portfolio-v0": "poe",
}

for env_id, kind in ENV_IDS.items():
    register(
        id=env_id,
        entry_point="mace_gym.envs:MaceGymEnv",
        kwargs={"env_kind": kind},
    )

__all__ = ["ENV_IDS", "MaceGymEnv", "POE_LOGIT_BOUND"]
