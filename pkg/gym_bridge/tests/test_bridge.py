"""Bridge transparency and standard-API compliance."""

import warnings
from pathlib import Path

import gymnasium as gym
import numpy as np
import pytest
import yaml
from gymnasium.utils.env_checker import check_env

import mace_gym
from mace.config import load_config
from mace.policies import PolicyContext, make_policy
from mace.runner import build_env, run_episode
from mace.synthetic import write_ohlcv_csv

TICKERS = ["AAA", "BBB", "CCC", "DDD", "EEE"]


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("bridge_fixture")
    write_ohlcv_csv(
        root / "fixture.csv",
        tickers=TICKERS, n_days=90, seed=19, volume_level=100_000.0,
    )
    config = {
        "schema_version": 1,
        "data": "fixture.csv",
        "tickers": TICKERS,
        "env": "mace",
        "split": 0.5,
        "segment": "full",
        "seed": 7,
        "env_config": {"indicators": ["macd", "rsi_14"], "max_pov": 0.05},
        "impact": {"model_kind": "AlmgrenChriss"},
        "policy": {"kind": "random"},
    }
    (root / "cfg.yaml").write_text(yaml.safe_dump(config))
    return root


def scripted_actions(cfg, env_kind, n_assets, day_index, step, seed=7):
    policy = make_policy("random", seed)
    ctx = PolicyContext(
        env_kind=env_kind, day_index=day_index, step=step, n_assets=n_assets,
        frame=None, holdings=None, cash=0.0, equity=0.0, prices=None,
    )
    return policy.act(ctx)


class TestRegistration:
    def test_all_ids_make(self, fixture_dir):
        for env_id in mace_gym.ENV_IDS:
            env = gym.make(env_id, config_path=fixture_dir / "cfg.yaml")
            obs, info = env.reset(seed=0)
            assert obs.shape == env.observation_space.shape
            env.close()

    def test_id_pins_environment_kind(self, fixture_dir):
        env = gym.make("mace/Portfolio-v0", config_path=fixture_dir / "cfg.yaml")
        assert env.action_space.shape == (len(TICKERS) + 1,)
        env.close()

    def test_declared_shapes_match_layout(self, fixture_dir):
        env = mace_gym.MaceGymEnv(config_path=fixture_dir / "cfg.yaml", env_kind="mace")
        n, k_ind = len(TICKERS), 2
        expected = 1 + n + n + n * k_ind + n
        assert env.observation_space.shape == (expected,)
        assert env.action_space.shape == (n,)
        obs, _ = env.reset()
        assert obs.shape == (expected,)


class TestEpisodicContract:
    def test_same_seed_resets_identically(self, fixture_dir):
        env = mace_gym.MaceGymEnv(config_path=fixture_dir / "cfg.yaml", env_kind="mace")
        obs1, info1 = env.reset(seed=11)
        env.step(env.action_space.sample())
        obs2, info2 = env.reset(seed=11)
        np.testing.assert_array_equal(obs1, obs2)
        assert info1["day_index"] == info2["day_index"]

    def test_reset_after_abandonment_restores_initial_cash(self, fixture_dir):
        env = mace_gym.MaceGymEnv(config_path=fixture_dir / "cfg.yaml", env_kind="mace")
        env.reset(seed=0)
        for _ in range(5):
            env.step(np.ones(len(TICKERS)))
        env.reset(seed=0)
        assert env.core.cash == env.core.config.initial_cash
        assert np.all(env.core.holdings == 0)

    def test_step_after_terminated_raises(self, fixture_dir):
        env = mace_gym.MaceGymEnv(config_path=fixture_dir / "cfg.yaml", env_kind="mace")
        env.reset()
        terminated = False
        while not terminated:
            _, _, terminated, truncated, _ = env.step(np.zeros(len(TICKERS)))
            assert truncated is False
        with pytest.raises(Exception, match="terminated"):
            env.step(np.zeros(len(TICKERS)))

    def test_action_shape_mismatch_rejected_before_core_state(self, fixture_dir):
        env = mace_gym.MaceGymEnv(config_path=fixture_dir / "cfg.yaml", env_kind="mace")
        env.reset()
        day_before = env.core.day
        with pytest.raises(ValueError, match="shape"):
            env.step(np.zeros(len(TICKERS) + 2))
        assert env.core.day == day_before


class TestTransparency:
    @pytest.mark.parametrize("env_kind", ["mace", "margin", "poe"])
    def test_streams_match_core_replay(self, fixture_dir, env_kind):
        cfg = load_config(fixture_dir / "cfg.yaml")
        cfg.env = env_kind
        n = len(TICKERS)
        slots = n + 1 if env_kind == "poe" else n

        bridge = mace_gym.MaceGymEnv(run_config=cfg)
        core = build_env(bridge.frame, cfg)

        obs_b, _ = bridge.reset(seed=0)
        obs_c = core.reset()
        np.testing.assert_allclose(obs_b, obs_c, atol=1e-12)

        rng = np.random.default_rng(5)
        terminated = False
        while not terminated:
            action = rng.uniform(-1.0, 1.0, slots)
            obs_b, reward_b, terminated, _, _ = bridge.step(action)
            result = core.step(action)
            np.testing.assert_allclose(obs_b, result.observation, atol=1e-12)
            assert reward_b == pytest.approx(result.reward, abs=1e-12)
            assert terminated == result.terminated

    def test_zero_action_matches_core_no_trade_reward(self, fixture_dir):
        cfg = load_config(fixture_dir / "cfg.yaml")
        bridge = mace_gym.MaceGymEnv(run_config=cfg)
        core = build_env(bridge.frame, cfg)
        bridge.reset()
        core.reset()
        zeros = np.zeros(len(TICKERS))
        _, reward, _, _, info = bridge.step(zeros)
        result = core.step(zeros)
        assert info["trades"] == []
        assert reward == result.reward

    def test_episode_reward_sum_matches_harness_report(self, fixture_dir):
        cfg = load_config(fixture_dir / "cfg.yaml")
        harness = run_episode(cfg)

        bridge = mace_gym.MaceGymEnv(run_config=load_config(fixture_dir / "cfg.yaml"))
        bridge.reset()
        total, step, terminated = 0.0, 0, False
        while not terminated:
            action = scripted_actions(cfg, "mace", len(TICKERS), bridge.core.day, step)
            _, reward, terminated, _, _ = bridge.step(action)
            total += reward
            step += 1
        assert total == pytest.approx(harness.reward_sum, abs=1e-12)


class TestEnvChecker:
    #: The portfolio logit box is deliberately wider than [-1, 1] (wide
    #: logits make extreme allocations reachable); gymnasium's checker
    #: emits a generic normalization recommendation for any such box.
    ALLOWED = ("we recommend using a symmetric and normalized space",)

    @pytest.mark.parametrize("env_id", sorted(mace_gym.ENV_IDS))
    def test_checker_passes_all_ids(self, fixture_dir, env_id):
        env = mace_gym.MaceGymEnv(
            config_path=fixture_dir / "cfg.yaml", env_kind=mace_gym.ENV_IDS[env_id]
        )
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            check_env(env, skip_render_check=True)
        unexpected = [
            str(w.message)
            for w in caught
            if not any(allowed in str(w.message) for allowed in self.ALLOWED)
        ]
        assert unexpected == []
