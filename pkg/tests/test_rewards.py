"""Reward recurrences against brute-force replays."""

import math

import numpy as np
import pytest

from mace.rewards import (
    DrawdownTracker, DsrState, reward_log_return, reward_mace, reward_margin,
    rolling_sharpe,
)


def replay_dsr(returns, horizon, eps=1e-12):
    """Independent step-by-step replay of the published recurrence.

    Mirrors the documented convention: reward 0 for the first `horizon`
    steps; the excess term uses the pre-update mean and Sharpe and the
    post-update volatility estimate.
    """
    a = 1.0 / horizon
    mu = m2 = 0.0
    out = []
    for k, r in enumerate(returns):
        mu_prev, m2_prev = mu, m2
        sigma_prev = math.sqrt(max(m2_prev - mu_prev**2, eps))
        sr_prev = mu_prev / sigma_prev
        mu = (1 - a) * mu_prev + a * r
        m2 = (1 - a) * m2_prev + a * r * r
        if k < horizon:
            out.append(0.0)
            continue
        sigma_t = math.sqrt(max(m2 - mu**2, eps))
        z = (r - mu_prev) / sigma_t
        out.append(z - 0.5 * sr_prev * z * z)
    return out


class TestDsr:
    def test_horizon_sets_ewma_rate(self):
        assert DsrState(horizon=10).alpha_ew == pytest.approx(0.1, rel=1e-15)

    def test_short_sequence_matches_replay(self):
        returns = [0.01, 0.01, 0.01, -0.02]
        state = DsrState(horizon=4)
        rewards = [state.update(r) for r in returns]
        assert rewards == pytest.approx(replay_dsr(returns, 4), abs=1e-12)

    def test_return_equal_to_prior_mean_gives_zero(self):
        # Zero excess return zeroes both terms of the recurrence.
        state = DsrState(horizon=2)
        for r in (0.01, -0.005, 0.02, 0.001):
            state.update(r)
        assert state.warm_count >= state.horizon
        assert state.update(state.mu) == 0.0

    def test_long_random_sequence_matches_replay(self):
        rng = np.random.default_rng(7)
        returns = rng.normal(0.0005, 0.01, size=500)
        state = DsrState(horizon=10)
        rewards = [state.update(r) for r in returns]
        expected = replay_dsr(returns, 10)
        np.testing.assert_allclose(rewards, expected, rtol=1e-12, atol=1e-15)

    def test_warmup_emits_zero_but_advances_state(self):
        state = DsrState(horizon=5)
        for r in (0.01, -0.005, 0.02):
            assert state.update(r) == 0.0
        assert state.warm_count == 3
        assert state.mu != 0.0

    def test_replay_is_deterministic(self):
        returns = np.random.default_rng(3).normal(0, 0.01, 100)
        a = [DsrState(horizon=8).update(r) for r in returns]  # noqa: F841 (fresh states)
        s1, s2 = DsrState(horizon=8), DsrState(horizon=8)
        out1 = [s1.update(r) for r in returns]
        out2 = [s2.update(r) for r in returns]
        assert out1 == out2

    def test_ewma_converges_toward_sample_mean(self):
        rng = np.random.default_rng(11)
        horizon = 10
        returns = rng.normal(0.001, 0.01, size=20 * horizon)
        state = DsrState(horizon=horizon)
        for r in returns:
            state.update(r)
        spread = 3.0 / math.sqrt(horizon) * returns.std()
        assert abs(state.mu - returns.mean()) < spread

    def test_non_finite_return_rejected(self):
        with pytest.raises(ValueError):
            DsrState(horizon=5).update(float("nan"))


class TestDrawdownPenalty:
    def test_new_high_has_zero_penalty(self):
        tracker = DrawdownTracker(peak_equity=100.0, eta_dd=10.0)
        assert tracker.penalty(120.0) == 0.0
        assert tracker.peak_equity == 120.0

    def test_recovery_has_zero_penalty(self):
        tracker = DrawdownTracker(peak_equity=100.0, eta_dd=10.0)
        tracker.penalty(90.0)
        assert tracker.penalty(95.0) == 0.0

    def test_five_percent_drop_with_eta_ten(self):
        tracker = DrawdownTracker(peak_equity=100.0, eta_dd=10.0)
        assert tracker.penalty(95.0) == pytest.approx(0.025, rel=1e-12)

    def test_penalty_nonnegative_on_random_path(self):
        rng = np.random.default_rng(5)
        tracker = DrawdownTracker(peak_equity=100.0, eta_dd=3.0)
        equity = 100.0 * np.cumprod(1 + rng.normal(0, 0.02, 300))
        for v in equity:
            assert tracker.penalty(float(v)) >= 0.0

    def test_matches_scratch_recomputation(self):
        rng = np.random.default_rng(9)
        equity = 100.0 * np.cumprod(1 + rng.normal(0, 0.02, 200))
        tracker = DrawdownTracker(peak_equity=100.0, eta_dd=7.0)
        got = [tracker.penalty(float(v)) for v in equity]
        peaks = np.maximum.accumulate(np.concatenate(([100.0], equity)))[1:]
        dd = 1.0 - equity / peaks
        deltas = np.maximum(0.0, np.diff(np.concatenate(([0.0], dd))))
        np.testing.assert_allclose(got, 7.0 * deltas**2, rtol=1e-12, atol=1e-15)


class TestRewardComposition:
    def test_zero_inputs_zero_reward(self):
        assert reward_mace(0.0, 0.0, 100.0) == 0.0

    def test_weighted_difference(self):
        assert reward_mace(0.1, 0.025, 100.0) == pytest.approx(7.5, rel=1e-12)

    def test_zero_scale_kills_everything(self):
        assert reward_mace(1.23, 0.4, 0.0) == 0.0


class TestLogReturnReward:
    def test_flat_value_is_zero(self):
        assert reward_log_return(1_000_000.0, 1_000_000.0) == 0.0

    def test_one_percent_gain(self):
        assert reward_log_return(1_010_000.0, 1_000_000.0) == pytest.approx(0.00995033, abs=1e-8)

    def test_non_positive_value_rejected(self):
        with pytest.raises(ValueError):
            reward_log_return(0.0, 1_000_000.0)


class TestMarginReward:
    def test_flat_equity_empty_window_is_zero(self):
        assert reward_margin(0.0, 100_000.0, [], 0.1) == 0.0

    def test_constant_window_has_no_sharpe_term(self):
        assert reward_margin(0.0, 100_000.0, [0.01] * 10, 0.1) == 0.0

    def test_composition_arithmetic(self):
        # Window engineered to a rolling Sharpe of exactly 0.5.
        window = [0.01, 0.01, 0.03]
        sr = rolling_sharpe(window)
        w = 0.05 / sr
        assert reward_margin(1_000.0, 100_000.0, window, w) == pytest.approx(0.06, rel=1e-9)

    def test_single_observation_window_has_no_sharpe_term(self):
        assert reward_margin(500.0, 100_000.0, [0.02], 0.1) == pytest.approx(0.005, rel=1e-12)
