"""Episode runner: config in, deterministic trace and report files out.

A run loads the data, carves the usable calendar into in-sample and
out-of-sample segments, steps the configured environment under a scripted
policy, and writes trace.csv, daily.csv, and report.json (plus weights.csv
for the portfolio environment). Everything emitted is a pure function of
(config, seed): no timestamps, no absolute paths.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .analytics import EpisodeMetrics, write_report_json
from .config import RunConfig, canonical_model_name
from .envs import ENV_KINDS, PortfolioEnv, TradingEnvBase
from .errors import ConfigError
from .market_data import MarketFrame, load_ohlcv
from .policies import PolicyContext, make_policy

REPORT_VERSION = 1


@dataclass
class EpisodeResult:
    metrics: EpisodeMetrics
    env: TradingEnvBase
    reward_sum: float
    start: int
    end: int
    paths: dict[str, Path]


def split_bounds(frame: MarketFrame, cfg: RunConfig) -> tuple[int, int]:
    """Episode [start, end] day indices for the configured segment.

    Warm-up days precede the in-sample segment; the split fraction divides
    the usable days (not the raw calendar).
    """
    first = frame.first_usable_index(cfg.env_config.indicators)
    lo, hi = first, frame.n_days - 1
    if cfg.start is not None:
        eligible = [i for i, d in enumerate(frame.calendar) if d >= cfg.start]
        if not eligible:
            raise ConfigError(f"start date {cfg.start} is after the last data day")
        lo = max(lo, eligible[0])
    if cfg.end is not None:
        eligible = [i for i, d in enumerate(frame.calendar) if d <= cfg.end]
        if not eligible:
            raise ConfigError(f"end date {cfg.end} is before the first data day")
        hi = min(hi, eligible[-1])
    if lo >= hi:
        raise ConfigError(f"no usable days between indices {lo} and {hi}")
    split_at = lo + int((hi - lo) * cfg.split)
    if cfg.segment == "is":
        lo, hi = lo, split_at
    elif cfg.segment == "oos":
        lo, hi = split_at, hi
    if lo >= hi:
        raise ConfigError(f"segment {cfg.segment!r} is empty under split {cfg.split}")
    return lo, hi


def build_env(frame: MarketFrame, cfg: RunConfig) -> TradingEnvBase:
    start, end = split_bounds(frame, cfg)
    env_cls = ENV_KINDS[cfg.env]
    return env_cls(frame, cfg.env_config, cfg.impact, start=start, end=end)


def rollout(env: TradingEnvBase, cfg: RunConfig) -> float:
    """Step the environment to termination under the configured policy."""
    policy = make_policy(cfg.policy_kind, cfg.seed, cfg.policy_params)
    policy.reset()
    env.reset()
    reward_sum = 0.0
    step = 0
    while not env.terminated:
        ctx = PolicyContext(
            env_kind=cfg.env,
            day_index=env.day,
            step=step,
            n_assets=env.n,
            frame=env.frame,
            holdings=env.holdings.copy(),
            cash=env.cash,
            equity=env.v_prev,
            prices=env.mark_prices,
        )
        result = env.step(policy.act(ctx))
        reward_sum += result.reward
        step += 1
    return reward_sum


def run_episode(cfg: RunConfig, out_dir=None) -> EpisodeResult:
    frame = load_ohlcv(cfg.data, cfg.tickers)
    env = build_env(frame, cfg)
    reward_sum = rollout(env, cfg)
    metrics = env.log.metrics()
    paths: dict[str, Path] = {}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths["trace"] = out / "trace.csv"
        env.log.write_trace_csv(paths["trace"])
        paths["daily"] = out / "daily.csv"
        env.log.write_daily_csv(paths["daily"])
        if isinstance(env, PortfolioEnv):
            paths["weights"] = out / "weights.csv"
            env.write_weights_csv(paths["weights"])
        paths["report"] = out / "report.json"
        write_report_json(paths["report"], episode_report(cfg, env, metrics, reward_sum))
    return EpisodeResult(metrics, env, reward_sum, env.start, env.end, paths)


def episode_report(cfg: RunConfig, env: TradingEnvBase, metrics: EpisodeMetrics,
                   reward_sum: float) -> dict:
    report = {
        "report_version": REPORT_VERSION,
        "config": cfg.to_dict(),
        "split": {
            "start_day": env.frame.calendar[env.start],
            "end_day": env.frame.calendar[env.end],
            "segment": cfg.segment,
            "n_steps": env.end - env.start,
        },
        "metrics": metrics.to_dict(),
        "reward_sum": reward_sum,
        "n_trades": len(env.log.trades),
    }
    # The output directory is a CLI concern; keep it out of the report so
    # identical configs produce identical bytes wherever they run.
    report["config"]["out"] = None
    return report


def compare_cost_models(cfg: RunConfig, models: list[str], out_dir=None) -> dict:
    """Run the identical policy/data under each impact model, side by side.

    Each model gets a fresh environment over the shared immutable frame, so
    run order cannot leak state between them.
    """
    if len(models) < 2:
        raise ConfigError("compare needs at least 2 models")
    kinds = [canonical_model_name(m) for m in models]
    if len(set(kinds)) != len(kinds):
        raise ConfigError(f"duplicate models in {models}")
    frame = load_ohlcv(cfg.data, cfg.tickers)
    per_model: dict[str, dict] = {}
    days: list[str] = []
    for kind in kinds:
        run_cfg = replace(cfg, impact=replace(cfg.impact, model_kind=kind))
        env = build_env(frame, run_cfg)
        reward_sum = rollout(env, run_cfg)
        metrics = env.log.metrics()
        days = env.log.days
        per_model[kind] = {
            "metrics": metrics.to_dict(),
            "daily_cost": list(env.log.day_cost),
            "daily_equity": list(env.log.equity),
            "reward_sum": reward_sum,
        }
    payload = {
        "report_version": REPORT_VERSION,
        "config": cfg.to_dict(),
        "models": per_model,
        "days": days,
    }
    payload["config"]["out"] = None
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_report_json(out / "comparison.json", payload)
        _write_comparison_csv(out / "daily_costs.csv", days, per_model)
    return payload


def _write_comparison_csv(path: Path, days: list[str], per_model: dict) -> None:
    kinds = list(per_model)
    header = "day," + ",".join(f"cost_{k}" for k in kinds) + "," + ",".join(
        f"equity_{k}" for k in kinds
    )
    lines = [header]
    for i, day in enumerate(days):
        costs = ",".join(repr(per_model[k]["daily_cost"][i]) for k in kinds)
        equities = ",".join(repr(per_model[k]["daily_equity"][i]) for k in kinds)
        lines.append(f"{day},{costs},{equities}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
