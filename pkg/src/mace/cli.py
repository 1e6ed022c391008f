"""Command-line surface.

Subcommands:
    run       execute one configured episode and write trace/report files
    compare   run the same policy/data under several impact models
    validate  schema-check a config without running it
    report    re-render metrics from an existing trace (and daily) CSV

Exit codes: 0 success, 1 config error, 2 data error, 3 runtime invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analytics import (
    EpisodeMetrics, annualized_sharpe, annualized_volatility, max_drawdown,
    read_trace_csv,
)
from .config import load_config, validate_config
from .errors import ConfigError, DataError, InvariantViolation
from .runner import REPORT_VERSION, compare_cost_models, run_episode


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one episode from a config file")
    run_p.add_argument("--config", required=True)
    run_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    run_p.add_argument("--out", default=None, help="output directory (default: config `out`)")
    run_p.add_argument("--data", default=None, help="override the config data path")

    cmp_p = sub.add_parser("compare", help="run the same episode under several cost models")
    cmp_p.add_argument("--config", required=True)
    cmp_p.add_argument("--models", required=True, help="comma list, e.g. flat,ac,sqrt,ow")
    cmp_p.add_argument("--seed", type=int, default=None)
    cmp_p.add_argument("--out", default=None)
    cmp_p.add_argument("--data", default=None)

    val_p = sub.add_parser("validate", help="check a config file without running")
    val_p.add_argument("--config", required=True)

    rep_p = sub.add_parser("report", help="re-render metrics from an existing trace CSV")
    rep_p.add_argument("--trace", required=True)
    return parser


def _load(args) -> "RunConfig":
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if getattr(args, "data", None) is not None:
        cfg.data = args.data
    return cfg


def _out_dir(args, cfg) -> str | None:
    if args.out is not None:
        return args.out
    if cfg.out is not None:
        out = Path(cfg.out)
        return str(out if out.is_absolute() else Path(args.config).parent / out)
    return None


def cmd_run(args) -> int:
    cfg = _load(args)
    result = run_episode(cfg, _out_dir(args, cfg))
    m = result.metrics
    print(
        f"{cfg.env} episode {result.start}..{result.end}: "
        f"total_return={m.total_return:.4%} sharpe={m.annualized_sharpe:.3f} "
        f"max_dd={m.max_drawdown:.4%} total_cost={m.total_cost:.2f}"
    )
    for name, path in sorted(result.paths.items()):
        print(f"  {name}: {path}")
    return 0


def cmd_compare(args) -> int:
    cfg = _load(args)
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    payload = compare_cost_models(cfg, models, _out_dir(args, cfg))
    for kind, entry in payload["models"].items():
        m = entry["metrics"]
        print(
            f"{kind}: total_return={m['total_return']:.4%} "
            f"total_cost={m['total_cost']:.2f} avg_pov={m['avg_order_pov']:.4f}"
        )
    return 0


def cmd_validate(args) -> int:
    diags = validate_config(args.config)
    for d in diags:
        print(d)
    if any(d.level == "error" for d in diags):
        return 1
    print("ok" if not diags else "ok (with warnings)")
    return 0


def cmd_report(args) -> int:
    trace_path = Path(args.trace)
    trades = read_trace_csv(trace_path)
    payload: dict = {
        "report_version": REPORT_VERSION,
        "n_trades": len(trades),
        "total_cost": sum(t.total_cost for t in trades),
        "avg_order_pov": float(np.mean([t.pov for t in trades])) if trades else 0.0,
        "total_notional": sum(t.notional for t in trades),
    }
    daily_path = trace_path.parent / "daily.csv"
    if daily_path.exists():
        rows = daily_path.read_text(encoding="utf-8").strip().splitlines()[1:]
        equity = [float(r.split(",")[1]) for r in rows]
        returns = [float(r.split(",")[2]) for r in rows]
        turnovers = [float(r.split(",")[5]) for r in rows]
        total_return = equity[-1] / (equity[0] / (1.0 + returns[0])) - 1.0
        payload["metrics"] = EpisodeMetrics(
            total_return=total_return,
            annualized_return=(1.0 + total_return) ** (252 / len(returns)) - 1.0,
            annualized_sharpe=annualized_sharpe(returns) if len(returns) > 1 else 0.0,
            annualized_volatility=annualized_volatility(returns),
            max_drawdown=max_drawdown([equity[0] / (1.0 + returns[0])] + equity),
            avg_daily_turnover=float(np.mean(turnovers)),
            avg_order_pov=payload["avg_order_pov"],
            total_cost=payload["total_cost"],
            avg_daily_cost=payload["total_cost"] / len(rows),
        ).to_dict()
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "validate": cmd_validate, "report": cmd_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
