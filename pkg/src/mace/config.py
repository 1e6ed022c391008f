"""Run configuration: one YAML file reproduces one experiment.

Schema (version 1):

    schema_version: 1
    data: fixture.csv          # OHLCV CSV, relative paths resolve against
    tickers: [AAA, BBB, CCC]   # the config file's directory
    env: mace                  # mace | margin | poe
    split: 0.9                 # IS fraction of usable days
    segment: oos               # is | oos | full
    start: 2020-01-01          # optional calendar bounds (inclusive)
    end: 2020-12-31
    seed: 7
    out: runs/demo             # optional default output directory
    env_config: { phi: 0.02, max_pov: 0.05, ... }       # see EnvConfig
    impact: { model_kind: AlmgrenChriss, alpha: 1.0, ... }  # see ImpactParams
    policy: { kind: hold, params: {} }

`validate_config` checks everything without running and reports every
violation; `load_config` raises ConfigError on the first of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .envs import ENV_KINDS, EnvConfig
from .errors import ConfigError
from .impact import SQUARE_ROOT, ImpactParams, Y_BAND
from .policies import POLICY_KINDS

SCHEMA_VERSION = 1
SEGMENTS = ("is", "oos", "full")
TOP_LEVEL_KEYS = {
    "schema_version", "data", "tickers", "env", "split", "segment",
    "start", "end", "seed", "out", "env_config", "impact", "policy",
}

#: Short model aliases accepted by `compare --models`.
MODEL_ALIASES = {
    "flat": "FlatBps",
    "sqrt": "SquareRoot",
    "ac": "AlmgrenChriss",
    "ow": "ObizhaevaWang",
}


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "error" | "warning"
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.level}: {self.field}: {self.message}"


@dataclass
class RunConfig:
    data: str
    tickers: list[str]
    env: str = "mace"
    split: float = 0.9
    segment: str = "oos"
    start: str | None = None
    end: str | None = None
    seed: int = 0
    out: str | None = None
    env_config: EnvConfig = field(default_factory=EnvConfig)
    impact: ImpactParams = field(default_factory=ImpactParams)
    policy_kind: str = "hold"
    policy_params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "data": self.data,
            "tickers": list(self.tickers),
            "env": self.env,
            "split": self.split,
            "segment": self.segment,
            "start": self.start,
            "end": self.end,
            "seed": self.seed,
            "out": self.out,
            "env_config": self.env_config.to_dict(),
            "impact": self.impact.to_dict(),
            "policy": {"kind": self.policy_kind, "params": dict(self.policy_params)},
        }


def dump_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True)


def _as_date(value) -> str | None:
    return None if value is None else str(value)


def validate_dict(raw: dict, base_dir: Path) -> tuple[list[Diagnostic], RunConfig | None]:
    """Full schema and invariant check; returns every violation found."""
    diags: list[Diagnostic] = []

    def err(field_name: str, message: str) -> None:
        diags.append(Diagnostic("error", field_name, message))

    def warn(field_name: str, message: str) -> None:
        diags.append(Diagnostic("warning", field_name, message))

    if not isinstance(raw, dict):
        return [Diagnostic("error", "<root>", "config must be a mapping")], None

    for key in sorted(set(raw) - TOP_LEVEL_KEYS):
        err(key, "unknown top-level key")

    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        err("schema_version", f"unsupported version {version!r}; this build reads {SCHEMA_VERSION}")

    data = raw.get("data")
    if not isinstance(data, str) or not data:
        err("data", "required: path to an OHLCV CSV")
        data_path = None
    else:
        data_path = Path(data)
        if not data_path.is_absolute():
            data_path = base_dir / data_path
        if not data_path.exists():
            err("data", f"file not found: {data_path}")

    tickers = raw.get("tickers")
    if not isinstance(tickers, list) or not tickers or not all(isinstance(t, str) for t in tickers):
        err("tickers", "required: nonempty list of ticker strings")
        tickers = []
    elif len(set(tickers)) != len(tickers):
        err("tickers", "duplicate tickers")

    env = raw.get("env", "mace")
    if env not in ENV_KINDS:
        err("env", f"unknown environment {env!r}; allowed: {', '.join(sorted(ENV_KINDS))}")

    split = raw.get("split", 0.9)
    if not isinstance(split, (int, float)) or not 0.0 < float(split) < 1.0:
        err("split", f"must be in (0, 1), got {split!r}")

    segment = raw.get("segment", "oos")
    if segment not in SEGMENTS:
        err("segment", f"must be one of {', '.join(SEGMENTS)}")

    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        err("seed", f"must be an integer, got {seed!r}")
        seed = 0

    env_config = EnvConfig()
    try:
        env_config = EnvConfig.from_dict(raw.get("env_config", {}) or {})
    except (ConfigError, TypeError) as exc:
        err("env_config", str(exc))

    impact = ImpactParams()
    try:
        impact = ImpactParams.from_dict(raw.get("impact", {}) or {})
    except (ValueError, TypeError) as exc:
        err("impact", str(exc))
    else:
        lo, hi = Y_BAND
        if impact.model_kind == SQUARE_ROOT and not lo <= impact.Y <= hi:
            warn("impact.Y", f"{impact.Y} outside the usual calibration band [{lo}, {hi}]")

    policy_raw = raw.get("policy", {}) or {}
    policy_kind = policy_raw.get("kind", "hold") if isinstance(policy_raw, dict) else "hold"
    policy_params = policy_raw.get("params", {}) or {} if isinstance(policy_raw, dict) else {}
    if not isinstance(policy_raw, dict):
        err("policy", "must be a mapping with keys kind/params")
    elif set(policy_raw) - {"kind", "params"}:
        err("policy", f"unknown key(s): {sorted(set(policy_raw) - {'kind', 'params'})}")
    if policy_kind not in POLICY_KINDS:
        err("policy.kind", f"unknown policy {policy_kind!r}; allowed: {', '.join(sorted(POLICY_KINDS))}")
    elif env in ENV_KINDS and not POLICY_KINDS[policy_kind].supports(env):
        err("policy.kind", f"policy {policy_kind!r} does not support the {env!r} environment")

    if diags and any(d.level == "error" for d in diags):
        return diags, None

    cfg = RunConfig(
        data=str(data_path),
        tickers=list(tickers),
        env=env,
        split=float(split),
        segment=segment,
        start=_as_date(raw.get("start")),
        end=_as_date(raw.get("end")),
        seed=seed,
        out=raw.get("out"),
        env_config=env_config,
        impact=impact,
        policy_kind=policy_kind,
        policy_params=dict(policy_params),
    )
    return diags, cfg


def validate_config(path) -> list[Diagnostic]:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        return [Diagnostic("error", "<file>", f"invalid YAML: {exc}")]
    diags, _ = validate_dict(raw, path.parent)
    return diags


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    diags, cfg = validate_dict(raw, path.parent)
    errors = [d for d in diags if d.level == "error"]
    if errors:
        raise ConfigError("; ".join(str(d) for d in errors))
    assert cfg is not None
    return cfg


def canonical_model_name(name: str) -> str:
    if name in MODEL_ALIASES:
        return MODEL_ALIASES[name]
    if name in MODEL_ALIASES.values():
        return name
    raise ConfigError(
        f"unknown impact model {name!r}; allowed: "
        + ", ".join(sorted(set(MODEL_ALIASES) | set(MODEL_ALIASES.values())))
    )
