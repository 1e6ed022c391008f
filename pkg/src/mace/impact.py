"""Pluggable execution-cost models and the permanent-impact ledger.

Four models share one interface: a flat basis-point fee, the square-root
impact law, a linear-impact cost decomposition into spread / temporary /
permanent components, and an experimental resilience variant of the latter
that decays its permanent displacement at its own per-model rate.

Cost components are always charged as nonnegative amounts: a sell pushes
the price down and realizes less, a buy pushes it up and pays more, so the
adverse magnitude is a cost on either side. The trade's direction survives
only in `permanent_price_shift`, which the ledger accumulates per ticker
and decays geometrically once per trading day.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, fields, replace

from .errors import DataError

#: Effective prices never drop below one tick, keeping them positive under
#: extreme synthetic stress.
MIN_TICK = 0.01

FLAT_BPS = "FlatBps"
SQUARE_ROOT = "SquareRoot"
ALMGREN_CHRISS = "AlmgrenChriss"
OBIZHAEVA_WANG = "ObizhaevaWang"
MODEL_KINDS = (FLAT_BPS, SQUARE_ROOT, ALMGREN_CHRISS, OBIZHAEVA_WANG)

#: Calibration band for the square-root prefactor; values outside it are
#: legal but flagged by config validation.
Y_BAND = (0.5, 1.0)


@dataclass
class ImpactParams:
    """Coefficients shared by all cost models.

    Serialized to/from the `impact` section of a run configuration with
    these exact key names.
    """

    model_kind: str = ALMGREN_CHRISS
    flat_bps: float = 0.0010
    Y: float = 0.7
    alpha: float = 1.0
    beta: float = 1.0
    epsilon: float = 0.0005
    half_life_days: float = 5.0
    #: Per-day decay rate for the resilience model only; None falls back to
    #: the global half-life (making it coincide with the linear-impact model).
    ow_resilience: float | None = None

    def validate(self) -> None:
        if self.model_kind not in MODEL_KINDS:
            raise ValueError(
                f"unknown model_kind {self.model_kind!r}; allowed: {', '.join(MODEL_KINDS)}"
            )
        for name in ("flat_bps", "Y", "alpha", "beta", "epsilon"):
            if getattr(self, name) < 0:
                raise ValueError(f"impact.{name} must be >= 0")
        if self.half_life_days <= 0:
            raise ValueError("impact.half_life_days must be > 0")
        if self.ow_resilience is not None and not 0.0 <= self.ow_resilience < 1.0:
            raise ValueError("impact.ow_resilience must be in [0, 1)")

    def zeroed(self) -> "ImpactParams":
        """Frictionless copy: every coefficient zero, same kind and half-life."""
        return replace(self, flat_bps=0.0, Y=0.0, alpha=0.0, beta=0.0, epsilon=0.0)

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        if out["ow_resilience"] is None:
            del out["ow_resilience"]
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "ImpactParams":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown impact key(s): {', '.join(sorted(unknown))}")
        raw = dict(raw)
        for f in fields(cls):
            value = raw.get(f.name)
            if value is None or f.name == "model_kind":
                continue
            try:
                raw[f.name] = float(value)
            except (TypeError, ValueError):
                raise ValueError(f"impact.{f.name}: not a number: {value!r}") from None
        params = cls(**raw)
        params.validate()
        return params


@dataclass(frozen=True)
class CostBreakdown:
    """Execution cost of one order, split by mechanism.

    All cost components are nonnegative; `total` is their sum. The signed
    `permanent_price_shift` (currency per share) is what the trade leaves
    behind in the ledger.
    """

    spread_cost: float = 0.0
    temporary_cost: float = 0.0
    permanent_cost: float = 0.0
    permanent_price_shift: float = 0.0
    total: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "total", self.spread_cost + self.temporary_cost + self.permanent_cost
        )


ZERO_COST = CostBreakdown()


def cost_flat(x: float, price: float, flat_bps: float = 0.0010) -> CostBreakdown:
    """Flat fee proportional to traded notional; no price displacement."""
    if price <= 0:
        raise ValueError("price must be > 0")
    return CostBreakdown(spread_cost=flat_bps * abs(x) * price)


def impact_sqrt(q: float, v: float, sigma: float, y: float) -> float:
    """Expected impact of an unsigned order of q shares, as a return.

    Scales with volatility and the square root of the participation q/v.
    """
    if q == 0:
        return 0.0
    if v <= 0:
        raise ValueError("invalid liquidity: daily volume must be > 0")
    if q < 0 or sigma < 0:
        raise ValueError("q and sigma must be >= 0")
    return y * sigma * math.sqrt(q / v)


def cost_sqrt(x: float, price: float, v: float, sigma: float, y: float) -> CostBreakdown:
    """Square-root-law cost of a signed trade, booked as temporary impact.

    The model describes aggregate adverse price movement, so the whole
    charge lands in the temporary component and nothing posts to the
    permanent ledger.
    """
    if price <= 0:
        raise ValueError("price must be > 0")
    if x == 0:
        return ZERO_COST
    return CostBreakdown(temporary_cost=impact_sqrt(abs(x), v, sigma, y) * abs(x) * price)


def cost_ac(
    x: float, price: float, sigma: float, v: float, alpha: float, beta: float, epsilon: float
) -> CostBreakdown:
    """Linear-impact cost decomposition of a single-period trade.

    spread = epsilon * |x| * price
    temporary = beta * sigma * (x^2 / v) * price
    permanent cost = alpha/2 * sigma * (x^2 / v) * price
    permanent price shift = alpha * sigma * (x / v) * price (signed)
    """
    if price <= 0:
        raise ValueError("price must be > 0")
    if x == 0:
        return ZERO_COST
    if v <= 0:
        raise ValueError("invalid liquidity: daily volume must be > 0")
    depth = sigma * (x * x / v) * price
    return CostBreakdown(
        spread_cost=epsilon * abs(x) * price,
        temporary_cost=beta * depth,
        permanent_cost=0.5 * alpha * depth,
        permanent_price_shift=alpha * sigma * (x / v) * price,
    )


def decay_lambda(half_life_days: float) -> float:
    """Per-day decay rate giving the requested displacement half-life."""
    return 1.0 - 2.0 ** (-1.0 / half_life_days)


class ImpactLedger:
    """Outstanding permanent price displacement per ticker.

    Same-day trades accumulate additively; `decay_step` applies once per
    trading day, shrinking every displacement by the factor (1 - lambda).
    """

    def __init__(self, tickers) -> None:
        self.displacement: dict[str, float] = {t: 0.0 for t in tickers}

    def apply_trade(self, ticker: str, shift: float) -> None:
        if ticker not in self.displacement:
            raise DataError(f"unknown ticker {ticker!r} in impact ledger")
        self.displacement[ticker] += shift

    def decay_step(self, lam: float) -> None:
        keep = 1.0 - lam
        for ticker in self.displacement:
            self.displacement[ticker] *= keep

    def effective_price(self, base: float, ticker: str, floor: float = MIN_TICK) -> float:
        """Base price plus outstanding displacement, floored at one tick."""
        if base <= 0:
            raise ValueError("base price must be > 0")
        return max(base + self.displacement[ticker], floor)


class ImpactModel(ABC):
    """Cost-model interface: signed shares and market context in, breakdown out."""

    kind: str

    def __init__(self, params: ImpactParams) -> None:
        params.validate()
        self.params = params

    @abstractmethod
    def cost(self, x: float, price: float, sigma: float, adv: float) -> CostBreakdown:
        """Cost of trading x signed shares at `price` given volatility and ADV."""

    def decay_lambda(self) -> float:
        """Daily decay rate this model's permanent displacement follows."""
        return decay_lambda(self.params.half_life_days)


class FlatBpsModel(ImpactModel):
    kind = FLAT_BPS

    def cost(self, x, price, sigma, adv):
        return cost_flat(x, price, self.params.flat_bps)


class SquareRootModel(ImpactModel):
    kind = SQUARE_ROOT

    def cost(self, x, price, sigma, adv):
        return cost_sqrt(x, price, adv, sigma, self.params.Y)


class AlmgrenChrissModel(ImpactModel):
    kind = ALMGREN_CHRISS

    def cost(self, x, price, sigma, adv):
        p = self.params
        return cost_ac(x, price, sigma, adv, p.alpha, p.beta, p.epsilon)


class ObizhaevaWangModel(AlmgrenChrissModel):
    """Experimental resilience variant.

    Books the same per-trade breakdown as the linear-impact model but decays
    its posted displacement at `ow_resilience` per day instead of the global
    half-life rate. With `ow_resilience` unset the two models coincide.
    """

    kind = OBIZHAEVA_WANG

    def decay_lambda(self) -> float:
        if self.params.ow_resilience is not None:
            return self.params.ow_resilience
        return super().decay_lambda()


MODEL_REGISTRY: dict[str, type[ImpactModel]] = {
    FLAT_BPS: FlatBpsModel,
    SQUARE_ROOT: SquareRootModel,
    ALMGREN_CHRISS: AlmgrenChrissModel,
    OBIZHAEVA_WANG: ObizhaevaWangModel,
}


def make_model(params: ImpactParams) -> ImpactModel:
    try:
        cls = MODEL_REGISTRY[params.model_kind]
    except KeyError:
        raise ValueError(
            f"unknown model_kind {params.model_kind!r}; allowed: {', '.join(MODEL_REGISTRY)}"
        ) from None
    return cls(params)
