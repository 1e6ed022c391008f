"""Online observation normalization with serializable state.

One streaming pass maintains per-dimension mean and population variance via
the numerically stable single-observation update. State serializes to a
versioned JSON payload (count, mean, var, frozen) whose floats round-trip
bit-exactly, so statistics fitted on a training segment can be frozen and
reused for out-of-sample evaluation.
"""

from __future__ import annotations

import json

import numpy as np

#: Denominator floor so the first observations normalize to finite values.
NORM_EPS = 1e-8

PAYLOAD_VERSION = 1


class OnlineNormalizer:
    def __init__(self, dim: int) -> None:
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self.count = 0
        self.mean = np.zeros(dim)
        self.var = np.zeros(dim)
        self.frozen = False

    def update(self, obs) -> np.ndarray:
        """Fold one observation into the statistics and return it normalized.

        When frozen, the stored statistics are applied without updating,
        making this a pure function of the input.
        """
        x = np.asarray(obs, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"observation shape {x.shape} != ({self.dim},)")
        if not self.frozen:
            self.count += 1
            delta = x - self.mean
            self.mean = self.mean + delta / self.count
            self.var = self.var + (delta * (x - self.mean) - self.var) / self.count
        return self.normalize(x)

    def normalize(self, obs) -> np.ndarray:
        x = np.asarray(obs, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"observation shape {x.shape} != ({self.dim},)")
        return (x - self.mean) / np.sqrt(self.var + NORM_EPS)

    def freeze(self) -> None:
        self.frozen = True

    def save(self) -> bytes:
        payload = {
            "version": PAYLOAD_VERSION,
            "count": self.count,
            "mean": self.mean.tolist(),
            "var": self.var.tolist(),
            "frozen": self.frozen,
        }
        return json.dumps(payload).encode("utf-8")

    @classmethod
    def load(cls, payload: bytes) -> "OnlineNormalizer":
        try:
            raw = json.loads(payload.decode("utf-8"))
            version = raw["version"]
            count = raw["count"]
            mean = np.asarray(raw["mean"], dtype=float)
            var = np.asarray(raw["var"], dtype=float)
            frozen = raw["frozen"]
        except (ValueError, KeyError, TypeError, UnicodeDecodeError) as exc:
            raise ValueError(f"corrupt normalizer payload: {exc}") from None
        if version != PAYLOAD_VERSION:
            raise ValueError(f"unsupported normalizer payload version {version}")
        if mean.ndim != 1 or mean.shape != var.shape or mean.size < 1:
            raise ValueError("corrupt normalizer payload: bad mean/var shape")
        out = cls(mean.size)
        out.count = int(count)
        out.mean = mean
        out.var = var
        out.frozen = bool(frozen)
        return out

    def state_equal(self, other: "OnlineNormalizer") -> bool:
        return (
            self.dim == other.dim
            and self.count == other.count
            and self.frozen == other.frozen
            and np.array_equal(self.mean, other.mean)
            and np.array_equal(self.var, other.var)
        )
