"""Terminal payoffs with the analytic metadata the pricing engine needs."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


class Shape(enum.Enum):
    INCREASING_CONVEX = "increasing_convex"
    DECREASING_CONCAVE = "decreasing_concave"
    NEITHER = "neither"


@dataclass(frozen=True)
class PayoffSpec:
    """A terminal payoff x -> psi(x).

    ``lipschitz_constant`` is the global bound used by the slope-propagation
    diagnostics; for the exponential payoff it is unbounded and callers must
    use :meth:`lipschitz_on` with the truncated domain instead.
    """

    kind: str
    params: tuple = ()
    lipschitz_constant: float = math.inf
    shape: Shape = Shape.NEITHER
    _fn: object = field(default=None, repr=False, compare=False)

    def sample(self, x):
        return self._fn(np.asarray(x, dtype=float))

    def __call__(self, x):
        return self.sample(x)

    def lipschitz_on(self, x_min: float, x_max: float) -> float:
        if math.isfinite(self.lipschitz_constant):
            return self.lipschitz_constant
        if self.kind == "exponential":
            u = self.params[0]
            return abs(u) * math.exp(max(u * x_min, u * x_max))
        return math.inf

    def to_config(self) -> dict:
        if self.kind == "call":
            return {"kind": "call", "strike": self.params[0]}
        if self.kind == "butterfly":
            return {"kind": "butterfly", "k1": self.params[0], "k2": self.params[1], "k3": self.params[2]}
        if self.kind == "exponential":
            return {"kind": "exponential", "u": self.params[0]}
        if self.kind == "constant":
            return {"kind": "constant", "c": self.params[0]}
        if self.kind == "identity":
            return {"kind": "identity"}
        if self.kind == "custom":
            xs, ys = self.params
            return {"kind": "custom", "x": list(xs), "y": list(ys)}
        raise ConfigError(f"unknown payoff kind {self.kind!r}")


def call(strike: float) -> PayoffSpec:
    k = float(strike)
    return PayoffSpec(
        kind="call",
        params=(k,),
        lipschitz_constant=1.0,
        shape=Shape.INCREASING_CONVEX,
        _fn=lambda x: np.maximum(x - k, 0.0),
    )


def butterfly(k1: float, k2: float, k3: float) -> PayoffSpec:
    k1, k2, k3 = float(k1), float(k2), float(k3)
    if not (k1 < k2 < k3):
        raise ConfigError(f"butterfly strikes must increase: {k1}, {k2}, {k3}")

    def fn(x):
        return (
            np.maximum(x - k1, 0.0)
            - 2.0 * np.maximum(x - k2, 0.0)
            + np.maximum(x - k3, 0.0)
        )

    return PayoffSpec(
        kind="butterfly",
        params=(k1, k2, k3),
        lipschitz_constant=2.0,
        shape=Shape.NEITHER,
        _fn=fn,
    )


def exponential(u: float) -> PayoffSpec:
    u = float(u)
    shape = Shape.INCREASING_CONVEX if u >= 0.0 else Shape.NEITHER
    return PayoffSpec(
        kind="exponential",
        params=(u,),
        lipschitz_constant=math.inf,
        shape=shape,
        _fn=lambda x: np.exp(u * x),
    )


def constant(c: float) -> PayoffSpec:
    c = float(c)
    return PayoffSpec(
        kind="constant",
        params=(c,),
        lipschitz_constant=0.0,
        shape=Shape.INCREASING_CONVEX,
        _fn=lambda x: np.full_like(np.asarray(x, dtype=float), c),
    )


def identity() -> PayoffSpec:
    return PayoffSpec(
        kind="identity",
        params=(),
        lipschitz_constant=1.0,
        shape=Shape.INCREASING_CONVEX,
        _fn=lambda x: np.asarray(x, dtype=float).copy(),
    )


def custom(xs, ys) -> PayoffSpec:
    """Piecewise-linear payoff from a sample table, extrapolated flat."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
        raise ConfigError("custom payoff needs matching 1-d x/y tables with >= 2 entries")
    if not np.all(np.diff(xs) > 0.0):
        raise ConfigError("custom payoff table must be strictly increasing in x")
    slopes = np.diff(ys) / np.diff(xs)
    lip = float(np.max(np.abs(slopes))) if slopes.size else 0.0
    if np.all(slopes >= 0.0) and np.all(np.diff(slopes) >= 0.0):
        shape = Shape.INCREASING_CONVEX
    elif np.all(slopes <= 0.0) and np.all(np.diff(slopes) <= 0.0):
        shape = Shape.DECREASING_CONCAVE
    else:
        shape = Shape.NEITHER
    return PayoffSpec(
        kind="custom",
        params=(tuple(xs.tolist()), tuple(ys.tolist())),
        lipschitz_constant=lip,
        shape=shape,
        _fn=lambda x: np.interp(x, xs, ys),
    )


def from_config(data: dict) -> PayoffSpec:
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError("payoff config must be an object with a 'kind' key")
    kind = data["kind"]
    keys = set(data) - {"kind"}
    if kind == "call":
        if keys != {"strike"}:
            raise ConfigError("call payoff takes exactly the key 'strike'")
        return call(data["strike"])
    if kind == "butterfly":
        if keys != {"k1", "k2", "k3"}:
            raise ConfigError("butterfly payoff takes exactly the keys k1, k2, k3")
        return butterfly(data["k1"], data["k2"], data["k3"])
    if kind == "exponential":
        if keys != {"u"}:
            raise ConfigError("exponential payoff takes exactly the key 'u'")
        return exponential(data["u"])
    if kind == "constant":
        if keys != {"c"}:
            raise ConfigError("constant payoff takes exactly the key 'c'")
        return constant(data["c"])
    if kind == "identity":
        if keys:
            raise ConfigError("identity payoff takes no extra keys")
        return identity()
    if kind == "custom":
        if keys != {"x", "y"}:
            raise ConfigError("custom payoff takes exactly the keys 'x' and 'y'")
        return custom(data["x"], data["y"])
    raise ConfigError(f"unknown payoff kind {kind!r}")
