"""Monte Carlo oracle for corner-parameter affine laws.

Paths follow the Euler discretization of

    dX = (b0 + b1 X) dt + sqrt(a0 + a1 X^+) dW,

with the diffusion argument truncated at zero, so square-root models stay
well defined when a path dips negative (the drift is never truncated).  The
full-truncation label selects the same update; it is kept as a separate
scheme name because it is the positivity-respecting variant of record for
square-root diffusions, while plain Euler is the natural reading on the
real line where the diffusion level is bounded away from zero.

Randomness: one counter-based Philox stream keyed by the seed.  Uniform
variates are drawn step-major (for step k, a contiguous block of one draw
per simulated pair/path), mapped to normals by the inverse CDF.  The draw
order is a pure function of (seed, n_paths, n_steps, antithetic), so
results are reproducible bit for bit and independent of any execution
schedule or chunk size.  Antithetic pairing mirrors the increments of the
first half of the paths into the second half.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from . import backends
from .errors import ConfigError, NumericalError
from .params import CornerParams
from .payoffs import PayoffSpec

_CHUNK_SCALARS = 4_000_000


class SimScheme(enum.Enum):
    EULER = "euler"
    FULL_TRUNCATION = "full_truncation"


@dataclass(frozen=True)
class SimConfig:
    n_paths: int
    n_steps: int
    seed: int = 0
    scheme: SimScheme = SimScheme.EULER
    antithetic: bool = True

    def __post_init__(self):
        if self.n_paths < 2:
            raise ConfigError("need at least 2 paths")
        if self.n_steps < 1:
            raise ConfigError("need at least 1 step")
        if self.antithetic and self.n_paths % 2 != 0:
            raise ConfigError("antithetic sampling needs an even path count")


@dataclass(frozen=True)
class TerminalSamples:
    """Per-path terminal states, ready for payoff averaging."""

    terminal: np.ndarray
    discount_integral: np.ndarray | None
    min_state: np.ndarray | None
    antithetic: bool
    corner: CornerParams
    config: SimConfig
    warnings: tuple[str, ...] = ()

    @property
    def n_paths(self) -> int:
        return self.terminal.shape[0]


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_paths: int
    discounted: bool


def simulate_terminal(
    corner: CornerParams,
    x0: float,
    T: float,
    cfg: SimConfig,
    with_discount: bool = False,
    track_min: bool = False,
) -> TerminalSamples:
    """Simulate terminal states (and optional path functionals) of a corner law.

    The discount integral int_0^T X dt is accumulated per step by the
    trapezoid rule, consistent with the first-order weak accuracy of the
    Euler update.
    """
    if T <= 0.0:
        raise ConfigError("horizon must be positive")
    warnings = []
    if corner.a0 == 0.0 and corner.a1 > 0.0 and corner.b0 < 0.5 * corner.a1:
        warnings.append(
            f"square-root corner violates the positivity floor b0 >= a1/2 "
            f"({corner.b0:g} < {0.5 * corner.a1:g}); paths may hit zero"
        )
    n_pairs = cfg.n_paths // 2 if cfg.antithetic else 0
    n_draw = n_pairs if cfg.antithetic else cfg.n_paths
    dt = T / cfg.n_steps
    sqdt = math.sqrt(dt)
    xs = np.full(cfg.n_paths, float(x0))
    integ = np.zeros(cfg.n_paths) if with_discount else None
    mins = np.full(cfg.n_paths, float(x0)) if track_min else None
    rng = np.random.Generator(np.random.Philox(key=cfg.seed))
    chunk = max(1, min(cfg.n_steps, _CHUNK_SCALARS // max(n_draw, 1)))
    done = 0
    while done < cfg.n_steps:
        k = min(chunk, cfg.n_steps - done)
        z = ndtri(rng.random((k, n_draw)))
        backends.mc_march(
            xs, z, corner.b0, corner.b1, corner.a0, corner.a1, dt, sqdt, n_pairs, integ, mins
        )
        done += k
    if not np.all(np.isfinite(xs)):
        bad = int(np.count_nonzero(~np.isfinite(xs)))
        raise NumericalError(
            f"simulation produced {bad} non-finite paths "
            f"(corner {corner}, dt={dt:g}); refine the step or check the corner"
        )
    return TerminalSamples(
        terminal=xs,
        discount_integral=integ,
        min_state=mins,
        antithetic=cfg.antithetic,
        corner=corner,
        config=cfg,
        warnings=tuple(warnings),
    )


def mc_expectation(samples: TerminalSamples, payoff: PayoffSpec) -> McEstimate:
    """Mean and standard error of the (discounted) payoff.

    Antithetic pairs are averaged first and counted once, so the standard
    error reflects the actual number of independent samples.
    """
    vals = np.asarray(payoff.sample(samples.terminal), dtype=float)
    discounted = samples.discount_integral is not None
    if discounted:
        vals = np.exp(-samples.discount_integral) * vals
    if samples.antithetic:
        half = samples.n_paths // 2
        vals = 0.5 * (vals[:half] + vals[half:])
    n = vals.shape[0]
    mean = float(np.mean(vals))
    if n > 1:
        se = float(np.std(vals, ddof=1) / math.sqrt(n))
    else:
        se = 0.0
    return McEstimate(mean=mean, std_error=se, n_paths=samples.n_paths, discounted=discounted)


def simulate_paths(corner: CornerParams, x0: float, T: float, cfg: SimConfig) -> np.ndarray:
    """Full trajectories, shape (n_steps + 1, n_paths).  Large: the array
    holds every state; terminal rows match simulate_terminal bit for bit."""
    dt = T / cfg.n_steps
    sqdt = math.sqrt(dt)
    n_pairs = cfg.n_paths // 2 if cfg.antithetic else 0
    n_draw = n_pairs if cfg.antithetic else cfg.n_paths
    out = np.empty((cfg.n_steps + 1, cfg.n_paths))
    out[0] = x0
    xs = np.full(cfg.n_paths, float(x0))
    rng = np.random.Generator(np.random.Philox(key=cfg.seed))
    for k in range(cfg.n_steps):
        z = ndtri(rng.random((1, n_draw)))
        backends.mc_march(xs, z, corner.b0, corner.b1, corner.a0, corner.a1, dt, sqdt, n_pairs, None, None)
        out[k + 1] = xs
    if not np.all(np.isfinite(out)):
        raise NumericalError("path simulation produced non-finite states")
    return out


def dump_paths_csv(path, paths: np.ndarray, T: float) -> None:
    """Write trajectories as (path_id, t, x) rows, path-major."""
    from .util import write_csv

    n_steps = paths.shape[0] - 1
    ts = np.linspace(0.0, T, n_steps + 1)

    def rows():
        for i in range(paths.shape[1]):
            for k in range(n_steps + 1):
                yield (str(i), ts[k], paths[k, i])

    write_csv(path, ("path_id", "t", "x"), rows())


def positivity_fraction(corner: CornerParams, x0: float, T: float, cfg: SimConfig) -> float:
    """Fraction of discrete paths whose running minimum reaches <= 0."""
    if corner.a0 != 0.0:
        raise ConfigError("positivity check applies to square-root corners (a0 = 0)")
    if x0 <= 0.0:
        raise ConfigError("positivity check needs a start state above zero")
    samples = simulate_terminal(corner, x0, T, cfg, track_min=True)
    return float(np.mean(samples.min_state <= 0.0))
