"""Monotone finite-difference solver for the extremal Kolmogorov equations.

Backward in time from a terminal payoff, the upper value function solves

    -dv/dt - G(x, dv/dx, d2v/dx2) = 0,      v(T, x) = psi(x),

with G the corner-selected supremum generator (the lower value swaps in the
infimum), and the discounted variant adds a -x v reaction term for
zero-coupon style payoffs.  Internally the march runs in time-to-maturity;
the stored surface is indexed by forward time, terminal row last.

Two schemes are offered.  The explicit monotone scheme upwinds the drift per
interval endpoint and sub-divides each macro step to satisfy the CFL bound

    dt <= cfl_safety * min_x dx^2 / (a_hi(x) + dx * |b|_max(x)).

The implicit scheme runs Howard policy iteration per macro step: freeze the
extremal corner per node, solve the resulting upwinded tridiagonal system,
re-select, and repeat until the value update stalls.  The state-rate
reaction term is treated implicitly in both schemes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from . import backends
from .errors import CflViolationError, NumericalError, OutOfGridError, PolicyDivergenceError
from .params import Direction, ModelSpec, StateDomain, drift_interval, diffusion_interval
from .payoffs import PayoffSpec
from .util import write_csv

MAX_TOTAL_STEPS = 10_000_000


class Scheme(enum.Enum):
    EXPLICIT_MONOTONE = "explicit_monotone"
    IMPLICIT_POLICY_ITERATION = "implicit_policy_iteration"


class Discounting(enum.Enum):
    NONE = "none"
    STATE_RATE = "state_rate"


@dataclass(frozen=True)
class Dirichlet:
    lo: float
    hi: float


LINEAR_EXTRAPOLATION = "linear_extrapolation"


@dataclass(frozen=True)
class Grid:
    """Uniform time-space grid; terminal time T, n_t macro levels."""

    x_min: float
    x_max: float
    n_x: int
    T: float
    n_t: int

    def __post_init__(self):
        if not (self.x_min < self.x_max):
            raise ValueError("need x_min < x_max")
        if self.n_x < 3:
            raise ValueError("need at least 3 space nodes")
        if self.n_t < 1 or self.T <= 0.0:
            raise ValueError("need n_t >= 1 and T > 0")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_x - 1)

    def nodes(self) -> np.ndarray:
        """Node coordinates; when the grid straddles zero it is shifted so
        that the kink of x^+ sits exactly on a node (shift < dx/2)."""
        xs = self.x_min + self.dx * np.arange(self.n_x)
        if self.x_min < 0.0 < self.x_max:
            j0 = int(round(-self.x_min / self.dx))
            xs = xs - xs[j0]
        return xs

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n_t + 1)


@dataclass(frozen=True)
class SolveConfig:
    scheme: Scheme = Scheme.EXPLICIT_MONOTONE
    direction: Direction = Direction.UPPER
    discounting: Discounting = Discounting.NONE
    boundary: object = LINEAR_EXTRAPOLATION
    cfl_safety: float = 0.9
    policy_tol: float = 1e-10
    policy_max_iter: int = 50
    # floor on explicit sub-steps per macro step; lets callers run several
    # models on one identical time discretization (exact envelope nesting)
    min_substeps: int = 1

    def __post_init__(self):
        if not (0.0 < self.cfl_safety <= 1.0):
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.policy_tol <= 0.0:
            raise ValueError("policy_tol must be positive")
        if self.policy_max_iter < 1:
            raise ValueError("policy_max_iter must be at least 1")
        if self.min_substeps < 1:
            raise ValueError("min_substeps must be at least 1")


@dataclass
class ValueSurface:
    grid: Grid
    values: np.ndarray  # (n_t + 1, n_x); row k is forward time t_k
    diagnostics: dict = field(default_factory=dict)

    def nodes(self) -> np.ndarray:
        return self.grid.nodes()

    def value_at_t0(self) -> np.ndarray:
        return self.values[0]

    def to_csv(self, path) -> None:
        xs = self.nodes()
        ts = self.grid.times()

        def rows():
            for k, t in enumerate(ts):
                for j, x in enumerate(xs):
                    yield (t, x, self.values[k, j])

        write_csv(path, ("t", "x", "value"), rows())


def read_value(surface: ValueSurface, t: float, x: float) -> float:
    """Bilinear interpolation on the stored macro levels."""
    grid = surface.grid
    xs = surface.nodes()
    eps_t = 1e-12 * max(1.0, grid.T)
    eps_x = 1e-12 * max(1.0, abs(xs[0]), abs(xs[-1]))
    if t < -eps_t or t > grid.T + eps_t:
        raise OutOfGridError(f"t={t:g} outside [0, {grid.T:g}]")
    if x < xs[0] - eps_x or x > xs[-1] + eps_x:
        raise OutOfGridError(f"x={x:g} outside [{xs[0]:g}, {xs[-1]:g}]")
    dt = grid.T / grid.n_t
    kt = min(int(max(t, 0.0) / dt), grid.n_t - 1)
    wt = (t - kt * dt) / dt
    wt = min(max(wt, 0.0), 1.0)
    dx = xs[1] - xs[0]
    jx = min(int((min(max(x, xs[0]), xs[-1]) - xs[0]) / dx), grid.n_x - 2)
    wx = (x - xs[jx]) / dx
    wx = min(max(wx, 0.0), 1.0)
    v = surface.values
    lo = v[kt, jx] * (1.0 - wx) + v[kt, jx + 1] * wx
    hi = v[kt + 1, jx] * (1.0 - wx) + v[kt + 1, jx + 1] * wx
    return float(lo * (1.0 - wt) + hi * wt)


def _coefficient_arrays(model: ModelSpec, xs: np.ndarray):
    bl = np.empty_like(xs)
    bh = np.empty_like(xs)
    al = np.empty_like(xs)
    ah = np.empty_like(xs)
    box = model.box
    for j, x in enumerate(xs):
        b = drift_interval(box, float(x))
        a = diffusion_interval(box, float(x))
        bl[j] = b.lo
        bh[j] = b.hi
        al[j] = a.lo
        ah[j] = a.hi
    return bl, bh, al, ah


def _cfl_dt(dx: float, bl, bh, ah, safety: float) -> float:
    babs = np.maximum(np.abs(bl), np.abs(bh))
    denom = ah + dx * babs
    denom = denom[denom > 0.0]
    if denom.size == 0:
        return math.inf
    return safety * dx * dx / float(np.max(denom))


def cfl_substeps(model: ModelSpec, grid: Grid, cfg: SolveConfig) -> int:
    """Explicit sub-steps per macro step the CFL bound would require."""
    xs = grid.nodes()
    bl, bh, _, ah = _coefficient_arrays(model, xs)
    dt_cfl = _cfl_dt(grid.dx, bl, bh, ah, cfg.cfl_safety)
    dt_macro = grid.T / grid.n_t
    n_sub = 1 if math.isinf(dt_cfl) else max(1, int(math.ceil(dt_macro / dt_cfl)))
    return max(n_sub, cfg.min_substeps)


def _boundary_args(boundary):
    if boundary == LINEAR_EXTRAPOLATION:
        return backends.BC_EXTRAPOLATE, 0.0, 0.0
    if isinstance(boundary, Dirichlet):
        return backends.BC_DIRICHLET, boundary.lo, boundary.hi
    raise ValueError(f"unknown boundary condition {boundary!r}")


def _implicit_macro_step(v_prev, xs, bl, bh, al, ah, dt, dx, is_sup, discount, cfg, bc):
    """One Howard policy-iteration step of size dt; returns (level, iters)."""
    bc_mode, bc_lo, bc_hi = bc
    n = xs.size
    dx2 = dx * dx
    w = v_prev.copy()
    scale = max(1.0, float(np.max(np.abs(v_prev))))
    for it in range(1, cfg.policy_max_iter + 1):
        dp = np.empty(n)
        dm = np.empty(n)
        dp[:-1] = (w[1:] - w[:-1]) / dx
        dp[-1] = dp[-2]
        dm[1:] = (w[1:] - w[:-1]) / dx
        dm[0] = dm[1]
        d2 = np.zeros(n)
        d2[1:-1] = (w[2:] - 2.0 * w[1:-1] + w[:-2]) / dx2
        g_lo = np.maximum(bl, 0.0) * dp + np.minimum(bl, 0.0) * dm
        g_hi = np.maximum(bh, 0.0) * dp + np.minimum(bh, 0.0) * dm
        if is_sup:
            beta = np.where(g_hi >= g_lo, bh, bl)
            a_sel = np.where(d2 >= 0.0, ah, al)
        else:
            beta = np.where(g_lo <= g_hi, bl, bh)
            a_sel = np.where(d2 >= 0.0, al, ah)
        a_sel = a_sel.copy()
        a_sel[0] = 0.0
        a_sel[-1] = 0.0
        bp = np.maximum(beta, 0.0)
        bm = np.minimum(beta, 0.0)
        react = dt * xs if discount else 0.0
        diag = 1.0 + dt * ((bp - bm) / dx + a_sel / dx2) + react
        upper = -dt * (bp / dx + 0.5 * a_sel / dx2)
        lower = -dt * (-bm / dx + 0.5 * a_sel / dx2)
        # boundary rows: zero curvature, inward one-sided slope
        diag[0] = 1.0 + dt * beta[0] / dx + (dt * xs[0] if discount else 0.0)
        upper_0 = -dt * beta[0] / dx
        diag[-1] = 1.0 - dt * beta[-1] / dx + (dt * xs[-1] if discount else 0.0)
        lower_n = dt * beta[-1] / dx
        ab = np.zeros((3, n))
        ab[0, 1:] = upper[:-1]
        ab[0, 1] = upper_0
        ab[1, :] = diag
        ab[2, :-1] = lower[1:]
        ab[2, -2] = lower_n
        rhs = v_prev.copy()
        if bc_mode == backends.BC_DIRICHLET:
            ab[0, 1] = 0.0
            ab[2, -2] = 0.0
            ab[1, 0] = 1.0
            ab[1, -1] = 1.0
            rhs[0] = bc_lo
            rhs[-1] = bc_hi
        w_new = solve_banded((1, 1), ab, rhs)
        if not np.all(np.isfinite(w_new)):
            raise NumericalError("implicit solve produced non-finite values")
        delta = float(np.max(np.abs(w_new - w)))
        w = w_new
        if delta <= cfg.policy_tol * scale:
            return w, it
    raise PolicyDivergenceError(
        f"policy iteration did not converge in {cfg.policy_max_iter} iterations "
        f"(last update {delta:.3e})"
    )


def solve(model: ModelSpec, payoff: PayoffSpec, grid: Grid, cfg: SolveConfig) -> ValueSurface:
    """March the extremal equation backward from the terminal payoff."""
    if model.domain is StateDomain.POSITIVE_HALF_LINE and grid.x_min < 0.0:
        raise ValueError("grid extends below zero for a positive-half-line model")
    xs = grid.nodes()
    bl, bh, al, ah = _coefficient_arrays(model, xs)
    terminal = np.asarray(payoff.sample(xs), dtype=float)
    if not np.all(np.isfinite(terminal)):
        raise NumericalError("terminal payoff is not finite on the grid")
    n_t = grid.n_t
    values = np.empty((n_t + 1, grid.n_x))
    values[n_t] = terminal
    dt_macro = grid.T / n_t
    is_sup = cfg.direction is Direction.UPPER
    discount = cfg.discounting is Discounting.STATE_RATE
    bc = _boundary_args(cfg.boundary)
    dx = grid.dx

    diagnostics = {
        "scheme": cfg.scheme.value,
        "direction": cfg.direction.value,
        "discounting": cfg.discounting.value,
        "backend": backends.active_backend(),
        "n_x": grid.n_x,
        "n_t": n_t,
        "policy_iterations": 0,
    }

    v = terminal.copy()
    if cfg.scheme is Scheme.EXPLICIT_MONOTONE:
        dt_cfl = _cfl_dt(dx, bl, bh, ah, cfg.cfl_safety)
        n_sub = 1 if math.isinf(dt_cfl) else max(1, int(math.ceil(dt_macro / dt_cfl)))
        n_sub = max(n_sub, cfg.min_substeps)
        if n_sub * n_t > MAX_TOTAL_STEPS:
            raise CflViolationError(
                f"CFL bound needs {n_sub * n_t:.3g} total steps (> {MAX_TOTAL_STEPS:g}); "
                "coarsen the space grid or use the implicit scheme"
            )
        dt_eff = dt_macro / n_sub
        diagnostics["dt_effective"] = dt_eff
        diagnostics["cfl_ratio"] = 0.0 if math.isinf(dt_cfl) else dt_eff / (dt_cfl / cfg.cfl_safety)
        diagnostics["n_substeps"] = n_sub
        bc_mode, bc_lo, bc_hi = bc
        for k in range(n_t - 1, -1, -1):
            v = backends.explicit_march(
                v, xs, bl, bh, al, ah, dt_eff, n_sub, dx, is_sup, discount, bc_mode, bc_lo, bc_hi
            )
            values[k] = v
    else:
        diagnostics["dt_effective"] = dt_macro
        diagnostics["cfl_ratio"] = math.nan
        total_iters = 0
        for k in range(n_t - 1, -1, -1):
            v, iters = _implicit_macro_step(
                v, xs, bl, bh, al, ah, dt_macro, dx, is_sup, discount, cfg, bc
            )
            total_iters += iters
            values[k] = v
        diagnostics["policy_iterations"] = total_iters

    if not np.all(np.isfinite(values)):
        raise NumericalError("solver produced non-finite values")
    return ValueSurface(grid=grid, values=values, diagnostics=diagnostics)
