"""Riccati systems for exponential-affine transforms of corner laws.

For a fixed parameter vector (b0, b1, a0, a1) the scaled cumulant functions
(phi, psi) of the law solve scalar quadratic ODEs,

    psi' = a1 psi^2 / 2 + b1 psi            (transform mode, psi(0) = u)
    psi' = a1 psi^2 / 2 + b1 psi - 1        (bond mode, extra unit forcing)
    phi' = a0 psi^2 / 2 + b0 psi            (phi(0) = 0)

so that E[exp(u X_t)] = exp(phi + psi x) in transform mode and the
zero-coupon price E[exp(-int_0^t X ds)] = exp(phi + psi x) in bond mode.
Under parameter uncertainty these closed forms price the extremal bounds
whenever a single corner law attains the bound: monotone convex payoffs in
the fixed-slope Vasicek and positive-half-line square-root regimes.

The integrator is a classical fixed-step 4th-order scheme on the augmented
state (phi, psi); the ODEs are smooth scalar quadratics, so adaptivity buys
nothing.  Explosions (the transform blows up in finite time for large u)
abort with a structured error carrying the first invalid time.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError, RegimeError
from .params import (
    CornerParams,
    Direction,
    ModelSpec,
    ParameterBox,
    StateDomain,
    worst_case_corner,
)

BLOWUP_CAP = 1e8


class RiccatiMode(enum.Enum):
    MGF = "mgf"
    BOND = "bond"


@dataclass(frozen=True)
class RiccatiSolution:
    t_grid: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    mode: RiccatiMode
    corner: CornerParams
    u0: float

    @property
    def final(self) -> tuple[float, float]:
        return float(self.phi[-1]), float(self.psi[-1])

    def to_csv(self, path) -> None:
        from .util import write_csv

        rows = zip(self.t_grid.tolist(), self.phi.tolist(), self.psi.tolist())
        write_csv(path, ("t", "phi", "psi"), rows)


def default_steps(T: float) -> int:
    return max(200, int(math.ceil(200.0 * T)))


def _rhs(corner: CornerParams, psi: float, mode: RiccatiMode) -> tuple[float, float]:
    dpsi = 0.5 * corner.a1 * psi * psi + corner.b1 * psi
    if mode is RiccatiMode.BOND:
        dpsi -= 1.0
    dphi = 0.5 * corner.a0 * psi * psi + corner.b0 * psi
    return dphi, dpsi


def solve_riccati(
    corner: CornerParams,
    u: float,
    T: float,
    n_steps: int | None = None,
    mode: RiccatiMode = RiccatiMode.MGF,
    cap: float = BLOWUP_CAP,
) -> RiccatiSolution:
    """Integrate the (phi, psi) system on [0, T] with n_steps uniform steps."""
    if T < 0.0:
        raise ValueError("horizon must be non-negative")
    if n_steps is None:
        n_steps = default_steps(T)
    if n_steps < 1:
        raise ValueError("need at least one step")
    t_grid = np.linspace(0.0, T, n_steps + 1)
    phi = np.empty(n_steps + 1)
    psi = np.empty(n_steps + 1)
    phi[0] = 0.0
    psi[0] = float(u)
    h = T / n_steps
    p, s = 0.0, float(u)
    for k in range(n_steps):
        k1p, k1s = _rhs(corner, s, mode)
        k2p, k2s = _rhs(corner, s + 0.5 * h * k1s, mode)
        k3p, k3s = _rhs(corner, s + 0.5 * h * k2s, mode)
        k4p, k4s = _rhs(corner, s + h * k3s, mode)
        p = p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        s = s + (h / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
        t_next = t_grid[k + 1]
        if not (math.isfinite(p) and math.isfinite(s)) or abs(s) > cap:
            raise BlowUpError(t_next, cap)
        phi[k + 1] = p
        psi[k + 1] = s
    return RiccatiSolution(t_grid=t_grid, phi=phi, psi=psi, mode=mode, corner=corner, u0=float(u))


def _e1(z: float) -> float:
    """(e^z - 1) / z, continuous through zero."""
    if abs(z) < 1e-4:
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0))
    return math.expm1(z) / z


def _e2(z: float) -> float:
    """(e^z - 1 - z) / z^2, continuous through zero."""
    if abs(z) < 1e-3:
        return 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0))
    return (math.expm1(z) - z) / (z * z)


def _e1d(z: float) -> float:
    """(e1(2z) - e1(z)) / z, continuous through zero."""
    if abs(z) < 1e-3:
        # sum_{k>=1} (2^k - 1) z^(k-1) / (k+1)!
        return 0.5 + z * (0.5 + z * (7.0 / 24.0 + z * (15.0 / 120.0)))
    return (_e1(2.0 * z) - _e1(z)) / z


def _e3(z: float) -> float:
    """(e1(2z) - 2 e1(z) + 1) / z^2, continuous through zero."""
    if abs(z) < 1e-2:
        # sum_{k>=2} (2^k - 2) z^(k-2) / (k+1)!
        return 1.0 / 3.0 + z * (0.25 + z * (14.0 / 120.0 + z * (30.0 / 720.0)))
    return (_e1(2.0 * z) - 2.0 * _e1(z) + 1.0) / (z * z)


def vasicek_closed_form(
    corner: CornerParams, u: float, t: float, mode: RiccatiMode = RiccatiMode.MGF
) -> tuple[float, float]:
    """Exact (phi, psi) for a Gaussian mean-reverting corner (a1 = 0).

    Written in terms of the exponential difference quotients e1, e2, ...
    (series-evaluated near zero), so the formulas stay accurate through
    b1 = 0 with no limit-branch switch and no catastrophic cancellation.
    """
    if corner.a1 != 0.0:
        raise RegimeError("vasicek closed form requires a1 = 0")
    b0, b1, a0 = corner.b0, corner.b1, corner.a0
    z = b1 * t
    if mode is RiccatiMode.MGF:
        psi = u * math.exp(z)
        phi = b0 * u * t * _e1(z) + 0.5 * a0 * u * u * t * _e1(2.0 * z)
        return phi, psi
    # bond system: psi' = b1 psi - 1, psi(0) = u
    psi = u * math.exp(z) - t * _e1(z)
    int_psi = u * t * _e1(z) - t * t * _e2(z)
    int_psi2 = u * u * t * _e1(2.0 * z) - 2.0 * u * t * t * _e1d(z) + t**3 * _e3(z)
    phi = 0.5 * a0 * int_psi2 + b0 * int_psi
    return phi, psi


def cir_bond_closed_form(corner: CornerParams, t: float) -> tuple[float, float]:
    """Exact (phi, psi) of the square-root bond system started at psi(0) = 0."""
    if corner.a0 != 0.0:
        raise RegimeError("square-root bond closed form requires a0 = 0")
    if corner.a1 <= 0.0 or corner.b0 <= 0.0:
        raise RegimeError("square-root bond closed form requires a1 > 0 and b0 > 0")
    b0, b1, a1 = corner.b0, corner.b1, corner.a1
    gamma = math.sqrt(b1 * b1 + 2.0 * a1)
    egt = math.exp(gamma * t)
    denom = (gamma - b1) * (egt - 1.0) + 2.0 * gamma
    psi = -2.0 * (egt - 1.0) / denom
    phi = (2.0 * b0 / a1) * math.log(2.0 * gamma * math.exp(0.5 * (gamma - b1) * t) / denom)
    return phi, psi


def icx_regime(model: ModelSpec, x0: float) -> str | None:
    """Regime in which a single corner law attains monotone-convex bounds.

    Returns "vasicek" (a1 = 0 with a known slope b1 on the real line),
    "cir" (square-root model on the positive half line started above zero),
    or None.
    """
    box = model.box
    if (
        model.domain is StateDomain.REAL_LINE
        and box.a1_lo == 0.0
        and box.a1_hi == 0.0
        and box.b1_lo == box.b1_hi
    ):
        return "vasicek"
    if (
        model.domain is StateDomain.POSITIVE_HALF_LINE
        and box.a0_lo == 0.0
        and box.a0_hi == 0.0
        and model.admissibility.proper
        and x0 > 0.0
    ):
        return "cir"
    return None


def _transform_solution(corner: CornerParams, u: float, t: float) -> tuple[float, float]:
    if corner.a1 == 0.0:
        return vasicek_closed_form(corner, u, t, RiccatiMode.MGF)
    sol = solve_riccati(corner, u, t, mode=RiccatiMode.MGF)
    return sol.final


def mgf_bound(model: ModelSpec, x0: float, u: float, t: float, direction: Direction) -> float:
    """Extremal expectation of exp(u X_t) over all dominated laws.

    For u >= 0 the payoff is increasing convex and the bound is attained by
    the worst-case corner of the matching direction.  For u < 0 the payoff
    is decreasing convex, which only the fixed-slope Gaussian regime
    supports, and only for the lower bound (maximal drift level with minimal
    diffusion); the upper bound for u < 0 is not exposed.
    """
    regime = icx_regime(model, x0)
    if regime is None:
        raise RegimeError(
            "closed-form transform bounds need a fixed-slope Gaussian model on R "
            "or a square-root model on R+ started above zero"
        )
    if u >= 0.0:
        corner = worst_case_corner(model.box, x0, direction)
    else:
        if regime != "vasicek" or direction is not Direction.LOWER:
            raise RegimeError(
                "u < 0 transform bounds are exposed only for the lower bound "
                "in the fixed-slope Gaussian regime"
            )
        box = model.box
        corner = CornerParams(b0=box.b0_hi, b1=box.b1_hi, a0=box.a0_lo, a1=0.0, regime_x0=x0)
    phi, psi = _transform_solution(corner, u, t)
    return math.exp(phi + psi * x0)


def mgf_upper(model: ModelSpec, x0: float, u: float, t: float) -> float:
    """Upper expectation of exp(u X_t); requires u >= 0 and a closed-form regime."""
    if u < 0.0:
        raise RegimeError("mgf_upper requires u >= 0; see mgf_bound for the u < 0 cases")
    return mgf_bound(model, x0, u, t, Direction.UPPER)


def bond_corner(box: ParameterBox, x0: float, direction: Direction) -> CornerParams:
    """Extremal corner for discounted bounds exp(-int X).

    Discounting makes the functional decreasing and convex in the rate
    path, so the upper bond pairs the minimal drift with the maximal
    diffusion (and vice versa); the drift slope is frozen by the sign of
    the start state exactly as for the monotone-convex corners.
    """
    if direction is Direction.UPPER:
        b1 = box.b1_hi if x0 < 0.0 else box.b1_lo
        return CornerParams(b0=box.b0_lo, b1=b1, a0=box.a0_hi, a1=box.a1_hi, regime_x0=x0)
    b1 = box.b1_lo if x0 < 0.0 else box.b1_hi
    return CornerParams(b0=box.b0_hi, b1=b1, a0=box.a0_lo, a1=box.a1_lo, regime_x0=x0)


def bond_closed_form(corner: CornerParams, t: float) -> tuple[float, float]:
    """(phi, psi) of the bond system for a corner, closed form where known."""
    if corner.a1 == 0.0:
        return vasicek_closed_form(corner, 0.0, t, RiccatiMode.BOND)
    if corner.a0 == 0.0 and corner.a1 > 0.0 and corner.b0 > 0.0:
        return cir_bond_closed_form(corner, t)
    sol = solve_riccati(corner, 0.0, t, mode=RiccatiMode.BOND)
    return sol.final


def bond_price_bound(model: ModelSpec, x0: float, T: float, direction: Direction) -> float:
    """Closed-form extremal zero-coupon price; regime-gated like mgf_bound."""
    if icx_regime(model, x0) is None:
        raise RegimeError(
            "closed-form bond bounds need a fixed-slope Gaussian model on R "
            "or a square-root model on R+ started above zero"
        )
    corner = bond_corner(model.box, x0, direction)
    phi, psi = bond_closed_form(corner, T)
    return math.exp(phi + psi * x0)


def ou_mean_variance(corner: CornerParams, x0: float, t: float) -> tuple[float, float]:
    """Terminal mean and variance of the Gaussian corner law (a1 = 0)."""
    if corner.a1 != 0.0:
        raise RegimeError("gaussian terminal law requires a1 = 0")
    b0, b1, a0 = corner.b0, corner.b1, corner.a0
    z = b1 * t
    mean = x0 * math.exp(z) + b0 * t * _e1(z)
    var = a0 * t * _e1(2.0 * z)
    return mean, var
