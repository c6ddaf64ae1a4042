"""User-facing pricing: dispatch, bond curves, and the model-risk gap.

Upper and lower prices are extremal expectations of the terminal payoff
over all laws dominated by the parameter box; their difference is the
model-risk measure.  Three methods are offered:

* Riccati: exact exponential-affine closed form, available for exponential
  payoffs with u >= 0 when a single corner law attains the bound
  (fixed-slope Gaussian model on R, or the square-root model on R+).
* PDE: the monotone finite-difference solver on an automatically truncated
  domain, the general route (and the Auto fallback).
* MC: corner-law Monte Carlo with standard errors; outside the proven
  corner regimes the estimates are labeled feasible-law bounds only.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import ConfigError, RegimeError
from .params import (
    CornerParams,
    Direction,
    ModelSpec,
    StateDomain,
    diffusion_interval,
    worst_case_corner,
)
from .payoffs import PayoffSpec, Shape
from .pdesolver import Discounting, Grid, Scheme, SolveConfig, ValueSurface, read_value, solve
from .riccati import bond_corner, bond_price_bound, icx_regime, mgf_bound, ou_mean_variance
from .simulate import SimConfig, mc_expectation, simulate_terminal


class Method(enum.Enum):
    AUTO = "auto"
    PDE = "pde"
    RICCATI = "riccati"
    MC = "mc"


@dataclass
class PricingResult:
    upper: float
    lower: float
    method_upper: str
    method_lower: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def model_risk(self) -> float:
        return self.upper - self.lower

    def to_json_dict(self) -> dict:
        return {
            "upper": self.upper,
            "lower": self.lower,
            "model_risk": self.model_risk,
            "method_upper": self.method_upper,
            "method_lower": self.method_lower,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "PricingResult":
        data = json.loads(text)
        result = cls(
            upper=float(data["upper"]),
            lower=float(data["lower"]),
            method_upper=str(data["method_upper"]),
            method_lower=str(data["method_lower"]),
            diagnostics=dict(data.get("diagnostics", {})),
        )
        if not math.isclose(
            float(data["model_risk"]), result.model_risk, rel_tol=1e-12, abs_tol=1e-12
        ):
            raise ConfigError("inconsistent model_risk field in serialized result")
        return result


@dataclass(frozen=True)
class BondQuote:
    maturity: float
    upper: float
    lower: float


# -- domain truncation ------------------------------------------------------


def _drift_transported(box, p: float, T: float) -> list[float]:
    ends = []
    for b0 in (box.b0_lo, box.b0_hi):
        for b1 in (box.b1_lo, box.b1_hi):
            if abs(b1) < 1e-12:
                ends.append(p + b0 * T)
            else:
                ebt = math.exp(b1 * T)
                ends.append(p * ebt + b0 * (ebt - 1.0) / b1)
    return ends


def auto_grid(
    model: ModelSpec,
    probes,
    T: float,
    n_x: int = 401,
    n_t: int = 200,
    sigma_mult: float = 6.0,
) -> Grid:
    """Probe-centered truncated domain.

    The probe hull is first extended by the drift-transported probe images
    (mean reversion can carry the mass far from the start point), then
    padded by sigma_mult * sqrt(T * max a) with the diffusion level
    re-evaluated once on the padded range.  Positive-half-line models get a
    strictly positive left edge at 1e-4 of the right edge: the admissible
    family never reaches zero, and the degenerate corner needs no boundary
    data beyond the interior scheme.
    """
    probes = [float(p) for p in np.atleast_1d(probes)]
    hull_lo = min(probes)
    hull_hi = max(probes)
    for p in (hull_lo, hull_hi):
        ends = _drift_transported(model.box, p, T)
        hull_lo = min(hull_lo, *ends)
        hull_hi = max(hull_hi, *ends)
    lo, hi = hull_lo, hull_hi
    for _ in range(2):  # initial guess, then one re-evaluation on the padded range
        a_top = max(
            diffusion_interval(model.box, lo).hi, diffusion_interval(model.box, hi).hi
        )
        pad = sigma_mult * math.sqrt(max(T * a_top, 1e-12))
        lo, hi = hull_lo - pad, hull_hi + pad
    if model.domain is StateDomain.POSITIVE_HALF_LINE:
        x_lo = 1e-4 * hi
        if x_lo >= min(probes):
            x_lo = 0.5 * min(probes)
        return Grid(x_min=x_lo, x_max=hi, n_x=n_x, T=T, n_t=n_t)
    return Grid(x_min=lo, x_max=hi, n_x=n_x, T=T, n_t=n_t)


# -- PDE route ---------------------------------------------------------------


def _pde_solve_pair(
    model: ModelSpec,
    payoff: PayoffSpec,
    grid: Grid,
    scheme: Scheme,
    discounting: Discounting,
    min_substeps: int = 1,
) -> tuple[ValueSurface, ValueSurface]:
    up = solve(
        model,
        payoff,
        grid,
        SolveConfig(
            scheme=scheme,
            direction=Direction.UPPER,
            discounting=discounting,
            min_substeps=min_substeps,
        ),
    )
    lo = solve(
        model,
        payoff,
        grid,
        SolveConfig(
            scheme=scheme,
            direction=Direction.LOWER,
            discounting=discounting,
            min_substeps=min_substeps,
        ),
    )
    return up, lo


def _pde_bounds(
    model: ModelSpec,
    payoff: PayoffSpec,
    x0: float,
    T: float,
    grid: Grid | None,
    scheme: Scheme,
    n_x: int,
    n_t: int,
) -> tuple[float, float, dict]:
    warnings = []
    auto = grid is None
    if auto:
        grid = auto_grid(model, [x0], T, n_x=n_x, n_t=n_t)
    up, lo = _pde_solve_pair(model, payoff, grid, scheme, Discounting.NONE)
    vu = read_value(up, 0.0, x0)
    vl = read_value(lo, 0.0, x0)
    if auto and payoff.kind == "exponential" and model.domain is StateDomain.REAL_LINE:
        wide = auto_grid(model, [x0], T, n_x=n_x, n_t=n_t, sigma_mult=9.0)
        up2, lo2 = _pde_solve_pair(model, payoff, wide, scheme, Discounting.NONE)
        vu2 = read_value(up2, 0.0, x0)
        vl2 = read_value(lo2, 0.0, x0)
        drift = max(
            abs(vu2 - vu) / max(abs(vu2), 1e-30), abs(vl2 - vl) / max(abs(vl2), 1e-30)
        )
        if drift >= 1e-3:
            warnings.append(
                f"domain truncation sensitivity {drift:.2e} for the exponential payoff "
                "after one widening round; value may still carry boundary error"
            )
        vu, vl, up, grid = vu2, vl2, up2, wide
    diag = {
        "grid": {"x_min": grid.x_min, "x_max": grid.x_max, "n_x": grid.n_x, "n_t": grid.n_t, "T": grid.T},
        "solver_upper": up.diagnostics,
        "warnings": warnings,
    }
    return vu, vl, diag


# -- MC route ----------------------------------------------------------------


def _mc_corners(model: ModelSpec, payoff: PayoffSpec, x0: float):
    if payoff.shape is Shape.DECREASING_CONCAVE:
        return worst_case_corner(model.box, x0, Direction.LOWER), worst_case_corner(
            model.box, x0, Direction.UPPER
        )
    return worst_case_corner(model.box, x0, Direction.UPPER), worst_case_corner(
        model.box, x0, Direction.LOWER
    )


def _mc_bounds(
    model: ModelSpec, payoff: PayoffSpec, x0: float, T: float, sim: SimConfig
) -> tuple[float, float, dict]:
    warnings = []
    regime = icx_regime(model, x0)
    if regime is None or payoff.shape is Shape.NEITHER:
        warnings.append(
            "corner-law Monte Carlo outside the proven worst-case regime: the upper "
            "estimate is only a feasible-law lower bound for the upper price (and "
            "symmetrically for the lower)"
        )
    corner_up, corner_lo = _mc_corners(model, payoff, x0)
    est_up = mc_expectation(simulate_terminal(corner_up, x0, T, sim), payoff)
    est_lo = mc_expectation(simulate_terminal(corner_lo, x0, T, sim), payoff)
    diag = {
        "mc": {
            "n_paths": sim.n_paths,
            "n_steps": sim.n_steps,
            "seed": sim.seed,
            "antithetic": sim.antithetic,
            "std_error_upper": est_up.std_error,
            "std_error_lower": est_lo.std_error,
        },
        "warnings": warnings,
    }
    return est_up.mean, est_lo.mean, diag


# -- public operations -------------------------------------------------------


def _riccati_applicable(model: ModelSpec, payoff: PayoffSpec, x0: float) -> bool:
    return (
        payoff.kind == "exponential"
        and payoff.params[0] >= 0.0
        and payoff.shape is Shape.INCREASING_CONVEX
        and icx_regime(model, x0) is not None
    )


def price(
    model: ModelSpec,
    payoff: PayoffSpec,
    x0: float,
    T: float,
    method: Method = Method.AUTO,
    grid: Grid | None = None,
    scheme: Scheme = Scheme.EXPLICIT_MONOTONE,
    sim: SimConfig | None = None,
    n_x: int = 401,
    n_t: int = 200,
) -> PricingResult:
    """Upper and lower price of psi(X_T) started at x0, horizon T.

    Auto dispatch takes the exact Riccati route when it applies (exponential
    payoff, u >= 0, corner regime) and the PDE otherwise.
    """
    if not model.contains_state(x0):
        raise ConfigError(f"start state {x0:g} outside the model domain")
    if T <= 0.0:
        raise ConfigError("horizon must be positive")
    base_warnings = []
    if model.no_uniqueness_guarantee:
        base_warnings.append("model accepted by force: no uniqueness guarantee")

    if method is Method.RICCATI or (method is Method.AUTO and _riccati_applicable(model, payoff, x0)):
        if not _riccati_applicable(model, payoff, x0):
            raise RegimeError(
                "Riccati pricing needs an exponential payoff with u >= 0 and a "
                "fixed-slope Gaussian or positive square-root model"
            )
        u = payoff.params[0]
        upper = mgf_bound(model, x0, u, T, Direction.UPPER)
        lower = mgf_bound(model, x0, u, T, Direction.LOWER)
        return PricingResult(
            upper=upper,
            lower=lower,
            method_upper="Riccati",
            method_lower="Riccati",
            diagnostics={"warnings": base_warnings},
        )

    if method is Method.MC:
        sim = sim or SimConfig(n_paths=100_000, n_steps=200, seed=0)
        upper, lower, diag = _mc_bounds(model, payoff, x0, T, sim)
        diag["warnings"] = base_warnings + diag["warnings"]
        return PricingResult(
            upper=upper, lower=lower, method_upper="MC", method_lower="MC", diagnostics=diag
        )

    upper, lower, diag = _pde_bounds(model, payoff, x0, T, grid, scheme, n_x, n_t)
    diag["warnings"] = base_warnings + diag["warnings"]
    return PricingResult(
        upper=upper, lower=lower, method_upper="PDE", method_lower="PDE", diagnostics=diag
    )


def price_curve(
    model: ModelSpec,
    payoff: PayoffSpec,
    x0s,
    T: float,
    grid: Grid | None = None,
    n_x: int = 801,
    n_t: int = 200,
    discounting: Discounting = Discounting.NONE,
    scheme: Scheme = Scheme.EXPLICIT_MONOTONE,
    min_substeps: int = 1,
) -> tuple[np.ndarray, np.ndarray, dict]:
    """Upper/lower PDE prices across many start states from one solve pair."""
    x0s = np.atleast_1d(np.asarray(x0s, dtype=float))
    if grid is None:
        grid = auto_grid(model, x0s, T, n_x=n_x, n_t=n_t)
    up, lo = _pde_solve_pair(model, payoff, grid, scheme, discounting, min_substeps)
    uppers = np.array([read_value(up, 0.0, x) for x in x0s])
    lowers = np.array([read_value(lo, 0.0, x) for x in x0s])
    diag = {
        "grid": {"x_min": grid.x_min, "x_max": grid.x_max, "n_x": grid.n_x, "n_t": grid.n_t, "T": grid.T},
        "solver_upper": up.diagnostics,
    }
    return uppers, lowers, diag


def bond_curve(
    model: ModelSpec,
    x0: float,
    maturities,
    method: Method = Method.AUTO,
    grid: Grid | None = None,
    n_x: int = 601,
    n_t: int = 200,
) -> tuple[list[BondQuote], dict]:
    """Upper/lower zero-coupon prices per maturity.

    The Riccati fast path applies in the corner regimes; the PDE fallback
    solves the discounted equation once per direction at the longest
    maturity and reads every shorter maturity off the same surface.
    """
    if not model.contains_state(x0):
        raise ConfigError(f"start state {x0:g} outside the model domain")
    maturities = [float(m) for m in maturities]
    if any(m < 0.0 for m in maturities):
        raise ConfigError("maturities must be non-negative")
    diag: dict = {"warnings": []}
    if model.no_uniqueness_guarantee:
        diag["warnings"].append("model accepted by force: no uniqueness guarantee")
    fast_ok = icx_regime(model, x0) is not None
    if method is Method.RICCATI and not fast_ok:
        raise RegimeError(
            "closed-form bond bounds need a fixed-slope Gaussian model on R "
            "or a square-root model on R+ started above zero"
        )
    if method in (Method.AUTO, Method.RICCATI) and fast_ok:
        quotes = []
        for m in maturities:
            if m == 0.0:
                quotes.append(BondQuote(0.0, 1.0, 1.0))
                continue
            quotes.append(
                BondQuote(
                    m,
                    bond_price_bound(model, x0, m, Direction.UPPER),
                    bond_price_bound(model, x0, m, Direction.LOWER),
                )
            )
        diag["method"] = "Riccati"
        return quotes, diag
    if method is Method.MC:
        raise ConfigError("bond_curve supports Auto, PDE and Riccati methods")
    t_max = max(maturities)
    if t_max == 0.0:
        return [BondQuote(0.0, 1.0, 1.0) for _ in maturities], diag
    from .payoffs import constant

    if grid is None:
        grid = auto_grid(model, [x0], t_max, n_x=n_x, n_t=max(n_t, int(50 * t_max)))
    up, lo = _pde_solve_pair(
        model, constant(1.0), grid, Scheme.EXPLICIT_MONOTONE, Discounting.STATE_RATE
    )
    quotes = []
    for m in maturities:
        if m == 0.0:
            quotes.append(BondQuote(0.0, 1.0, 1.0))
        else:
            quotes.append(
                BondQuote(m, read_value(up, t_max - m, x0), read_value(lo, t_max - m, x0))
            )
    diag["method"] = "PDE"
    diag["grid"] = {"x_min": grid.x_min, "x_max": grid.x_max, "n_x": grid.n_x, "n_t": grid.n_t, "T": grid.T}
    return quotes, diag


def model_risk(
    model: ModelSpec,
    payoff: PayoffSpec,
    x0: float,
    T: float,
    method: Method = Method.AUTO,
    **kwargs,
) -> float:
    """Model-uncertainty gap: upper minus lower price, same method both sides."""
    return price(model, payoff, x0, T, method=method, **kwargs).model_risk


# -- Gaussian single-model closed forms (oracles and reference curves) -------


def gaussian_expectation(payoff: PayoffSpec, mean: float, var: float) -> float:
    """Exact E[psi(Z)] for Z ~ N(mean, var) and the built-in payoffs."""
    if payoff.kind == "constant":
        return payoff.params[0]
    if payoff.kind == "identity":
        return mean
    if payoff.kind == "exponential":
        u = payoff.params[0]
        return math.exp(u * mean + 0.5 * u * u * var)
    if payoff.kind == "call":
        return _gaussian_call(mean, var, payoff.params[0])
    if payoff.kind == "butterfly":
        k1, k2, k3 = payoff.params
        return (
            _gaussian_call(mean, var, k1)
            - 2.0 * _gaussian_call(mean, var, k2)
            + _gaussian_call(mean, var, k3)
        )
    raise ConfigError(f"no Gaussian closed form for payoff kind {payoff.kind!r}")


def _gaussian_call(mean: float, var: float, strike: float) -> float:
    if var <= 0.0:
        return max(mean - strike, 0.0)
    s = math.sqrt(var)
    d = (mean - strike) / s
    return (mean - strike) * float(ndtr(d)) + s * math.exp(-0.5 * d * d) / math.sqrt(2.0 * math.pi)


def vasicek_payoff_value(corner: CornerParams, x0: float, T: float, payoff: PayoffSpec) -> float:
    """Exact single-model price under a Gaussian corner law (a1 = 0)."""
    mean, var = ou_mean_variance(corner, x0, T)
    return gaussian_expectation(payoff, mean, var)


__all__ = [
    "BondQuote",
    "Method",
    "PricingResult",
    "auto_grid",
    "bond_corner",
    "bond_curve",
    "gaussian_expectation",
    "model_risk",
    "price",
    "price_curve",
    "vasicek_payoff_value",
]
