"""Parameter boxes for affine diffusions and their set-valued coefficient maps.

An affine diffusion on the real line is driven by

    dX_t = (b0 + b1 X_t) dt + sqrt(a0 + a1 X_t^+) dW_t,

and parameter uncertainty is encoded by a compact box of coefficient
intervals

    Theta = [b0_lo, b0_hi] x [b1_lo, b1_hi] x [a0_lo, a0_hi] x [a1_lo, a1_hi]

with non-negative diffusion coefficients.  At a state x the box induces the
drift and squared-diffusion intervals

    b*(x) = [b0_lo + (b1_lo 1{x>=0} + b1_hi 1{x<0}) x,
             b0_hi + (b1_hi 1{x>=0} + b1_lo 1{x<0}) x]
    a*(x) = [a0_lo + a1_lo x^+,  a0_hi + a1_hi x^+]

whose endpoints are attained by box corners.  This module owns the box
geometry: validation of the admissible model classes, interval evaluation,
worst-case corner selection, and the coefficient-interval transform under a
C^2 map of the state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .errors import AdmissibilityError, ConfigError


class StateDomain(enum.Enum):
    """State space of the diffusion family."""

    REAL_LINE = "R"
    POSITIVE_HALF_LINE = "R+"

    @classmethod
    def from_string(cls, s: str) -> "StateDomain":
        for member in cls:
            if member.value == s:
                return member
        raise ConfigError(f"unknown state domain {s!r}; expected 'R' or 'R+'")


class Direction(enum.Enum):
    """Which price bound a computation targets."""

    UPPER = "upper"
    LOWER = "lower"


class UniquenessRegime(enum.Enum):
    """Regimes in which the fully non-linear PDE has a unique solution.

    LIPSCHITZ: real line with a0_lo > 0, so the diffusion coefficient is
    bounded away from zero and globally Lipschitz.
    DEGENERATE: positive half line with a0 identically zero and the
    mean-reversion floor b0_lo >= a1_hi / 2 > 0 keeping the process
    strictly positive.
    """

    LIPSCHITZ = "lipschitz"
    DEGENERATE = "degenerate"
    NONE = "none"


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")

    def contains(self, v: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= v <= self.hi + tol

    @property
    def width(self) -> float:
        return self.hi - self.lo


_BOX_FIELDS = ("b0_lo", "b0_hi", "b1_lo", "b1_hi", "a0_lo", "a0_hi", "a1_lo", "a1_hi")


@dataclass(frozen=True)
class ParameterBox:
    """Compact uncertainty box for (b0, b1, a0, a1)."""

    b0_lo: float
    b0_hi: float
    b1_lo: float
    b1_hi: float
    a0_lo: float
    a0_hi: float
    a1_lo: float
    a1_hi: float

    def __post_init__(self):
        for name in ("b0", "b1", "a0", "a1"):
            lo = getattr(self, name + "_lo")
            hi = getattr(self, name + "_hi")
            if math.isnan(lo) or math.isnan(hi):
                raise ValueError(f"{name} endpoints must be finite")
            if lo > hi:
                raise ValueError(f"{name} interval endpoints out of order: [{lo}, {hi}]")
        if self.a0_lo < 0.0 or self.a1_lo < 0.0:
            raise ValueError("diffusion coefficients a0, a1 must be non-negative")

    @classmethod
    def from_mapping(cls, data: dict) -> tuple["ParameterBox", list[str]]:
        """Build a box from a flat mapping, sorting reversed intervals.

        Returns the box together with any warnings raised during ingestion
        (one per interval whose endpoints had to be swapped).
        """
        unknown = set(data) - set(_BOX_FIELDS)
        if unknown:
            raise ConfigError(f"unknown parameter box keys: {sorted(unknown)}")
        missing = set(_BOX_FIELDS) - set(data)
        if missing:
            raise ConfigError(f"missing parameter box keys: {sorted(missing)}")
        values = {}
        warnings = []
        for name in ("b0", "b1", "a0", "a1"):
            lo = float(data[name + "_lo"])
            hi = float(data[name + "_hi"])
            if lo > hi:
                warnings.append(
                    f"{name} endpoints given as [{lo}, {hi}] with lower > upper; sorted on ingestion"
                )
                lo, hi = hi, lo
            values[name + "_lo"] = lo
            values[name + "_hi"] = hi
        try:
            box = cls(**values)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return box, warnings

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in _BOX_FIELDS}

    def b0(self) -> Interval:
        return Interval(self.b0_lo, self.b0_hi)

    def b1(self) -> Interval:
        return Interval(self.b1_lo, self.b1_hi)

    def a0(self) -> Interval:
        return Interval(self.a0_lo, self.a0_hi)

    def a1(self) -> Interval:
        return Interval(self.a1_lo, self.a1_hi)

    @property
    def degenerate(self) -> bool:
        return (
            self.b0_lo == self.b0_hi
            and self.b1_lo == self.b1_hi
            and self.a0_lo == self.a0_hi
            and self.a1_lo == self.a1_hi
        )

    def corners(self):
        """All 16 parameter vectors (b0, b1, a0, a1) at box vertices."""
        for b0 in (self.b0_lo, self.b0_hi):
            for b1 in (self.b1_lo, self.b1_hi):
                for a0 in (self.a0_lo, self.a0_hi):
                    for a1 in (self.a1_lo, self.a1_hi):
                        yield (b0, b1, a0, a1)

    def includes(self, other: "ParameterBox") -> bool:
        """Componentwise interval inclusion: other subset of self."""
        return (
            self.b0_lo <= other.b0_lo
            and other.b0_hi <= self.b0_hi
            and self.b1_lo <= other.b1_lo
            and other.b1_hi <= self.b1_hi
            and self.a0_lo <= other.a0_lo
            and other.a0_hi <= self.a0_hi
            and self.a1_lo <= other.a1_lo
            and other.a1_hi <= self.a1_hi
        )

    def with_fixed(self, **kwargs) -> "ParameterBox":
        """Copy with some coordinates pinned, e.g. with_fixed(a1=0.0)."""
        updates = {}
        for name, value in kwargs.items():
            updates[name + "_lo"] = value
            updates[name + "_hi"] = value
        return replace(self, **updates)


@dataclass(frozen=True)
class CornerParams:
    """One admissible parameter vector picked from a box.

    ``regime_x0`` records the start state whose sign froze the drift-slope
    choice; the frozen slope is a valid worst case only while the process
    does not change sign relative to that anchor.
    """

    b0: float
    b1: float
    a0: float
    a1: float
    regime_x0: float = 0.0


@dataclass(frozen=True)
class AdmissibilityReport:
    proper: bool
    feller_ok: bool
    uniqueness_regime: UniquenessRegime
    reasons: tuple[str, ...]

    @property
    def accepted(self) -> bool:
        return self.uniqueness_regime is not UniquenessRegime.NONE

    def to_dict(self) -> dict:
        return {
            "proper": self.proper,
            "feller_ok": self.feller_ok,
            "uniqueness_regime": self.uniqueness_regime.value,
            "accepted": self.accepted,
            "reasons": list(self.reasons),
        }


def validate(box: ParameterBox, domain: StateDomain) -> AdmissibilityReport:
    """Check the proper-family and uniqueness conditions for (box, domain).

    Real line: needs a0_lo > 0 (diffusion bounded away from zero, Lipschitz
    coefficients, unique bounded solution).  Positive half line: needs
    a0 identically zero together with the mean-reversion floor
    b0_lo >= a1_hi / 2 > 0, which keeps every dominated law strictly
    positive and yields uniqueness in the linear-growth class.
    """
    reasons = []
    feller_ok = box.a1_hi > 0.0 and box.b0_lo >= 0.5 * box.a1_hi
    if domain is StateDomain.REAL_LINE:
        proper = box.a0_lo > 0.0
        if proper:
            regime = UniquenessRegime.LIPSCHITZ
            reasons.append(
                f"a0_lo={box.a0_lo:g} > 0: diffusion non-degenerate on R, Lipschitz uniqueness regime"
            )
        else:
            regime = UniquenessRegime.NONE
            reasons.append(
                f"a0_lo={box.a0_lo:g} outside Lipschitz uniqueness regime (needs a0_lo > 0 on R)"
            )
    else:
        degenerate_level = box.a0_lo == 0.0 and box.a0_hi == 0.0
        proper = degenerate_level and feller_ok
        if not degenerate_level:
            reasons.append(
                f"a0=[{box.a0_lo:g}, {box.a0_hi:g}] must be identically zero on R+"
            )
        if not feller_ok:
            reasons.append(
                f"mean-reversion floor fails: b0_lo={box.b0_lo:g} < a1_hi/2={0.5 * box.a1_hi:g} "
                "(or a1_hi = 0)"
            )
        if proper:
            regime = UniquenessRegime.DEGENERATE
            reasons.append(
                f"square-root regime on R+ accepted: b0_lo={box.b0_lo:g} >= a1_hi/2={0.5 * box.a1_hi:g} > 0"
            )
        else:
            regime = UniquenessRegime.NONE
    return AdmissibilityReport(
        proper=proper,
        feller_ok=feller_ok,
        uniqueness_regime=regime,
        reasons=tuple(reasons),
    )


@dataclass(frozen=True)
class ModelSpec:
    """A validated (or force-accepted) uncertain affine model."""

    box: ParameterBox
    domain: StateDomain
    admissibility: AdmissibilityReport
    forced: bool = False

    @classmethod
    def create(cls, box: ParameterBox, domain: StateDomain, force: bool = False) -> "ModelSpec":
        report = validate(box, domain)
        if not report.accepted and not force:
            raise AdmissibilityError(
                "model rejected: " + "; ".join(report.reasons)
                + " (pass force=True to run without a uniqueness guarantee)",
                report=report,
            )
        return cls(box=box, domain=domain, admissibility=report, forced=force and not report.accepted)

    @property
    def no_uniqueness_guarantee(self) -> bool:
        return not self.admissibility.accepted

    def contains_state(self, x: float) -> bool:
        if self.domain is StateDomain.POSITIVE_HALF_LINE:
            return x > 0.0
        return math.isfinite(x)


def drift_interval(box: ParameterBox, x: float) -> Interval:
    """Interval of admissible drifts b0 + b1 x at state x."""
    if x >= 0.0:
        return Interval(box.b0_lo + box.b1_lo * x, box.b0_hi + box.b1_hi * x)
    return Interval(box.b0_lo + box.b1_hi * x, box.b0_hi + box.b1_lo * x)


def diffusion_interval(box: ParameterBox, x: float) -> Interval:
    """Interval of admissible squared diffusions a0 + a1 x^+ at state x."""
    xp = x if x > 0.0 else 0.0
    return Interval(box.a0_lo + box.a1_lo * xp, box.a0_hi + box.a1_hi * xp)


def worst_case_corner(box: ParameterBox, x0: float, direction: Direction) -> CornerParams:
    """Extremal corner law for monotone-convex payoffs anchored at x0.

    UPPER picks the maximal coefficients (a0_hi, a1_hi, b0_hi) with the
    drift slope maximizing b1 * x at the anchor sign; LOWER reflects every
    choice.  The frozen slope is a valid worst case only while the process
    keeps the sign of x0 (non-linear Vasicek with fixed slope, or the
    positive-half-line square-root model); dispatch enforces those regimes.
    """
    if direction is Direction.UPPER:
        b1 = box.b1_lo if x0 < 0.0 else box.b1_hi
        return CornerParams(b0=box.b0_hi, b1=b1, a0=box.a0_hi, a1=box.a1_hi, regime_x0=x0)
    b1 = box.b1_hi if x0 < 0.0 else box.b1_lo
    return CornerParams(b0=box.b0_lo, b1=b1, a0=box.a0_lo, a1=box.a1_lo, regime_x0=x0)


def transform_bounds(
    box: ParameterBox, x: float, f1: float, f2: float
) -> tuple[Interval, Interval]:
    """Coefficient intervals of F(X) given F'(x)=f1 and F''(x)=f2.

    The transformed squared diffusion is f1^2 * a*(x); the transformed drift
    interval is the exact range of f1*beta + f2*alpha/2 over
    (beta, alpha) in b*(x) x a*(x), attained at the four endpoint
    combinations because the objective is linear in each argument.
    """
    a = diffusion_interval(box, x)
    b = drift_interval(box, x)
    f1sq = f1 * f1
    a_f = Interval(f1sq * a.lo, f1sq * a.hi)
    candidates = [
        f1 * beta + 0.5 * f2 * alpha
        for beta in (b.lo, b.hi)
        for alpha in (a.lo, a.hi)
    ]
    return a_f, Interval(min(candidates), max(candidates))
