import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlaffine import (
    AdmissibilityError,
    ConfigError,
    Direction,
    Interval,
    ModelSpec,
    ParameterBox,
    StateDomain,
    UniquenessRegime,
    diffusion_interval,
    drift_interval,
    transform_bounds,
    validate,
    worst_case_corner,
)

from conftest import enumerate_diffusion, enumerate_drift

finite = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)
nonneg = st.floats(min_value=0.0, max_value=5.0, allow_nan=False)


@st.composite
def boxes(draw):
    b0 = sorted((draw(finite), draw(finite)))
    b1 = sorted((draw(finite), draw(finite)))
    a0 = sorted((draw(nonneg), draw(nonneg)))
    a1 = sorted((draw(nonneg), draw(nonneg)))
    return ParameterBox(
        b0_lo=b0[0], b0_hi=b0[1], b1_lo=b1[0], b1_hi=b1[1],
        a0_lo=a0[0], a0_hi=a0[1], a1_lo=a1[0], a1_hi=a1[1],
    )


@st.composite
def nested_boxes(draw):
    outer = draw(boxes())
    def inner_pair(lo, hi):
        u = draw(st.floats(min_value=0.0, max_value=1.0))
        v = draw(st.floats(min_value=0.0, max_value=1.0))
        a, b = sorted((lo + u * (hi - lo), lo + v * (hi - lo)))
        return a, b
    b0 = inner_pair(outer.b0_lo, outer.b0_hi)
    b1 = inner_pair(outer.b1_lo, outer.b1_hi)
    a0 = inner_pair(outer.a0_lo, outer.a0_hi)
    a1 = inner_pair(outer.a1_lo, outer.a1_hi)
    inner = ParameterBox(
        b0_lo=b0[0], b0_hi=b0[1], b1_lo=b1[0], b1_hi=b1[1],
        a0_lo=a0[0], a0_hi=a0[1], a1_lo=a1[0], a1_hi=a1[1],
    )
    return outer, inner


def test_box_invariants():
    with pytest.raises(ValueError):
        ParameterBox(b0_lo=1.0, b0_hi=0.0, b1_lo=0, b1_hi=0, a0_lo=0, a0_hi=0, a1_lo=0, a1_hi=0)
    with pytest.raises(ValueError):
        ParameterBox(b0_lo=0, b0_hi=0, b1_lo=0, b1_hi=0, a0_lo=-0.1, a0_hi=0.1, a1_lo=0, a1_hi=0)


def test_from_mapping_sorts_and_warns():
    data = dict(b0_lo=0.2, b0_hi=0.1, b1_lo=-1.0, b1_hi=-0.5, a0_lo=0.0, a0_hi=0.1, a1_lo=0.0, a1_hi=0.0)
    box, warnings = ParameterBox.from_mapping(data)
    assert box.b0_lo == 0.1 and box.b0_hi == 0.2
    assert len(warnings) == 1 and "sorted" in warnings[0]
    # negative diffusion cannot be fixed by sorting
    bad = dict(data, a0_lo=-0.2, a0_hi=-0.1, b0_lo=0.1, b0_hi=0.2)
    with pytest.raises(ConfigError):
        ParameterBox.from_mapping(bad)
    with pytest.raises(ConfigError):
        ParameterBox.from_mapping(dict(data, extra=1.0))


def test_serialization_round_trip(fig2_box):
    box2, warnings = ParameterBox.from_mapping(fig2_box.to_dict())
    assert box2 == fig2_box and not warnings


def test_validate_real_line_rejects_degenerate_level(fig2_box):
    report = validate(fig2_box, StateDomain.REAL_LINE)
    assert not report.proper
    assert report.uniqueness_regime is UniquenessRegime.NONE
    assert not report.accepted
    with pytest.raises(AdmissibilityError):
        ModelSpec.create(fig2_box, StateDomain.REAL_LINE)
    forced = ModelSpec.create(fig2_box, StateDomain.REAL_LINE, force=True)
    assert forced.no_uniqueness_guarantee
    # bumping the diffusion level into positivity flips the verdict
    import dataclasses

    bumped = dataclasses.replace(fig2_box, a0_lo=0.01)
    report2 = validate(bumped, StateDomain.REAL_LINE)
    assert report2.accepted and report2.uniqueness_regime is UniquenessRegime.LIPSCHITZ


def test_validate_half_line_floor():
    ok = ParameterBox(b0_lo=0.15, b0_hi=0.2, b1_lo=-1.0, b1_hi=-0.5,
                      a0_lo=0.0, a0_hi=0.0, a1_lo=0.1, a1_hi=0.2)
    report = validate(ok, StateDomain.POSITIVE_HALF_LINE)
    assert report.proper and report.feller_ok
    assert report.uniqueness_regime is UniquenessRegime.DEGENERATE

    bad = ParameterBox(b0_lo=0.15, b0_hi=0.2, b1_lo=-1.0, b1_hi=-0.5,
                       a0_lo=0.0, a0_hi=0.0, a1_lo=0.1, a1_hi=0.4)
    report2 = validate(bad, StateDomain.POSITIVE_HALF_LINE)
    assert not report2.accepted and not report2.feller_ok


def test_drift_interval_examples(fig2_box):
    assert drift_interval(fig2_box, 1.0) == Interval(-0.95, -0.35)
    assert drift_interval(fig2_box, 0.0) == Interval(fig2_box.b0_lo, fig2_box.b0_hi)
    assert drift_interval(fig2_box, -1.0) == Interval(0.55, 1.15)


def test_diffusion_interval_examples(fig2_box):
    assert diffusion_interval(fig2_box, 0.5) == Interval(0.0, 0.08 + 0.2 * 0.5)
    assert diffusion_interval(fig2_box, -2.3) == Interval(fig2_box.a0_lo, fig2_box.a0_hi)
    deg = ParameterBox(b0_lo=0, b0_hi=0, b1_lo=0, b1_hi=0, a0_lo=0.3, a0_hi=0.3, a1_lo=0.4, a1_hi=0.4)
    assert diffusion_interval(deg, 1.0) == Interval(0.7, 0.7)


@settings(max_examples=200, deadline=None)
@given(boxes(), finite)
def test_intervals_match_corner_enumeration(box, x):
    lo, hi = enumerate_drift(box, x)
    b = drift_interval(box, x)
    assert math.isclose(b.lo, lo, rel_tol=0, abs_tol=1e-12)
    assert math.isclose(b.hi, hi, rel_tol=0, abs_tol=1e-12)
    lo, hi = enumerate_diffusion(box, x)
    a = diffusion_interval(box, x)
    assert math.isclose(a.lo, lo, rel_tol=0, abs_tol=1e-12)
    assert math.isclose(a.hi, hi, rel_tol=0, abs_tol=1e-12)
    assert a.lo >= 0.0


@settings(max_examples=200, deadline=None)
@given(nested_boxes(), finite)
def test_interval_maps_monotone_in_box(pair, x):
    outer, inner = pair
    assert outer.includes(inner)
    bo, bi = drift_interval(outer, x), drift_interval(inner, x)
    ao, ai = diffusion_interval(outer, x), diffusion_interval(inner, x)
    tol = 1e-12
    assert bo.lo <= bi.lo + tol and bi.hi <= bo.hi + tol
    assert ao.lo <= ai.lo + tol and ai.hi <= ao.hi + tol


def test_worst_case_corner_examples(fig2_box):
    up = worst_case_corner(fig2_box, 1.0, Direction.UPPER)
    assert (up.b0, up.b1, up.a0, up.a1) == (0.15, -0.5, 0.08, 0.2)
    assert up.regime_x0 == 1.0
    up_neg = worst_case_corner(fig2_box, -1.0, Direction.UPPER)
    assert up_neg.b1 == -1.0
    lo = worst_case_corner(fig2_box, 1.0, Direction.LOWER)
    assert (lo.b0, lo.b1, lo.a0, lo.a1) == (0.05, -1.0, 0.0, 0.0)
    deg = ParameterBox(b0_lo=0.1, b0_hi=0.1, b1_lo=-0.3, b1_hi=-0.3,
                       a0_lo=0.02, a0_hi=0.02, a1_lo=0.0, a1_hi=0.0)
    c1 = worst_case_corner(deg, 0.7, Direction.UPPER)
    c2 = worst_case_corner(deg, 0.7, Direction.LOWER)
    assert (c1.b0, c1.b1, c1.a0, c1.a1) == (c2.b0, c2.b1, c2.a0, c2.a1)


@settings(max_examples=200, deadline=None)
@given(boxes(), finite)
def test_upper_corner_dominates_drift(box, x0):
    corner = worst_case_corner(box, x0, Direction.UPPER)
    # at any state with the anchor's sign the corner drift is maximal
    for x in (x0, 0.5 * x0, 2.0 * x0):
        best = max(b0 + b1 * x for b0, b1, a0, a1 in box.corners())
        assert corner.b0 + corner.b1 * x >= best - 1e-12


def test_transform_bounds_identity(fig2_box):
    for x in (-1.3, 0.0, 0.8):
        a_f, b_f = transform_bounds(fig2_box, x, 1.0, 0.0)
        assert a_f == diffusion_interval(fig2_box, x)
        assert b_f == drift_interval(fig2_box, x)


def test_transform_bounds_exponential_map():
    # log-price dynamics with known slope zero turn into the multiplicative
    # model with drift x*b0 + x*a0/2 and squared diffusion x^2 * a0
    box = ParameterBox(b0_lo=0.01, b0_hi=0.05, b1_lo=0.0, b1_hi=0.0,
                       a0_lo=0.04, a0_hi=0.09, a1_lo=0.0, a1_hi=0.0)
    for x in (-0.7, 0.0, 1.1):
        s = math.exp(x)
        a_f, b_f = transform_bounds(box, x, s, s)
        assert math.isclose(a_f.lo, s * s * box.a0_lo, rel_tol=1e-12)
        assert math.isclose(a_f.hi, s * s * box.a0_hi, rel_tol=1e-12)
        assert math.isclose(b_f.lo, s * box.b0_lo + 0.5 * s * box.a0_lo, rel_tol=1e-12)
        assert math.isclose(b_f.hi, s * box.b0_hi + 0.5 * s * box.a0_hi, rel_tol=1e-12)


def test_transform_bounds_square_map():
    # F(x) = x^2 with no drift level: bounds become 2 x^2 b1 + a0
    box = ParameterBox(b0_lo=0.0, b0_hi=0.0, b1_lo=-0.8, b1_hi=0.6,
                       a0_lo=0.1, a0_hi=0.3, a1_lo=0.0, a1_hi=0.0)
    for x in (-1.4, 0.9):
        a_f, b_f = transform_bounds(box, x, 2.0 * x, 2.0)
        assert math.isclose(b_f.lo, 2.0 * x * x * box.b1_lo + box.a0_lo, rel_tol=1e-12)
        assert math.isclose(b_f.hi, 2.0 * x * x * box.b1_hi + box.a0_hi, rel_tol=1e-12)
        assert math.isclose(a_f.lo, 4.0 * x * x * box.a0_lo, rel_tol=1e-12)
        assert math.isclose(a_f.hi, 4.0 * x * x * box.a0_hi, rel_tol=1e-12)


def test_state_domain_parsing():
    assert StateDomain.from_string("R") is StateDomain.REAL_LINE
    assert StateDomain.from_string("R+") is StateDomain.POSITIVE_HALF_LINE
    with pytest.raises(ConfigError):
        StateDomain.from_string("C")
