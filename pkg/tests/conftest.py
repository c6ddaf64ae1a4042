import numpy as np
import pytest

from nlaffine import ModelSpec, ParameterBox, StateDomain


@pytest.fixture
def fig2_box():
    # mixed-diffusion experiment table
    return ParameterBox(
        b0_lo=0.05, b0_hi=0.15,
        b1_lo=-1.0, b1_hi=-0.5,
        a0_lo=0.0, a0_hi=0.08,
        a1_lo=0.0, a1_hi=0.2,
    )


@pytest.fixture
def cir_box():
    return ParameterBox(
        b0_lo=0.15, b0_hi=0.2,
        b1_lo=-1.0, b1_hi=-0.5,
        a0_lo=0.0, a0_hi=0.0,
        a1_lo=0.1, a1_hi=0.2,
    )


@pytest.fixture
def cir_model(cir_box):
    return ModelSpec.create(cir_box, StateDomain.POSITIVE_HALF_LINE)


@pytest.fixture
def vasicek_fixed_slope_model():
    box = ParameterBox(
        b0_lo=0.05, b0_hi=0.15,
        b1_lo=-0.5, b1_hi=-0.5,
        a0_lo=0.01, a0_hi=0.02,
        a1_lo=0.0, a1_hi=0.0,
    )
    return ModelSpec.create(box, StateDomain.REAL_LINE)


@pytest.fixture
def degenerate_vasicek_box():
    # single-parameter model: exponential-payoff experiment's table values
    return ParameterBox(
        b0_lo=0.15, b0_hi=0.15,
        b1_lo=-0.5, b1_hi=-0.5,
        a0_lo=0.02, a0_hi=0.02,
        a1_lo=0.0, a1_hi=0.0,
    )


def corner_objective(theta, x, p, q):
    b0, b1, a0, a1 = theta
    return (b0 + b1 * x) * p + 0.5 * (a0 + a1 * max(x, 0.0)) * q


def enumerate_drift(box, x):
    vals = [b0 + b1 * x for b0, b1, a0, a1 in box.corners()]
    return min(vals), max(vals)


def enumerate_diffusion(box, x):
    vals = [a0 + a1 * max(x, 0.0) for b0, b1, a0, a1 in box.corners()]
    return min(vals), max(vals)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
