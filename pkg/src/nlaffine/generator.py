"""Pointwise extremal generator of the uncertain affine family.

For derivative values p = dv/dx and q = d2v/dx2 the generator envelope is

    G(x, p, q) = sup over the box of  (b0 + b1 x) p + (a0 + a1 x^+) q / 2,

and the infimum counterpart.  The objective is multilinear in the four
coefficients, so the extremum sits at a box corner and is resolved by four
sign tests; this is the PDE solver's inner loop and must stay O(1).
"""

from __future__ import annotations

import itertools

import numpy as np

from .params import CornerParams, ParameterBox


def sup_generator(box: ParameterBox, x: float, p: float, q: float) -> float:
    b0 = box.b0_hi if p >= 0.0 else box.b0_lo
    b1 = box.b1_hi if x * p >= 0.0 else box.b1_lo
    a0 = box.a0_hi if q >= 0.0 else box.a0_lo
    a1 = box.a1_hi if q >= 0.0 else box.a1_lo
    xp = x if x > 0.0 else 0.0
    return (b0 + b1 * x) * p + 0.5 * (a0 + a1 * xp) * q


def inf_generator(box: ParameterBox, x: float, p: float, q: float) -> float:
    b0 = box.b0_lo if p >= 0.0 else box.b0_hi
    b1 = box.b1_lo if x * p >= 0.0 else box.b1_hi
    a0 = box.a0_lo if q >= 0.0 else box.a0_hi
    a1 = box.a1_lo if q >= 0.0 else box.a1_hi
    xp = x if x > 0.0 else 0.0
    return (b0 + b1 * x) * p + 0.5 * (a0 + a1 * xp) * q


def argmax_theta(box: ParameterBox, x: float, p: float, q: float) -> CornerParams:
    """Corner attaining the supremum; ties broken toward upper endpoints."""
    b0 = box.b0_hi if p >= 0.0 else box.b0_lo
    b1 = box.b1_hi if x * p >= 0.0 else box.b1_lo
    a0 = box.a0_hi if q >= 0.0 else box.a0_lo
    a1 = box.a1_hi if q >= 0.0 else box.a1_lo
    return CornerParams(b0=b0, b1=b1, a0=a0, a1=a1, regime_x0=x)


def sup_generator_bruteforce(
    box: ParameterBox, x: float, p: float, q: float, n: int = 2
) -> float:
    """Grid-search oracle: max over an n^4 coefficient lattice.

    The lattice always contains the 16 box corners, and the objective is
    multilinear, so for any n >= 2 this equals sup_generator exactly.
    """
    if n < 2:
        raise ValueError("need at least the interval endpoints (n >= 2)")
    b0s = np.linspace(box.b0_lo, box.b0_hi, n)
    b1s = np.linspace(box.b1_lo, box.b1_hi, n)
    a0s = np.linspace(box.a0_lo, box.a0_hi, n)
    a1s = np.linspace(box.a1_lo, box.a1_hi, n)
    xp = x if x > 0.0 else 0.0
    best = -np.inf
    for b0, b1, a0, a1 in itertools.product(b0s, b1s, a0s, a1s):
        val = (b0 + b1 * x) * p + 0.5 * (a0 + a1 * xp) * q
        if val > best:
            best = val
    return float(best)
