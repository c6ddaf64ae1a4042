"""Numerical kernel backends.

The two hot loops (explicit PDE time marching and Monte Carlo path
stepping) exist twice: a compiled extension (``nlaffine._core``) and a
vectorized numpy fallback.  The active backend is selected at import from
the ``NLAFFINE_BACKEND`` environment variable ("auto", "compiled",
"python"); ``use_backend`` switches it at runtime.  Both implementations
perform the same arithmetic in the same order, so results agree to
rounding.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from . import _core as _compiled
except ImportError:  # pragma: no cover - source tree without built extension
    _compiled = None

BC_EXTRAPOLATE = 0
BC_DIRICHLET = 1


def _explicit_march_numpy(
    v0, x, bl, bh, al, ah, dt, n_sub, dx, is_sup, discount, bc_mode, bc_lo, bc_hi
):
    v = np.array(v0, dtype=float, copy=True)
    out = np.empty_like(v)
    blp = np.maximum(bl, 0.0)
    blm = np.minimum(bl, 0.0)
    bhp = np.maximum(bh, 0.0)
    bhm = np.minimum(bh, 0.0)
    inv_dx = 1.0 / dx
    inv_dx2 = inv_dx * inv_dx
    inv_denom = 1.0 / (1.0 + dt * x) if discount else None
    for _ in range(n_sub):
        dp = (v[2:] - v[1:-1]) * inv_dx
        dm = (v[1:-1] - v[:-2]) * inv_dx
        d2 = (v[2:] - 2.0 * v[1:-1] + v[:-2]) * inv_dx2
        g_lo = blp[1:-1] * dp + blm[1:-1] * dm
        g_hi = bhp[1:-1] * dp + bhm[1:-1] * dm
        c_lo = al[1:-1] * d2
        c_hi = ah[1:-1] * d2
        if is_sup:
            drift = np.maximum(g_lo, g_hi)
            diff = 0.5 * np.maximum(c_lo, c_hi)
        else:
            drift = np.minimum(g_lo, g_hi)
            diff = 0.5 * np.minimum(c_lo, c_hi)
        out[1:-1] = v[1:-1] + dt * (drift + diff)
        if bc_mode == BC_DIRICHLET:
            out[0] = bc_lo
            out[-1] = bc_hi
        else:
            p0 = (v[1] - v[0]) * inv_dx
            pn = (v[-1] - v[-2]) * inv_dx
            if is_sup:
                d0 = max(bl[0] * p0, bh[0] * p0)
                dn = max(bl[-1] * pn, bh[-1] * pn)
            else:
                d0 = min(bl[0] * p0, bh[0] * p0)
                dn = min(bl[-1] * pn, bh[-1] * pn)
            out[0] = v[0] + dt * d0
            out[-1] = v[-1] + dt * dn
        if discount:
            out *= inv_denom
        v, out = out, v
    return v


def _mc_march_numpy(xs, z, b0, b1, a0, a1, dt, sqdt, n_pairs, integ, mins):
    n = xs.shape[0]
    zz = np.empty(n)
    for row in z:
        if n_pairs > 0:
            zz[:n_pairs] = row
            zz[n_pairs:] = -row
        else:
            zz[:] = row
        var = np.maximum(a0 + a1 * np.maximum(xs, 0.0), 0.0)
        xn = xs + (b0 + b1 * xs) * dt + np.sqrt(var) * sqdt * zz
        if integ is not None:
            integ += 0.5 * (xs + xn) * dt
        if mins is not None:
            np.minimum(mins, xn, out=mins)
        xs[:] = xn


_BACKENDS = {}
_ACTIVE = None


def _register():
    _BACKENDS["python"] = {
        "name": "python",
        "explicit_march": _explicit_march_numpy,
        "mc_march": _mc_march_numpy,
    }
    if _compiled is not None:
        _BACKENDS["compiled"] = {
            "name": "compiled",
            "explicit_march": _compiled.explicit_march,
            "mc_march": _compiled.mc_march,
        }


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def use_backend(name: str) -> str:
    """Select a backend by name ("auto" picks compiled when built)."""
    global _ACTIVE
    if name == "auto":
        name = "compiled" if "compiled" in _BACKENDS else "python"
    if name not in _BACKENDS:
        raise RuntimeError(
            f"backend {name!r} not available (have {available_backends()}); "
            "build the extension or set NLAFFINE_BACKEND=python"
        )
    _ACTIVE = _BACKENDS[name]
    return _ACTIVE["name"]


def active_backend() -> str:
    return _ACTIVE["name"]


def explicit_march(v0, x, bl, bh, al, ah, dt, n_sub, dx, is_sup, discount, bc_mode, bc_lo, bc_hi):
    """March n_sub explicit monotone sub-steps, returning the new level.

    Interior nodes use the Kushner-type discretization: for each drift
    interval endpoint the advection term takes the one-sided difference
    matching the endpoint's sign, the second difference picks the
    diffusion endpoint by curvature sign, and the envelope (max for the
    upper equation, min for the lower) of these monotone candidates is
    itself monotone under the CFL bound.  Boundary nodes pin the second
    difference to zero and use the inward one-sided slope; the state-rate
    reaction term, when enabled, is applied implicitly.
    """
    return _ACTIVE["explicit_march"](
        np.ascontiguousarray(v0, dtype=float),
        np.ascontiguousarray(x, dtype=float),
        np.ascontiguousarray(bl, dtype=float),
        np.ascontiguousarray(bh, dtype=float),
        np.ascontiguousarray(al, dtype=float),
        np.ascontiguousarray(ah, dtype=float),
        float(dt),
        int(n_sub),
        float(dx),
        bool(is_sup),
        bool(discount),
        int(bc_mode),
        float(bc_lo),
        float(bc_hi),
    )


def mc_march(xs, z, b0, b1, a0, a1, dt, sqdt, n_pairs, integ, mins):
    """Advance all paths through the normal-increment block z (in place)."""
    _ACTIVE["mc_march"](
        xs,
        np.ascontiguousarray(z, dtype=float),
        float(b0),
        float(b1),
        float(a0),
        float(a1),
        float(dt),
        float(sqdt),
        int(n_pairs),
        integ,
        mins,
    )


_register()
use_backend(os.environ.get("NLAFFINE_BACKEND", "auto"))
