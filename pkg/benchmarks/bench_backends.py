"""Timing comparison of the compiled kernels against the numpy fallback.

Run from the repository root after installing the package:

    python benchmarks/bench_backends.py

Workloads: the explicit monotone PDE march on a production-sized grid and
a Monte Carlo batch, each executed on every available backend.  Results are
checked to agree before timings are reported.
"""

import time

import numpy as np

import nlaffine as nla
from nlaffine import backends


def time_call(fn, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_pde(backend):
    backends.use_backend(backend)
    box = nla.ParameterBox(b0_lo=0.05, b0_hi=0.15, b1_lo=-1.0, b1_hi=-0.5,
                           a0_lo=0.01, a0_hi=0.08, a1_lo=0.0, a1_hi=0.2)
    model = nla.ModelSpec.create(box, nla.StateDomain.REAL_LINE)
    grid = nla.Grid(x_min=-3.0, x_max=4.0, n_x=1401, T=1.0, n_t=400)
    cfg = nla.SolveConfig(discounting=nla.Discounting.STATE_RATE)

    def run():
        surf = nla.solve(model, nla.call(0.5), grid, cfg)
        return nla.read_value(surf, 0.0, 0.3)

    return time_call(run)


def bench_mc(backend):
    # full pipeline; note the variate generation (Philox + inverse CDF) is
    # shared between backends so they stay bit-identical
    backends.use_backend(backend)
    corner = nla.CornerParams(b0=0.15, b1=-0.5, a0=0.0, a1=0.2)
    cfg = nla.SimConfig(n_paths=200_000, n_steps=250, seed=7, antithetic=False)

    def run():
        samples = nla.simulate_terminal(corner, 1.0, 1.0, cfg, with_discount=True)
        return nla.mc_expectation(samples, nla.call(0.5)).mean

    return time_call(run)


def bench_mc_kernel(backend):
    # kernel-only: march pre-drawn increments
    backends.use_backend(backend)
    rng = np.random.default_rng(3)
    z = rng.normal(size=(250, 200_000))

    def run():
        xs = np.full(200_000, 1.0)
        integ = np.zeros(200_000)
        backends.mc_march(xs, z, 0.15, -0.5, 0.0, 0.2, 0.004, 0.0632, 0, integ, None)
        return float(xs.mean())

    return time_call(run)


def main():
    names = backends.available_backends()
    print(f"available backends: {names}")
    for label, bench in (
        ("explicit PDE march (1401 x 400)", bench_pde),
        ("monte carlo pipeline (200k paths x 250 steps)", bench_mc),
        ("monte carlo kernel only (200k paths x 250 steps)", bench_mc_kernel),
    ):
        print(f"\n{label}")
        results = {}
        for name in names:
            elapsed, value = bench(name)
            results[name] = (elapsed, value)
            print(f"  {name:>8}: {elapsed * 1e3:9.1f} ms   result {value:.9f}")
        if len(results) == 2:
            vals = [v for _, v in results.values()]
            assert abs(vals[0] - vals[1]) < 1e-10, "backends disagree"
            speedup = results["python"][0] / results["compiled"][0]
            print(f"  speedup compiled vs python: {speedup:.1f}x")
    backends.use_backend("auto")


if __name__ == "__main__":
    main()
