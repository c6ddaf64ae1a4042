"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s``.  Every tolerance is
fixed here; the runtime budgets are asserted after the correctness checks.
"""

import math
import time

import numpy as np
import pytest

from nlaffine import (
    CornerParams,
    Direction,
    Discounting,
    Grid,
    Method,
    ModelSpec,
    ParameterBox,
    RiccatiMode,
    SimConfig,
    SolveConfig,
    StateDomain,
    bond_curve,
    butterfly,
    call,
    cir_bond_closed_form,
    constant,
    exponential,
    identity,
    mc_expectation,
    mgf_bound,
    positivity_fraction,
    price,
    read_value,
    simulate_terminal,
    solve,
    solve_riccati,
    sup_generator,
    sup_generator_bruteforce,
    vasicek_closed_form,
)
from nlaffine import figures
from nlaffine.pricing import auto_grid

VASICEK_CORNER = CornerParams(b0=0.15, b1=-0.5, a0=0.02, a1=0.0)
CIR_CORNER = CornerParams(b0=0.15, b1=-0.5, a0=0.0, a1=0.2)


def report(num, elapsed, budget, detail):
    print(f"[criterion {num}] PASS in {elapsed:.2f}s (budget {budget:g}s): {detail}")
    assert elapsed < budget


def test_criterion_1_generator_exactness():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(10_000):
        b0 = np.sort(rng.normal(size=2) * 2.0)
        b1 = np.sort(rng.normal(size=2) * 2.0)
        a0 = np.sort(np.abs(rng.normal(size=2)) * 2.0)
        a1 = np.sort(np.abs(rng.normal(size=2)) * 2.0)
        box = ParameterBox(b0_lo=b0[0], b0_hi=b0[1], b1_lo=b1[0], b1_hi=b1[1],
                           a0_lo=a0[0], a0_hi=a0[1], a1_lo=a1[0], a1_hi=a1[1])
        x, p, q = rng.normal(size=3) * 3.0
        val = sup_generator(box, x, p, q)
        ref = sup_generator_bruteforce(box, x, p, q, 2)
        worst = max(worst, abs(val - ref) / max(1.0, abs(ref)))
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-12
    report(1, elapsed, 1.0, f"10^4 randomized queries, worst rel diff {worst:.2e}")


def test_criterion_2_riccati_vs_closed_forms():
    t0 = time.perf_counter()
    cases = [
        ("gaussian transform", VASICEK_CORNER, 1.0, RiccatiMode.MGF,
         lambda t: vasicek_closed_form(VASICEK_CORNER, 1.0, t, RiccatiMode.MGF)),
        ("gaussian bond", VASICEK_CORNER, 0.0, RiccatiMode.BOND,
         lambda t: vasicek_closed_form(VASICEK_CORNER, 0.0, t, RiccatiMode.BOND)),
        ("square-root bond", CIR_CORNER, 0.0, RiccatiMode.BOND,
         lambda t: cir_bond_closed_form(CIR_CORNER, t)),
    ]
    worst = 0.0
    for _, corner, u, mode, closed in cases:
        sol = solve_riccati(corner, u, 5.0, mode=mode)
        for t, phi, psi in zip(sol.t_grid, sol.phi, sol.psi):
            cphi, cpsi = closed(t)
            worst = max(
                worst,
                abs(phi - cphi) / max(1.0, abs(cphi)),
                abs(psi - cpsi) / max(1.0, abs(cpsi)),
            )
    assert worst <= 1e-8
    # step-halving order on the transform system
    ref_phi, ref_psi = vasicek_closed_form(VASICEK_CORNER, 1.0, 2.0, RiccatiMode.MGF)
    errs = []
    for n in (8, 16, 32):
        phi, psi = solve_riccati(VASICEK_CORNER, 1.0, 2.0, n_steps=n).final
        errs.append(abs(phi - ref_phi) + abs(psi - ref_psi))
    slopes = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(3.5 <= s <= 4.5 for s in slopes)
    elapsed = time.perf_counter() - t0
    report(2, elapsed, 1.0, f"max rel err {worst:.2e}, halving slopes {[f'{s:.2f}' for s in slopes]}")


def test_criterion_3_degenerate_pde_bond_anchor():
    box = ParameterBox(b0_lo=0.15, b0_hi=0.15, b1_lo=-0.5, b1_hi=-0.5,
                       a0_lo=0.02, a0_hi=0.02, a1_lo=0.0, a1_hi=0.0)
    model = ModelSpec.create(box, StateDomain.REAL_LINE)
    grid = Grid(x_min=-1.5, x_max=1.5, n_x=801, T=1.0, n_t=800)
    t0 = time.perf_counter()
    surf = solve(model, constant(1.0), grid, SolveConfig(discounting=Discounting.STATE_RATE))
    got = read_value(surf, 0.0, 0.05)
    elapsed = time.perf_counter() - t0
    phi, psi = vasicek_closed_form(VASICEK_CORNER, 0.0, 1.0, RiccatiMode.BOND)
    exact = math.exp(phi + psi * 0.05)
    rel = abs(got - exact) / exact
    assert rel <= 5e-3
    report(3, elapsed, 10.0, f"801x800 bond {got:.6f} vs {exact:.6f} (rel {rel:.2e})")


def test_criterion_4_corner_regime_cross_checks(cir_model, vasicek_fixed_slope_model):
    # square-root model: closed-form upper bond vs discounted PDE
    t0 = time.perf_counter()
    ric, _ = bond_curve(cir_model, 1.0, [1.0], method=Method.RICCATI)
    pde, _ = bond_curve(cir_model, 1.0, [1.0], method=Method.PDE)
    rel_bond = abs(ric[0].upper - pde[0].upper) / ric[0].upper
    elapsed_bond = time.perf_counter() - t0
    assert rel_bond <= 1e-2
    # fixed-slope gaussian model: closed-form upper transform vs PDE
    t0 = time.perf_counter()
    up_ric = mgf_bound(vasicek_fixed_slope_model, 0.0, 1.0, 1.0, Direction.UPPER)
    up_pde = price(vasicek_fixed_slope_model, exponential(1.0), 0.0, 1.0, method=Method.PDE).upper
    rel_mgf = abs(up_ric - up_pde) / up_ric
    elapsed_mgf = time.perf_counter() - t0
    assert rel_mgf <= 1e-2
    assert elapsed_bond < 30.0 and elapsed_mgf < 30.0
    report(4, elapsed_bond + elapsed_mgf, 60.0,
           f"bond rel {rel_bond:.2e}, transform rel {rel_mgf:.2e}")


def test_criterion_5_monte_carlo_triangulation(cir_model):
    t0 = time.perf_counter()
    cfg = SimConfig(n_paths=100_000, n_steps=200, seed=12345, antithetic=False)
    # (a) gaussian corner, exponential payoff vs closed form
    est_a = mc_expectation(simulate_terminal(VASICEK_CORNER, 0.0, 1.0, cfg), exponential(1.0))
    phi, psi = vasicek_closed_form(VASICEK_CORNER, 1.0, 1.0, RiccatiMode.MGF)
    exact_a = math.exp(phi)
    dev_a = abs(est_a.mean - exact_a) / est_a.std_error
    assert dev_a <= 3.0
    # (b) square-root corner, terminal mean vs numeric transform derivative
    cfg_b = SimConfig(n_paths=100_000, n_steps=200, seed=999, antithetic=False)
    est_b = mc_expectation(simulate_terminal(CIR_CORNER, 1.0, 1.0, cfg_b), identity())
    h = 1e-5
    def transform(u):
        phi_u, psi_u = solve_riccati(CIR_CORNER, u, 1.0).final
        return math.exp(phi_u + psi_u * 1.0)
    exact_b = (transform(h) - transform(-h)) / (2.0 * h)
    dev_b = abs(est_b.mean - exact_b) / est_b.std_error
    assert dev_b <= 3.0
    # (c) worst-case corner call vs PDE upper price in the corner regime
    cfg_c = SimConfig(n_paths=100_000, n_steps=200, seed=777, antithetic=False)
    mc = price(cir_model, call(0.5), 1.0, 1.0, method=Method.MC, sim=cfg_c)
    pde = price(cir_model, call(0.5), 1.0, 1.0, method=Method.PDE)
    se_c = mc.diagnostics["mc"]["std_error_upper"]
    tol_c = max(3.0 * se_c, 0.01 * pde.upper)
    dev_c = abs(mc.upper - pde.upper)
    assert dev_c <= tol_c
    elapsed = time.perf_counter() - t0
    report(5, elapsed, 30.0,
           f"deviations {dev_a:.2f}se, {dev_b:.2f}se, {dev_c:.2e} (tol {tol_c:.2e})")


def test_criterion_6_positivity_under_refinement():
    t0 = time.perf_counter()
    fractions = []
    for n_steps in (250, 500, 1000, 2000):
        cfg = SimConfig(n_paths=20_000, n_steps=n_steps, seed=42)
        fractions.append(positivity_fraction(CIR_CORNER, 0.2, 1.0, cfg))
    elapsed = time.perf_counter() - t0
    assert fractions[-1] <= 0.01
    assert fractions[-1] < fractions[0]
    for a, b in zip(fractions, fractions[1:]):
        assert b <= a + 5e-4
    report(6, elapsed, 60.0, f"touch fractions {fractions}")


def test_criterion_7_order_structure():
    t0 = time.perf_counter()
    fig2 = figures.build_figure("fig2")
    by2 = {}
    for x, u, lo, label in fig2.rows:
        by2.setdefault(label, []).append((u, lo))
    for label, rows in by2.items():
        arr = np.array(rows)
        assert np.all(arr[:, 0] >= arr[:, 1] - 1e-10), label
    full = np.array(by2["vasicek_cir"])
    for label in ("vasicek", "cir"):
        sub = np.array(by2[label])
        assert np.all(full[:, 0] >= sub[:, 0] - 1e-12), label
    for name in ("fig3-call", "fig3-butterfly"):
        ds = figures.build_figure(name)
        rows = np.array([(u, lo) for x, u, lo, label in ds.rows if label == "nonlinear_vasicek"])
        assert np.all(rows[:, 0] >= rows[:, 1] - 1e-10)
        assert np.all(rows[:, 0] - rows[:, 1] >= -1e-10)
    # degenerate box: zero gap up to discretization
    box = ParameterBox(b0_lo=0.15, b0_hi=0.15, b1_lo=-0.5, b1_hi=-0.5,
                       a0_lo=0.02, a0_hi=0.02, a1_lo=0.0, a1_hi=0.0)
    model = ModelSpec.create(box, StateDomain.REAL_LINE)
    mu = price(model, call(0.5), 0.3, 1.0).model_risk
    assert 0.0 <= mu <= 1e-6
    elapsed = time.perf_counter() - t0
    report(7, elapsed, 120.0, f"envelopes ordered, degenerate gap {mu:.1e}")


def test_criterion_8_lipschitz_propagation():
    t0 = time.perf_counter()
    box, _, _ = figures.fig3_box()
    model = ModelSpec.create(box, StateDomain.REAL_LINE)
    worst_ratio = 0.0
    for payoff, lip in ((call(0.1), 1.0), (butterfly(-0.2, 0.3, 0.8), 2.0)):
        grid = auto_grid(model, [-0.5, 1.5], 1.0, n_x=801, n_t=100)
        dx = grid.dx
        for direction in Direction:
            surf = solve(model, payoff, grid, SolveConfig(direction=direction))
            slopes = np.abs(np.diff(surf.values[:, 1:-1], axis=1)) / dx
            worst_ratio = max(worst_ratio, float(np.max(slopes)) / lip)
            assert np.max(slopes) <= 1.05 * lip
    elapsed = time.perf_counter() - t0
    report(8, elapsed, 60.0, f"worst slope / L = {worst_ratio:.4f}")


def test_criterion_9_figure_datasets(tmp_path):
    t0 = time.perf_counter()
    # determinism: byte-identical CSV on rebuild
    ds1 = figures.build_figure("fig3-butterfly")
    ds2 = figures.build_figure("fig3-butterfly")
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    ds1.to_csv(p1)
    ds2.to_csv(p2)
    assert p1.read_bytes() == p2.read_bytes()
    # butterfly gap peaks within one grid cell of the middle strike
    rows = [(x, u - lo) for x, u, lo, label in ds1.rows if label == "nonlinear_vasicek"]
    xs = np.array([r[0] for r in rows])
    gap = np.array([r[1] for r in rows])
    x_peak = xs[int(np.argmax(gap))]
    assert abs(x_peak - 0.3) <= 0.05 + 1e-12
    # exponential-payoff experiment: overlap with the high-slope reference on
    # the positive half line within 1 percent
    fig1 = figures.build_figure("fig1")
    by = {}
    for x, u, lo, label in fig1.rows:
        by.setdefault(label, []).append((x, u))
    nl = dict((x, u) for x, u in by["nonlinear_vasicek"])
    ref = dict((x, u) for x, u in by["vasicek_high_slope"])
    worst = max(
        abs(nl[x] - ref[x]) / ref[x] for x in nl if x >= 0.0
    )
    assert worst <= 0.01
    elapsed = time.perf_counter() - t0
    report(9, elapsed, 120.0,
           f"deterministic CSVs, gap peak at {x_peak:g}, overlap dev {worst:.2%}")
