import math

import numpy as np
import pytest

from nlaffine import (
    ConfigError,
    CornerParams,
    NumericalError,
    SimConfig,
    SimScheme,
    identity,
    constant,
    mc_expectation,
    positivity_fraction,
    simulate_terminal,
)

VASICEK = CornerParams(b0=0.15, b1=-0.5, a0=0.02, a1=0.0)


def test_config_validation():
    with pytest.raises(ConfigError):
        SimConfig(n_paths=1, n_steps=10)
    with pytest.raises(ConfigError):
        SimConfig(n_paths=10, n_steps=0)
    with pytest.raises(ConfigError):
        SimConfig(n_paths=11, n_steps=10, antithetic=True)
    SimConfig(n_paths=11, n_steps=10, antithetic=False)


def test_deterministic_drift_only_paths():
    corner = CornerParams(b0=0.3, b1=0.0, a0=0.0, a1=0.0)
    cfg = SimConfig(n_paths=100, n_steps=16, seed=4)
    samples = simulate_terminal(corner, 0.7, 2.0, cfg)
    assert np.allclose(samples.terminal, 0.7 + 0.3 * 2.0, rtol=0, atol=1e-14)


def test_reproducibility_bit_identical():
    cfg = SimConfig(n_paths=2000, n_steps=40, seed=99)
    a = simulate_terminal(VASICEK, 0.1, 1.0, cfg, with_discount=True)
    b = simulate_terminal(VASICEK, 0.1, 1.0, cfg, with_discount=True)
    assert np.array_equal(a.terminal, b.terminal)
    assert np.array_equal(a.discount_integral, b.discount_integral)
    e1 = mc_expectation(a, identity())
    e2 = mc_expectation(b, identity())
    assert (e1.mean, e1.std_error) == (e2.mean, e2.std_error)


def euler_mean_recursion(corner, x0, T, n_steps):
    dt = T / n_steps
    m = x0
    for _ in range(n_steps):
        m = m + (corner.b0 + corner.b1 * m) * dt
    return m


def test_antithetic_pairs_reproduce_drift_recursion_exactly():
    # constant diffusion: the paired +z/-z increments cancel in the pair mean,
    # leaving exactly the deterministic update of the time-discrete mean
    cfg = SimConfig(n_paths=2000, n_steps=25, seed=7, antithetic=True)
    samples = simulate_terminal(VASICEK, 0.4, 1.0, cfg)
    est = mc_expectation(samples, identity())
    expected = euler_mean_recursion(VASICEK, 0.4, 1.0, 25)
    assert est.mean == pytest.approx(expected, abs=1e-12)


def test_weak_order_one_in_the_mean():
    # antithetic + constant diffusion makes the mean error purely deterministic
    exact = 0.4 * math.exp(-0.5) + 0.15 * (1.0 - math.exp(-0.5)) / 0.5
    errs = []
    for n in (8, 16, 32, 64):
        cfg = SimConfig(n_paths=64, n_steps=n, seed=3, antithetic=True)
        est = mc_expectation(simulate_terminal(VASICEK, 0.4, 1.0, cfg), identity())
        errs.append(abs(est.mean - exact))
    slopes = [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    for s in slopes:
        assert abs(s - 1.0) <= 0.3


def test_constant_payoff_estimate():
    cfg = SimConfig(n_paths=500, n_steps=10, seed=11)
    est = mc_expectation(simulate_terminal(VASICEK, 0.0, 1.0, cfg), constant(1.0))
    assert est.mean == 1.0
    assert est.std_error == 0.0
    assert not est.discounted


def test_discounted_estimate_flag():
    cfg = SimConfig(n_paths=500, n_steps=10, seed=11)
    samples = simulate_terminal(VASICEK, 0.0, 1.0, cfg, with_discount=True)
    est = mc_expectation(samples, constant(1.0))
    assert est.discounted
    assert 0.5 < est.mean < 1.5


def test_std_error_counts_pairs_once():
    cfg_a = SimConfig(n_paths=4000, n_steps=5, seed=21, antithetic=True)
    samples = simulate_terminal(VASICEK, 0.2, 1.0, cfg_a)
    est = mc_expectation(samples, identity())
    vals = samples.terminal
    pair_means = 0.5 * (vals[:2000] + vals[2000:])
    se = np.std(pair_means, ddof=1) / math.sqrt(2000)
    assert est.std_error == pytest.approx(se, rel=1e-12)
    assert est.n_paths == 4000


def test_full_truncation_matches_euler_for_admissible_boxes():
    # with a0, a1 >= 0 the two updates coincide by construction
    corner = CornerParams(b0=0.15, b1=-0.5, a0=0.0, a1=0.2)
    for scheme in SimScheme:
        cfg = SimConfig(n_paths=1000, n_steps=50, seed=5, scheme=scheme)
        s = simulate_terminal(corner, 0.8, 1.0, cfg)
        if scheme is SimScheme.EULER:
            ref = s.terminal
        else:
            assert np.array_equal(ref, s.terminal)


def test_feller_warning_recorded():
    corner = CornerParams(b0=0.05, b1=-0.5, a0=0.0, a1=0.4)
    cfg = SimConfig(n_paths=100, n_steps=10, seed=2)
    s = simulate_terminal(corner, 0.5, 1.0, cfg)
    assert any("positivity floor" in w for w in s.warnings)


def test_nan_guard():
    corner = CornerParams(b0=0.0, b1=1e8, a0=0.0, a1=0.0)
    cfg = SimConfig(n_paths=10, n_steps=50, seed=1)
    with pytest.raises(NumericalError):
        simulate_terminal(corner, 1.0, 1.0, cfg)


def test_simulate_paths_matches_terminal_sampler(tmp_path):
    from nlaffine import dump_paths_csv, simulate_paths
    from nlaffine.util import read_csv

    cfg = SimConfig(n_paths=64, n_steps=12, seed=31)
    paths = simulate_paths(VASICEK, 0.2, 1.0, cfg)
    assert paths.shape == (13, 64)
    terminal = simulate_terminal(VASICEK, 0.2, 1.0, cfg)
    assert np.array_equal(paths[-1], terminal.terminal)
    out = tmp_path / "paths.csv"
    dump_paths_csv(out, paths, 1.0)
    header, rows = read_csv(out)
    assert header == ["path_id", "t", "x"]
    assert len(rows) == 64 * 13
    assert rows[0][0] == "0" and float(rows[0][2]) == 0.2


def test_positivity_preconditions():
    with pytest.raises(ConfigError):
        positivity_fraction(VASICEK, 1.0, 1.0, SimConfig(n_paths=10, n_steps=10))
    cir = CornerParams(b0=0.15, b1=-0.5, a0=0.0, a1=0.2)
    with pytest.raises(ConfigError):
        positivity_fraction(cir, -1.0, 1.0, SimConfig(n_paths=10, n_steps=10))


def test_positivity_deterministic_increasing_path():
    corner = CornerParams(b0=0.1, b1=0.0, a0=0.0, a1=0.0)
    frac = positivity_fraction(corner, 0.5, 1.0, SimConfig(n_paths=100, n_steps=20, seed=0))
    assert frac == 0.0


def test_positivity_feller_contrast():
    ok = CornerParams(b0=0.15, b1=-0.5, a0=0.0, a1=0.2)
    bad = CornerParams(b0=0.05, b1=-0.5, a0=0.0, a1=0.4)
    cfg = SimConfig(n_paths=4000, n_steps=500, seed=42)
    frac_ok = positivity_fraction(ok, 0.2, 1.0, cfg)
    frac_bad = positivity_fraction(bad, 0.2, 1.0, cfg)
    assert frac_ok < 0.02
    assert frac_bad > 0.1
