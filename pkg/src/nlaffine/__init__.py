"""Robust pricing for one-dimensional affine diffusions under parameter uncertainty.

The package computes upper and lower expectations of terminal payoffs over
all semimartingale laws whose drift and squared diffusion stay inside
state-dependent affine intervals, via three cross-checking routes: the
fully non-linear Kolmogorov / term-structure PDE, exponential-affine
Riccati closed forms for the worst-case corner laws, and corner-law Monte
Carlo.
"""

from .backends import active_backend, available_backends, use_backend
from .errors import (
    AdmissibilityError,
    BlowUpError,
    CflViolationError,
    ConfigError,
    NlaffineError,
    NumericalError,
    OutOfGridError,
    PolicyDivergenceError,
    RegimeError,
)
from .params import (
    AdmissibilityReport,
    CornerParams,
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
from .generator import argmax_theta, inf_generator, sup_generator, sup_generator_bruteforce
from .payoffs import PayoffSpec, Shape, butterfly, call, constant, custom, exponential, identity
from .pdesolver import (
    Dirichlet,
    Discounting,
    Grid,
    LINEAR_EXTRAPOLATION,
    Scheme,
    SolveConfig,
    ValueSurface,
    read_value,
    solve,
)
from .pricing import (
    BondQuote,
    Method,
    PricingResult,
    auto_grid,
    bond_curve,
    gaussian_expectation,
    model_risk,
    price,
    price_curve,
    vasicek_payoff_value,
)
from .riccati import (
    RiccatiMode,
    RiccatiSolution,
    bond_corner,
    bond_price_bound,
    cir_bond_closed_form,
    icx_regime,
    mgf_bound,
    mgf_upper,
    ou_mean_variance,
    solve_riccati,
    vasicek_closed_form,
)
from .simulate import (
    McEstimate,
    SimConfig,
    SimScheme,
    TerminalSamples,
    dump_paths_csv,
    mc_expectation,
    positivity_fraction,
    simulate_paths,
    simulate_terminal,
)

__version__ = "0.1.0"
