"""Exception taxonomy.

Every error carries an ``exit_code`` so the command line front end can map
failure modes onto its fixed exit-code contract:

    0  success
    1  validation reject (model outside the proven-uniqueness regimes)
    2  malformed configuration
    3  closed-form regime not applicable
    4  numerical failure (blow-up, CFL explosion, policy divergence, ...)
"""


class NlaffineError(Exception):
    exit_code = 4


class ConfigError(NlaffineError):
    """Malformed or inconsistent user configuration."""

    exit_code = 2


class AdmissibilityError(NlaffineError):
    """Model rejected by the admissibility gate (no force flag given)."""

    exit_code = 1

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class RegimeError(NlaffineError):
    """A closed-form fast path was requested outside its proven regime."""

    exit_code = 3


class NumericalError(NlaffineError):
    exit_code = 4


class BlowUpError(NumericalError):
    """Riccati solution exceeded the blow-up cap before the horizon."""

    def __init__(self, t, cap):
        super().__init__(f"Riccati solution exceeded |psi| cap {cap:g} at t={t:.6g}")
        self.t = t
        self.cap = cap


class CflViolationError(NumericalError):
    """Explicit scheme would need an unreasonable number of time steps."""


class PolicyDivergenceError(NumericalError):
    """Policy iteration did not converge within the iteration cap."""


class OutOfGridError(NumericalError):
    """Queried point lies outside the solved surface."""
