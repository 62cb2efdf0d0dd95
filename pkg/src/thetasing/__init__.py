"""Singularities of theta divisors, tangency of translates, boundary systems and pencils of quadrics."""

__version__ = "0.1.0"

from .errors import SolverBudgetExceeded, ThetaSingError, ValidationError  # noqa: E402
from .theta import ThetaContext, make_context, reduce_point, tau_derivative, theta_deriv  # noqa: E402

__all__ = [
    "SolverBudgetExceeded",
    "ThetaContext",
    "ThetaSingError",
    "ValidationError",
    "make_context",
    "reduce_point",
    "tau_derivative",
    "theta_deriv",
]
