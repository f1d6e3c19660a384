"""Long-memory analysis of scalar linear stochastic Volterra equations.

Deterministic resolvents, stationary autocovariances, their asymptotic
constants, and Monte Carlo checks for

    dX(t) = (a X(t) + int_0^t k(t - s) X(s) ds) dt + sigma dB(t)

and its difference-equation analogue.
"""

from importlib import resources

from .exceptions import ConfigError, DomainError, RegimeError, VolterraError
from .kernels import (Custom, KernelSpec, PowerLaw, PowerTail, Regime, Tabulated, TimeMode,
                      classify_regime, eval_kernel, first_moment, tail_integral, total_mass)
from .resolvent import (Grid, ResolventGrid, Scheme, solve_resolvent_discrete, solve_resolvent_ode,
                        solve_resolvent_renewal)
from .autocovariance import CovarianceSeries, autocov_continuous, autocov_discrete

__version__ = "0.1.0"


def reference_config(name: str) -> str:
    """Path of a bundled reference configuration, e.g. ``"critical_alpha03.ini"``."""
    return str(resources.files(__name__).joinpath("configs", name))


__all__ = [
    "VolterraError", "DomainError", "RegimeError", "ConfigError",
    "KernelSpec", "PowerLaw", "PowerTail", "Tabulated", "Custom", "TimeMode", "Regime",
    "classify_regime", "eval_kernel", "tail_integral", "total_mass", "first_moment",
    "Grid", "ResolventGrid", "Scheme", "solve_resolvent_renewal", "solve_resolvent_ode",
    "solve_resolvent_discrete", "CovarianceSeries", "autocov_continuous", "autocov_discrete",
    "reference_config",
]
