"""Parallel-in-time multigrid (MGRIT) for ODE initial value problems.

Nonlinear FAS V-cycles over the time dimension, with optional
tangent-propagator corrections and theta-method coarse steppers that keep
the iteration convergent on chaotic problems, plus Lyapunov-exponent tooling
and a CLI for convergence studies on the Lorenz system.
"""

from .errors import (
    ConfigError,
    DegenerateInterval,
    NoConvergence,
    NonChaotic,
    Overflow,
    SingularMatrix,
)
from .lyapunov import (
    LyapunovConfig,
    condition_estimate,
    lyapunov_spectrum,
    lyapunov_time,
    precision_horizon,
)
from .odes import LogisticSystem, LorenzSystem, OdeSystem
from .solver import (
    LevelData,
    MgritConfig,
    MgritSolver,
    SolveReport,
    SolveStatus,
    TimeHierarchy,
    solve,
)
from .steppers import (
    BackwardEuler,
    ForwardEuler,
    Stepper,
    ThetaMethod,
    fine_scheme_stepper,
    theta_asymptotic,
    theta_exact_scalar,
)

__version__ = "0.1.0"

__all__ = [
    "BackwardEuler",
    "ConfigError",
    "DegenerateInterval",
    "ForwardEuler",
    "LevelData",
    "LogisticSystem",
    "LorenzSystem",
    "LyapunovConfig",
    "MgritConfig",
    "MgritSolver",
    "NoConvergence",
    "NonChaotic",
    "OdeSystem",
    "Overflow",
    "SingularMatrix",
    "SolveReport",
    "SolveStatus",
    "Stepper",
    "ThetaMethod",
    "TimeHierarchy",
    "condition_estimate",
    "fine_scheme_stepper",
    "lyapunov_spectrum",
    "lyapunov_time",
    "precision_horizon",
    "solve",
    "theta_asymptotic",
    "theta_exact_scalar",
]
