"""Exception types shared across the solver stack."""

__all__ = [
    "ConfigError",
    "DegenerateInterval",
    "NoConvergence",
    "NonChaotic",
    "Overflow",
    "SingularMatrix",
]


class ConfigError(ValueError):
    """A solver or hierarchy configuration is inconsistent."""


class NoConvergence(RuntimeError):
    """An iterative inner solve (Newton) failed to reach its tolerance."""


class SingularMatrix(RuntimeError):
    """A linear system required by a tangent evaluation is numerically singular."""


class DegenerateInterval(ValueError):
    """A coarse interval carries no usable slope information."""


class NonChaotic(ValueError):
    """A computation requiring a positive leading Lyapunov exponent got λ ≤ 0."""


class Overflow(RuntimeError):
    """A propagated state exceeded the representable range."""
