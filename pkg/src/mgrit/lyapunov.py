"""Lyapunov exponents of discrete one-step propagators.

The estimator is the classic tangent-frame recursion: push an orthonormal
frame through the exact step tangents of the chosen integrator and QR
re-orthonormalize periodically, accumulating the log of the diagonal growth
factors.  Because the tangents are those of the *discrete* map, the result
is the Lyapunov spectrum of the numerical method at that step size, which is
exactly what one wants when asking how an integrator distorts chaos.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NonChaotic, Overflow

__all__ = [
    "LyapunovConfig",
    "lyapunov_spectrum",
    "lyapunov_time",
    "condition_estimate",
    "precision_horizon",
]

OVERFLOW_LIMIT = 1e100


@dataclass
class LyapunovConfig:
    """Averaging windows, in time units, and the QR cadence, in steps."""

    spinup_time: float = 100.0
    run_time: float = 1000.0
    reorth_interval: int = 10

    def validate(self):
        if self.spinup_time < 0.0:
            raise ConfigError(f"spin-up time must be >= 0, got {self.spinup_time}")
        if not self.run_time > 0.0:
            raise ConfigError(f"run time must be positive, got {self.run_time}")
        if self.reorth_interval < 1:
            raise ConfigError(f"reorth interval must be >= 1, got {self.reorth_interval}")


def _check_state(u):
    if not np.isfinite(u).all() or np.abs(u).max() > OVERFLOW_LIMIT:
        raise Overflow(f"trajectory magnitude exceeded {OVERFLOW_LIMIT:g}")


def lyapunov_spectrum(system, stepper, h, config=None, u0=None):
    """All Lyapunov exponents of ``stepper`` applied to ``system`` at step ``h``.

    Spins up from ``u0`` (default: all ones) to land on the attractor, then
    accumulates tangent growth over ``run_time``, re-orthonormalizing every
    ``reorth_interval`` steps.  Exponents are per unit time, sorted
    descending.  Raises ``Overflow`` if the trajectory leaves the
    representable range (e.g. an explicit scheme pushed past its stability
    limit).

    ``u0`` may carry leading batch axes, shape ``(..., dim)``; each member
    is an independent trajectory and the result has shape ``(..., dim)``.
    Averaging the leading exponent over members shrinks the finite-window
    estimator noise without lengthening the run.
    """
    cfg = config if config is not None else LyapunovConfig()
    cfg.validate()
    if not h > 0.0:
        raise ConfigError(f"step size must be positive, got {h}")
    dim = system.dim
    u = np.ones(dim) if u0 is None else np.asarray(u0, dtype=float)
    if u.shape[-1:] != (dim,):
        raise ConfigError(f"u0 must have trailing dimension {dim}, got shape {u.shape}")

    n_spin = int(round(cfg.spinup_time / h))
    n_run = int(round(cfg.run_time / h))
    if n_run < 1:
        raise ConfigError("run time shorter than one step")

    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(n_spin):
            u = stepper.step(system, u, h)
        _check_state(u)

        Q = np.broadcast_to(np.eye(dim), u.shape + (dim,)).copy()
        logs = np.zeros(u.shape)
        done = 0
        while done < n_run:
            block = min(cfg.reorth_interval, n_run - done)
            for _ in range(block):
                u, T = stepper.step_with_tangent(system, u, h)
                Q = T @ Q
            done += block
            _check_state(u)
            if not np.isfinite(Q).all():
                raise Overflow("tangent frame left the representable range")
            Q, R = np.linalg.qr(Q)
            diag = np.diagonal(R, axis1=-2, axis2=-1)
            signs = np.where(diag < 0.0, -1.0, 1.0)
            Q = Q * signs[..., None, :]
            logs += np.log(np.abs(diag))

    return np.sort(logs / (n_run * h), axis=-1)[..., ::-1]


def lyapunov_time(lambda0):
    """Time for a perturbation to grow tenfold: ln(10) / lambda0."""
    if not lambda0 > 0.0:
        raise NonChaotic(f"leading exponent must be positive, got {lambda0}")
    return np.log(10.0) / lambda0


def condition_estimate(tf, lambda0):
    """Growth factor 10**(tf / T) of the time-block system, T the tenfold time.

    This is how strongly late-time states respond to early-time
    perturbations over a horizon ``tf``; it is what ultimately limits how
    small a residual any solver can reach in fixed precision.
    """
    if tf < 0.0:
        raise ConfigError(f"horizon must be >= 0, got {tf}")
    return 10.0 ** (tf / lyapunov_time(lambda0))


def precision_horizon(tol, eps=np.finfo(float).eps):
    """Largest horizon, in tenfold times, with conditioning below tol/eps.

    Beyond ``log10(tol / eps)`` tenfold times, machine-precision noise at
    early times alone can produce late-time response above ``tol``.
    """
    if not 0 < eps < tol:
        raise ConfigError("need 0 < eps < tol")
    return float(np.log10(tol / eps))
