"""Shared test fixtures: tiny ODE systems, finite differences, oracles."""

import numpy as np

from mgrit import ForwardEuler, LorenzSystem


class LinearSystem:
    """du/dt = A u; the one case where every tangent is exact by inspection."""

    def __init__(self, matrix):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        self.dim = self.matrix.shape[0]

    def rhs(self, u):
        u = np.asarray(u, dtype=float)
        return u @ self.matrix.T

    def rhs_jacobian(self, u):
        u = np.asarray(u, dtype=float)
        return np.broadcast_to(self.matrix, u.shape[:-1] + self.matrix.shape).copy()


class ScalarDecay(LinearSystem):
    """u' = a u with a < 0; forward Euler multiplies by (1 + h a) per step."""

    def __init__(self, a=-1.0):
        super().__init__([[a]])


class ZeroStepper:
    """Propagator that forgets its input: value and tangent are both zero."""

    def step(self, system, u, h):
        return np.zeros_like(np.asarray(u, dtype=float))

    def step_with_tangent(self, system, u, h):
        u = np.asarray(u, dtype=float)
        return np.zeros_like(u), np.zeros(u.shape + (u.shape[-1],))


def fd_tangent(fn, u, eps=1e-6):
    """Central-difference Jacobian of a map R^d -> R^d at ``u``."""
    u = np.asarray(u, dtype=float)
    d = u.shape[-1]
    cols = []
    for j in range(d):
        e = np.zeros(d)
        e[j] = eps
        cols.append((fn(u + e) - fn(u - e)) / (2.0 * eps))
    return np.stack(cols, axis=-1)


def march(system, stepper, u0, h, n, forcing=None):
    """Sequential time-marching oracle: u_i = step(u_{i-1}) + forcing_i."""
    u = np.asarray(u0, dtype=float)
    out = np.empty((n + 1,) + u.shape)
    out[0] = u
    for i in range(1, n + 1):
        u = stepper.step(system, u, h)
        if forcing is not None:
            u = u + forcing[i]
        out[i] = u
    return out


def attractor_members(h, count, gap=1.0, spinup=20.0, system=None):
    """Sample ``count`` decorrelated states along one settled trajectory.

    Used to seed trajectory ensembles: averaging Lyapunov estimates over
    members shrinks the finite-window noise without longer runs.
    """
    sys_ = system if system is not None else LorenzSystem()
    fe = ForwardEuler()
    u = np.ones(sys_.dim)
    for _ in range(int(round(spinup / h))):
        u = fe.step(sys_, u, h)
    out = np.empty((count, sys_.dim))
    per = int(round(gap / h))
    for k in range(count):
        for _ in range(per):
            u = fe.step(sys_, u, h)
        out[k] = u
    return out
