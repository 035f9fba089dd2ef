"""Autonomous ODE systems with analytic Jacobians.

Right-hand sides are vectorized over leading batch dimensions: ``rhs`` maps
``(..., dim) -> (..., dim)`` and ``rhs_jacobian`` maps ``(..., dim) ->
(..., dim, dim)``.  Both are pure functions of the state.
"""

import numpy as np

__all__ = ["OdeSystem", "LorenzSystem", "LogisticSystem"]


class OdeSystem:
    """Base class for an autonomous system u'(t) = g(u(t))."""

    dim: int = 0

    def rhs(self, u):
        raise NotImplementedError

    def rhs_jacobian(self, u):
        raise NotImplementedError


class LorenzSystem(OdeSystem):
    """The Lorenz equations, chaotic at the classical parameter values.

        x' = sigma (y - x)
        y' = x (rho - z) - y
        z' = x y - beta z
    """

    dim = 3

    def __init__(self, sigma=10.0, rho=28.0, beta=8.0 / 3.0):
        self.sigma = float(sigma)
        self.rho = float(rho)
        self.beta = float(beta)

    def rhs(self, u):
        u = np.asarray(u, dtype=float)
        x, y, z = u[..., 0], u[..., 1], u[..., 2]
        out = np.empty_like(u)
        out[..., 0] = self.sigma * (y - x)
        out[..., 1] = x * (self.rho - z) - y
        out[..., 2] = x * y - self.beta * z
        return out

    def rhs_jacobian(self, u):
        u = np.asarray(u, dtype=float)
        x, y, z = u[..., 0], u[..., 1], u[..., 2]
        J = np.zeros(u.shape[:-1] + (3, 3))
        J[..., 0, 0] = -self.sigma
        J[..., 0, 1] = self.sigma
        J[..., 1, 0] = self.rho - z
        J[..., 1, 1] = -1.0
        J[..., 1, 2] = -x
        J[..., 2, 0] = y
        J[..., 2, 1] = x
        J[..., 2, 2] = -self.beta
        return J

    def equilibria(self):
        """The three fixed points: origin and the two attractor centers."""
        r = np.sqrt(self.beta * (self.rho - 1.0))
        return np.array([
            [0.0, 0.0, 0.0],
            [r, r, self.rho - 1.0],
            [-r, -r, self.rho - 1.0],
        ])


class LogisticSystem(OdeSystem):
    """Scalar logistic growth u' = u (1 - u); handy for exactness checks."""

    dim = 1

    def rhs(self, u):
        u = np.asarray(u, dtype=float)
        return u * (1.0 - u)

    def rhs_jacobian(self, u):
        u = np.asarray(u, dtype=float)
        return (1.0 - 2.0 * u)[..., None]
