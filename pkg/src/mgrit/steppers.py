"""One-step time integrators with exact step tangents.

A stepper advances states of shape ``(..., dim)`` over a fixed increment
``h`` and can also return the Jacobian of its own step map (the "tangent"),
shape ``(..., dim, dim)``.  Tangents are what coarse-grid corrections and
Lyapunov estimates propagate, so they are computed analytically, not by
differencing.

All steppers are stateless and deterministic.  The implicit solve in
``ThetaMethod`` freezes each batch entry the moment its own residual passes
tolerance, so results are bitwise independent of how states are batched.
"""

import numpy as np

from .errors import ConfigError, DegenerateInterval, NoConvergence, SingularMatrix

__all__ = [
    "Stepper",
    "ForwardEuler",
    "BackwardEuler",
    "ThetaMethod",
    "fine_scheme_stepper",
    "theta_asymptotic",
    "theta_exact_scalar",
    "FINE_SCHEMES",
]

FINE_SCHEMES = ("fe", "be")

# Condition-number ceiling above which a tangent linear solve is rejected.
COND_LIMIT = 1e14


def _add_identity(A):
    idx = np.arange(A.shape[-1])
    A[..., idx, idx] += 1.0
    return A


def _check_scheme(fine_scheme):
    if fine_scheme not in FINE_SCHEMES:
        raise ConfigError(f"unknown fine scheme {fine_scheme!r}; expected one of {FINE_SCHEMES}")


class Stepper:
    """One-step propagator over a fixed time increment."""

    def step(self, system, u, h):
        """Advance states ``u`` of shape ``(..., dim)`` by one step of size ``h``."""
        raise NotImplementedError

    def step_tangent(self, system, u, h):
        """Jacobian of the step map at ``u``, shape ``(..., dim, dim)``."""
        return self.step_with_tangent(system, u, h)[1]

    def step_with_tangent(self, system, u, h):
        """Advance ``u`` and return ``(next_state, tangent)`` sharing the work."""
        raise NotImplementedError


class ForwardEuler(Stepper):
    """Explicit Euler: w = u + h g(u), tangent I + h J(u)."""

    def step(self, system, u, h):
        u = np.asarray(u, dtype=float)
        return u + h * system.rhs(u)

    def step_with_tangent(self, system, u, h):
        u = np.asarray(u, dtype=float)
        w = u + h * system.rhs(u)
        T = _add_identity(h * system.rhs_jacobian(u))
        return w, T


class ThetaMethod(Stepper):
    """Weighted explicit/implicit one-step scheme.

    The update solves

        w = u + h [theta g(u) + (1 - theta) g(w)]

    by Newton iteration from a forward-Euler predictor, stopping each state
    when its residual 2-norm falls to ``newton_tol``.  ``theta = 1`` recovers
    forward Euler (handled explicitly), ``theta = 0`` backward Euler and
    ``theta = 1/2`` the trapezoid rule.  The tangent follows from the implicit
    function theorem,

        T = (I - h (1 - theta) J(w))^{-1} (I + h theta J(u)),

    evaluated with linear solves.

    Raises
    ------
    NoConvergence
        if any state is still above ``newton_tol`` after
        ``newton_max_iters`` Newton updates.
    SingularMatrix
        from ``step_with_tangent`` when the implicit-side matrix has an
        estimated condition number above ``1e14``.
    """

    def __init__(self, theta, newton_tol=1e-12, newton_max_iters=25):
        theta = float(theta)
        if not 0.0 <= theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {theta}")
        self.theta = theta
        self.newton_tol = float(newton_tol)
        self.newton_max_iters = int(newton_max_iters)

    def __repr__(self):
        return f"{type(self).__name__}(theta={self.theta})"

    def step(self, system, u, h):
        u = np.asarray(u, dtype=float)
        gu = system.rhs(u)
        if self.theta == 1.0:
            return u + h * gu
        w = u + h * gu
        base = u + (h * self.theta) * gu
        c = h * (1.0 - self.theta)
        d = system.dim
        flat_w = w.reshape(-1, d)
        flat_base = base.reshape(-1, d)
        active = np.arange(flat_w.shape[0])
        for it in range(self.newton_max_iters + 1):
            wa = flat_w[active]
            r = wa - flat_base[active] - c * system.rhs(wa)
            # ~(x <= tol) keeps NaN residuals active instead of freezing them.
            still = ~(np.linalg.norm(r, axis=-1) <= self.newton_tol)
            active = active[still]
            if active.size == 0:
                break
            if it == self.newton_max_iters:
                raise NoConvergence(
                    f"implicit step: {active.size} state(s) above tol "
                    f"{self.newton_tol:g} after {self.newton_max_iters} Newton iterations"
                )
            wa = flat_w[active]
            A = _add_identity((-c) * system.rhs_jacobian(wa))
            try:
                dw = np.linalg.solve(A, r[still][..., None])[..., 0]
            except np.linalg.LinAlgError as exc:
                raise NoConvergence(f"implicit step: singular Newton matrix ({exc})") from None
            flat_w[active] = wa - dw
        return w

    def step_with_tangent(self, system, u, h):
        u = np.asarray(u, dtype=float)
        w = self.step(system, u, h)
        B = _add_identity((h * self.theta) * system.rhs_jacobian(u))
        if self.theta == 1.0:
            return w, B
        A = _add_identity((-h * (1.0 - self.theta)) * system.rhs_jacobian(w))
        self._check_conditioning(A)
        try:
            T = np.linalg.solve(A, B)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrix(f"tangent solve: {exc}") from None
        return w, T

    def _check_conditioning(self, A):
        # Cheap screen: cond(I + E) <= (1 + |E|)/(1 - |E|), so only states with
        # a sizable implicit part need the real estimate.
        d = A.shape[-1]
        flat = A.reshape(-1, d, d)
        E = flat.copy()
        idx = np.arange(d)
        E[:, idx, idx] -= 1.0
        big = np.linalg.norm(E, axis=(-2, -1)) >= 0.5
        if not np.any(big):
            return
        with np.errstate(all="ignore"):
            cond = np.linalg.cond(flat[big])
        if np.any(~(cond <= COND_LIMIT)):
            raise SingularMatrix(
                f"implicit-side matrix condition estimate exceeds {COND_LIMIT:g}"
            )


class BackwardEuler(ThetaMethod):
    """Implicit Euler, the ``theta = 0`` case of :class:`ThetaMethod`."""

    def __init__(self, newton_tol=1e-12, newton_max_iters=25):
        super().__init__(0.0, newton_tol=newton_tol, newton_max_iters=newton_max_iters)


def fine_scheme_stepper(fine_scheme, newton_tol=1e-12, newton_max_iters=25):
    """Stepper instance for a fine-scheme label, ``"fe"`` or ``"be"``."""
    _check_scheme(fine_scheme)
    if fine_scheme == "fe":
        return ForwardEuler()
    return BackwardEuler(newton_tol=newton_tol, newton_max_iters=newton_max_iters)


def theta_asymptotic(m, fine_scheme="fe"):
    """Blending weight whose single coarse step mimics ``m`` fine steps as h -> 0.

    For a forward-Euler fine scheme the weight is ``(m + 1) / (2 m)``; for
    backward Euler it is ``(m - 1) / (2 m)``.  Both tend to the trapezoid
    value 1/2 as ``m`` grows, and ``m = 1`` returns the fine scheme itself.
    """
    m = int(m)
    if m < 1:
        raise ValueError(f"coarsening ratio must be a positive integer, got {m}")
    _check_scheme(fine_scheme)
    if fine_scheme == "fe":
        return (m + 1) / (2 * m)
    return (m - 1) / (2 * m)


def theta_exact_scalar(f_values):
    """Blending weight that reproduces a scalar fine trajectory exactly.

    Given right-hand-side samples ``f(u_0), ..., f(u_m)`` along ``m``
    forward-Euler fine steps, returns the theta for which one theta step of
    size ``m h`` lands exactly on ``u_m``.  Scalar problems only; exposed for
    validation rather than production use.

    Raises
    ------
    DegenerateInterval
        when ``|f(u_m) - f(u_0)|`` is negligible relative to the samples, so
        no finite theta exists.
    """
    f = np.asarray(f_values, dtype=float).ravel()
    if f.size < 2:
        raise ValueError("need at least two right-hand-side samples")
    spread = f[-1] - f[0]
    if abs(spread) <= 1e-14 * np.max(np.abs(f)):
        raise DegenerateInterval(
            "right-hand side returns to its starting value over the interval"
        )
    return (f[-1] - np.mean(f[:-1])) / spread
