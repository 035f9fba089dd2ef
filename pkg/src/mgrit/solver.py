"""Multigrid reduction in time (MGRIT) for discrete initial value problems.

The object of interest is the block system behind one-step time marching,

    u_0 = f_0,    u_i = Phi(u_{i-1}) + f_i,   i = 1..n,

solved not by forward substitution but by a nonlinear FAS multigrid over the
time dimension: F-relaxation sweeps whole coarse intervals independently of
each other, a coarsened copy of the problem is solved with a cheaper
propagator, and a full-approximation (tau) correction makes the coarse
equations consistent with the fine ones at the current iterate.

Two optional upgrades to the coarse propagator are supported:

* ``use_theta`` replaces the rediscretized coarse scheme with a theta method
  whose weight is chosen so one coarse step mimics the accumulated truncation
  error of the fine steps it replaces (see ``steppers.theta_asymptotic``).
* ``use_delta`` augments the coarse propagator with a matrix correction,
  rebuilt every cycle from products of fine step tangents, so the coarse
  operator's linearization matches the fine multistep map.  With the base
  coarse propagator removed entirely this reduces to a global Newton
  iteration on the coarse-point system, hence the near-quadratic convergence
  it exhibits on chaotic problems.

Corrections assembled on one level are handed to the next as extra forcing
(``tau``, folded into the child's right-hand side) and per-point tangent
matrices (``delta``); each level rebuilds its own corrections every cycle,
nothing is restricted between cycles.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError, NoConvergence, Overflow, SingularMatrix
from .steppers import ThetaMethod, fine_scheme_stepper, theta_asymptotic, _check_scheme

__all__ = [
    "MgritConfig",
    "TimeHierarchy",
    "LevelData",
    "MgritSolver",
    "SolveReport",
    "SolveStatus",
    "solve",
]

# States whose magnitude passes this are treated as numerically divergent.
OVERFLOW_LIMIT = 1e100

_quiet = {"over": "ignore", "invalid": "ignore"}


@dataclass
class MgritConfig:
    """Solver controls.

    ``num_levels`` counts grids including the finest; ``coarsening_factor``
    points of one level map to a single point of the next.  ``fine_scheme``
    ("fe" or "be") fixes the level-0 integrator and, with ``use_theta``, the
    family of coarse theta weights.  Iteration stops at an absolute residual
    2-norm of ``tol`` or after ``max_iters`` V-cycles.
    """

    num_levels: int = 2
    coarsening_factor: int = 2
    use_delta: bool = False
    use_theta: bool = False
    fine_scheme: str = "fe"
    tol: float = 1e-10
    max_iters: int = 100
    halt_on_nan: bool = True

    def validate(self):
        if self.num_levels < 2:
            raise ConfigError(f"need at least two levels, got {self.num_levels}")
        if self.coarsening_factor < 2:
            raise ConfigError(f"coarsening factor must be >= 2, got {self.coarsening_factor}")
        if not self.tol > 0.0:
            raise ConfigError(f"tolerance must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        _check_scheme(self.fine_scheme)


@dataclass
class TimeHierarchy:
    """Uniform time grids for every level.

    Level ``l`` has ``nt / cf**l`` intervals of size ``h * cf**l``; ``nt``
    must therefore be divisible by ``cf**(num_levels - 1)``.
    """

    nt: int
    tf: float
    num_levels: int
    coarsening_factor: int
    h: float = field(init=False)

    def __post_init__(self):
        if self.nt < 1:
            raise ConfigError(f"need at least one time interval, got nt={self.nt}")
        if not self.tf > 0.0:
            raise ConfigError(f"final time must be positive, got {self.tf}")
        depth = self.coarsening_factor ** (self.num_levels - 1)
        if self.nt % depth != 0:
            raise ConfigError(
                f"nt={self.nt} is not divisible by "
                f"coarsening_factor**(num_levels-1)={depth}"
            )
        self.h = self.tf / self.nt

    def intervals(self, level):
        return self.nt // self.coarsening_factor**level

    def npoints(self, level):
        return self.intervals(level) + 1

    def step(self, level):
        return self.h * self.coarsening_factor**level


class LevelData:
    """Per-level state: solution, forcing, and incoming coarse corrections.

    ``tau`` and ``delta`` are indexed by the target point of a step (entry
    ``i`` modifies the step arriving at point ``i``; entry 0 is unused).  On
    the finest level, and whenever the delta correction is disabled, they
    stay identically zero.
    """

    def __init__(self, npoints, dim, h, stepper):
        self.h = h
        self.stepper = stepper
        self.v = np.zeros((npoints, dim))
        self.f = np.zeros((npoints, dim))
        self.tau = np.zeros((npoints, dim))
        self.delta = np.zeros((npoints, dim, dim))

    @property
    def npoints(self):
        return self.v.shape[0]


class SolveStatus(Enum):
    CONVERGED = "converged"
    STALLED = "stalled"
    MAX_ITERS = "max_iters"
    DIVERGED = "diverged"


@dataclass
class SolveReport:
    """Outcome of a solve: residual trace, iteration count and stop reason.

    ``error_history`` is only populated on request: one row per recorded
    iteration holding the 2-norm error at each fine-level coarse point
    against the sequential time-marching solution, with ``error_times``
    giving the corresponding time coordinates.
    """

    residual_history: np.ndarray
    iterations: int
    status: SolveStatus
    error_history: np.ndarray | None = None
    error_times: np.ndarray | None = None

    @property
    def converged(self):
        return self.status is SolveStatus.CONVERGED

    @property
    def final_residual(self):
        return float(self.residual_history[-1])


class MgritSolver:
    """FAS multigrid iteration over the time dimension of one IVP.

    Parameters
    ----------
    system : OdeSystem
        Right-hand side with analytic Jacobian.
    config : MgritConfig
    u0 : array_like, shape (dim,)
        Initial condition, stored as the forcing of point 0.
    tf : float
        Final time (the grid spans [0, tf]).
    nt : int
        Number of fine intervals.
    steppers : sequence of Stepper, optional
        Override the per-level propagators (entry 0 is the fine scheme).
        Used for experiments such as running with a zeroed coarse operator;
        defaults follow ``config``.
    """

    def __init__(self, system, config, u0, tf, nt, steppers=None):
        config.validate()
        self.system = system
        self.config = config
        self.hierarchy = TimeHierarchy(int(nt), float(tf), config.num_levels,
                                       config.coarsening_factor)
        u0 = np.asarray(u0, dtype=float).reshape(-1)
        if u0.shape != (system.dim,):
            raise ConfigError(f"u0 must have shape ({system.dim},), got {u0.shape}")
        self._u0 = u0

        if steppers is not None and len(steppers) != config.num_levels:
            raise ConfigError("steppers override must supply one stepper per level")
        self.levels = []
        for l in range(config.num_levels):
            stepper = steppers[l] if steppers is not None else self._default_stepper(l)
            self.levels.append(LevelData(self.hierarchy.npoints(l), system.dim,
                                         self.hierarchy.step(l), stepper))
        self.levels[0].f[0] = u0

    def _default_stepper(self, level):
        cfg = self.config
        if cfg.use_theta:
            th = theta_asymptotic(cfg.coarsening_factor**level, cfg.fine_scheme)
            if th == 1.0:
                return fine_scheme_stepper("fe")
            return ThetaMethod(th)
        return fine_scheme_stepper(cfg.fine_scheme)

    # -- elementary moves ---------------------------------------------------

    def _delta_active(self, level):
        return self.config.use_delta and level > 0

    def _check_state(self, w):
        if not self.config.halt_on_nan:
            return
        if not np.isfinite(w).all() or np.abs(w).max() > OVERFLOW_LIMIT:
            raise Overflow(f"state magnitude exceeded {OVERFLOW_LIMIT:g}")

    def _step_to(self, level, idx, w, with_tangent):
        """One step of level ``level`` arriving at point(s) ``idx``.

        Applies the level's stepper plus its incoming delta correction;
        forcing is NOT added here.  Returns ``(next_state, tangent_or_None)``.
        """
        data = self.levels[level]
        if with_tangent:
            w1, T = data.stepper.step_with_tangent(self.system, w, data.h)
        else:
            w1 = data.stepper.step(self.system, w, data.h)
            T = None
        if self._delta_active(level):
            D = data.delta[idx]
            w1 = w1 + np.einsum("...ij,...j->...i", D, w)
            if with_tangent:
                T = T + D
        return w1, T

    def _propagate_intervals(self, level, starts, values, with_tangent=True):
        """Advance ``values`` across whole coarse intervals of ``level``.

        Equivalent to ``coarsening_factor`` applications of the level's own
        (corrected) propagator, injecting the level's forcing at interior
        points only; the product of the per-step tangents comes along for
        free when requested.
        """
        data = self.levels[level]
        m = self.config.coarsening_factor
        g = data.f + data.tau
        w = np.array(values, dtype=float)
        W = None
        if with_tangent:
            W = np.broadcast_to(np.eye(self.system.dim), w.shape + (self.system.dim,)).copy()
        with np.errstate(**_quiet):
            for s in range(1, m + 1):
                idx = starts + s
                w, T = self._step_to(level, idx, w, with_tangent)
                if with_tangent:
                    W = T @ W
                if s < m:
                    w = w + g[idx]
                self._check_state(w)
        return w, W

    def ideal_coarse_step(self, level, start, value):
        """Value and tangent of the multistep map across one coarse interval.

        ``start`` must be a coarse-point index of ``level`` with a full
        interval ahead of it.  This is the map the next level's propagator
        (plus corrections) is asked to imitate.
        """
        m = self.config.coarsening_factor
        n = self.hierarchy.intervals(level)
        if start % m != 0 or not 0 <= start <= n - m:
            raise ConfigError(f"index {start} does not start a coarse interval")
        w, W = self._propagate_intervals(level, np.array([start]),
                                         np.asarray(value, dtype=float)[None, :])
        return w[0], W[0]

    # -- multigrid components ----------------------------------------------

    def assemble_corrections(self, level, chunk_size=None):
        """Corrections that make the next level consistent with this one.

        For each coarse interval, propagates the current iterate across the
        interval with the level's own operator and compares value and
        tangent against one step of the next level's propagator at the same
        starting state.  Returns ``(tau, delta)`` indexed by coarse points
        (row 0 zero).  ``chunk_size`` bounds how many intervals are
        processed per batch; the result is bitwise independent of it.
        """
        data = self.levels[level]
        child = self.levels[level + 1]
        m = self.config.coarsening_factor
        n_child = child.npoints - 1
        dim = self.system.dim
        tau = np.zeros((n_child + 1, dim))
        delta = np.zeros((n_child + 1, dim, dim))
        starts_all = np.arange(n_child) * m
        chunk = n_child if chunk_size is None else int(chunk_size)
        with np.errstate(**_quiet):
            for lo in range(0, n_child, chunk):
                starts = starts_all[lo:lo + chunk]
                vals = data.v[starts]
                P, W = self._propagate_intervals(level, starts, vals)
                wc, Tc = child.stepper.step_with_tangent(self.system, vals, child.h)
                if self.config.use_delta:
                    D = W - Tc
                    delta[lo + 1:lo + 1 + len(starts)] = D
                    wc = wc + np.einsum("...ij,...j->...i", D, vals)
                tau[lo + 1:lo + 1 + len(starts)] = P - wc
        return tau, delta

    def f_relax(self, level, chunk_size=None):
        """Overwrite every fine point of ``level`` from its preceding coarse point.

        Within each coarse interval this is forward substitution with the
        level's (corrected) propagator and forcing; intervals do not couple,
        so they are processed as one batch (or ``chunk_size`` at a time,
        bitwise equivalently).  Coarse-point values are untouched.
        """
        m = self.config.coarsening_factor
        if m == 1:
            return
        data = self.levels[level]
        n = data.npoints - 1
        g = data.f + data.tau
        starts_all = np.arange(n // m) * m
        chunk = len(starts_all) if chunk_size is None else int(chunk_size)
        with np.errstate(**_quiet):
            for lo in range(0, len(starts_all), chunk):
                starts = starts_all[lo:lo + chunk]
                w = data.v[starts].copy()
                for s in range(1, m):
                    idx = starts + s
                    w, _ = self._step_to(level, idx, w, with_tangent=False)
                    w = w + g[idx]
                    self._check_state(w)
                    data.v[idx] = w

    def _solve_coarsest(self):
        """Sequential forward substitution on the coarsest level."""
        data = self.levels[-1]
        level = len(self.levels) - 1
        g = data.f + data.tau
        data.v[0] = data.f[0]
        w = data.v[0]
        with np.errstate(**_quiet):
            for j in range(1, data.npoints):
                w, _ = self._step_to(level, j, w, with_tangent=False)
                w = w + g[j]
                self._check_state(w)
                data.v[j] = w

    def v_cycle(self):
        """One V-cycle from the finest level."""
        self._cycle(0)

    def _cycle(self, level):
        cf = self.config.coarsening_factor
        parent = self.levels[level]
        child = self.levels[level + 1]
        tau, delta = self.assemble_corrections(level)
        child.v[:] = parent.v[::cf]
        child.f[:] = parent.f[::cf] + parent.tau[::cf]
        child.tau[:] = tau
        child.delta[:] = delta
        if level + 2 == len(self.levels):
            self._solve_coarsest()
        else:
            self._cycle(level + 1)
        parent.v[::cf] = child.v
        self.f_relax(level)

    # -- residual and driver -------------------------------------------------

    @property
    def v(self):
        """Fine-level iterate, shape (nt + 1, dim)."""
        return self.levels[0].v

    def residual(self):
        """Pointwise residual f - A(v) on the fine level."""
        data = self.levels[0]
        r = np.empty_like(data.v)
        with np.errstate(**_quiet):
            w, _ = self._step_to(0, np.arange(1, data.npoints), data.v[:-1], False)
            r[0] = data.f[0] - data.v[0]
            r[1:] = data.f[1:] + w - data.v[1:]
        return r

    def residual_norm(self):
        """Euclidean norm of the residual over all fine points and components."""
        r = self.residual()
        with np.errstate(**_quiet):
            return float(np.sqrt(np.sum(r * r)))

    def initialize(self):
        """Replicate the initial condition everywhere, then one F-relaxation."""
        self.levels[0].v[:] = self._u0
        self.f_relax(0)

    def sequential_solution(self):
        """Reference solution by plain fine-level time marching."""
        data = self.levels[0]
        v = np.empty_like(data.v)
        v[0] = data.f[0]
        w = v[0]
        with np.errstate(**_quiet):
            for i in range(1, data.npoints):
                w = data.stepper.step(self.system, w, data.h) + data.f[i]
                v[i] = w
        return v

    def solve(self, record_errors=False, detect_stall=True):
        """Iterate V-cycles to tolerance and report.

        Residual-norm history starts with the initialized iterate and gains
        one entry per cycle.  Stalling means five consecutive cycles each
        reducing the residual by less than 1%; overflow, NaN, or an inner
        solve failure mark the run as diverged.  With ``record_errors`` the
        report carries per-iteration coarse-point errors against the
        sequential solution (useful for studying error transport, at the
        price of one extra sequential solve).
        """
        cfg = self.config
        self.initialize()

        reference = cpoints = None
        error_rows = []
        if record_errors:
            reference = self.sequential_solution()
            cpoints = np.arange(0, self.hierarchy.nt + 1, cfg.coarsening_factor)

        def snapshot_error():
            diff = self.v[cpoints] - reference[cpoints]
            error_rows.append(np.linalg.norm(diff, axis=-1))

        res = self.residual_norm()
        history = [res]
        if record_errors:
            snapshot_error()
        status = None
        stall_run = 0

        if res <= cfg.tol and np.isfinite(res):
            status = SolveStatus.CONVERGED
        else:
            while status is None:
                try:
                    self.v_cycle()
                    new_res = self.residual_norm()
                except (Overflow, NoConvergence, SingularMatrix):
                    status = SolveStatus.DIVERGED
                    break
                if not np.isfinite(new_res) or new_res > OVERFLOW_LIMIT:
                    status = SolveStatus.DIVERGED
                    break
                history.append(new_res)
                if record_errors:
                    snapshot_error()
                stall_run = stall_run + 1 if new_res > 0.99 * res else 0
                res = new_res
                if res <= cfg.tol:
                    status = SolveStatus.CONVERGED
                elif detect_stall and stall_run >= 5:
                    status = SolveStatus.STALLED
                elif len(history) - 1 >= cfg.max_iters:
                    status = SolveStatus.MAX_ITERS

        report = SolveReport(
            residual_history=np.array(history),
            iterations=len(history) - 1,
            status=status,
            error_history=np.array(error_rows) if record_errors else None,
            error_times=cpoints * self.hierarchy.h if record_errors else None,
        )
        return self.v.copy(), report


def solve(system, config, u0, tf, nt, steppers=None, record_errors=False,
          detect_stall=True):
    """Build an :class:`MgritSolver` and run it; returns ``(v, report)``."""
    solver = MgritSolver(system, config, u0, tf, nt, steppers=steppers)
    return solver.solve(record_errors=record_errors, detect_stall=detect_stall)
