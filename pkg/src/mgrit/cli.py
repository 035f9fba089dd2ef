"""Command-line driver for convergence studies on the Lorenz system.

Horizons are given in tenfold-growth times of the nominal Lorenz attractor
(leading exponent 0.9), so ``--tf 8`` means "long enough for perturbations
to grow by 10^8".  Subcommands either run a single solve, sweep the standard
iteration-count tables, or emit the data behind the error-transport and
step-size studies.  Every run writes a CSV that re-parses exactly and is
byte-identical across reruns.

Exit codes: 0 converged / completed, 1 bad configuration, 2 not converged,
3 diverged.
"""

import argparse
import csv
import sys

import numpy as np

from .errors import ConfigError, NonChaotic, Overflow
from .lyapunov import LyapunovConfig, lyapunov_spectrum, precision_horizon
from .odes import LorenzSystem
from .solver import MgritConfig, MgritSolver, SolveStatus
from .steppers import ThetaMethod, fine_scheme_stepper

__all__ = ["main"]

# Nominal leading exponent of the classical Lorenz attractor and the
# corresponding tenfold-growth time used to convert --tf into plain time.
LAMBDA0_NOMINAL = 0.9
TENFOLD_TIME = float(np.log(10.0) / LAMBDA0_NOMINAL)

DEFAULT_H_VALUES = "2e-4,5e-4,1e-3,2e-3,4e-3"

_EXIT_BY_STATUS = {
    SolveStatus.CONVERGED: 0,
    SolveStatus.STALLED: 2,
    SolveStatus.MAX_ITERS: 2,
    SolveStatus.DIVERGED: 3,
}


class _Parser(argparse.ArgumentParser):
    # Bad flags are configuration errors: exit 1, not argparse's default 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x):
    return repr(float(x))


def _write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerows(rows)


def _parse_u0(text):
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise ConfigError(f"could not parse --u0 {text!r}") from None
    if len(parts) != 3:
        raise ConfigError(f"--u0 needs three components, got {len(parts)}")
    return np.array(parts)


def _build_system(args):
    if args.system != "lorenz":
        raise ConfigError(f"unknown system {args.system!r}")
    return LorenzSystem(sigma=args.sigma, rho=args.rho, beta=args.beta)


def _mgrit_config(args, num_levels=None, use_delta=None, use_theta=None,
                  max_iters=None):
    return MgritConfig(
        num_levels=num_levels if num_levels is not None else args.levels,
        coarsening_factor=args.cf,
        use_delta=use_delta if use_delta is not None else args.delta,
        use_theta=use_theta if use_theta is not None else args.theta,
        fine_scheme=args.fine_scheme,
        tol=args.tol,
        max_iters=max_iters if max_iters is not None else args.max_iters,
    )


def _run(args, config, tf_units, nt, record_errors=False, detect_stall=True):
    system = _build_system(args)
    solver = MgritSolver(system, config, _parse_u0(args.u0),
                         tf_units * TENFOLD_TIME, nt)
    return solver.solve(record_errors=record_errors, detect_stall=detect_stall)


# -- subcommands -------------------------------------------------------------


def run_solve(args):
    config = _mgrit_config(args)
    _, report = _run(args, config, args.tf, args.nt)
    if args.out:
        rows = [["iteration", "residual"]]
        rows += [[i, _fmt(r)] for i, r in enumerate(report.residual_history)]
        _write_csv(args.out, rows)
    horizon = precision_horizon(args.tol)
    print(f"status: {report.status.value}")
    print(f"iterations: {report.iterations}")
    print(f"final residual: {report.final_residual:.3e}")
    print(f"horizon: {args.tf:g} tenfold times requested, "
          f"{horizon:.2f} supportable at tol {args.tol:g} in double precision")
    return _EXIT_BY_STATUS[report.status]


def _sweep_cell(args, tf_units, nt, levels, use_delta, use_theta):
    config = _mgrit_config(args, num_levels=levels, use_delta=use_delta,
                           use_theta=use_theta)
    try:
        _, report = _run(args, config, tf_units, nt)
    except ConfigError:
        return "x"  # cell not runnable under these flags; sweep continues
    if report.status is SolveStatus.CONVERGED:
        return str(report.iterations)
    if report.status is SolveStatus.DIVERGED:
        return "*"
    return "-"


def run_table(args, columns, variants):
    """Iteration-count sweep; cells are counts, '-' (no convergence) or '*'
    (divergence).  Failed cells never abort the sweep."""
    header = ["algorithm"] + [f"{tf:g}, {nt}" for tf, nt in columns]
    rows = [header]
    for label, levels, use_delta, use_theta in variants:
        row = [label]
        for tf_units, nt in columns:
            row.append(_sweep_cell(args, tf_units, nt, levels, use_delta, use_theta))
        rows.append(row)
    _write_csv(args.out, rows)
    widths = [max(len(str(r[j])) for r in rows) for j in range(len(header))]
    for r in rows:
        print("  ".join(str(c).rjust(w) for c, w in zip(r, widths)))
    return 0


def _variant_label(levels, use_delta, use_theta):
    label = f"MGRIT{levels}"
    if use_delta:
        label += ", delta"
    if use_theta:
        label += ", theta"
    return label


def _two_grid_variants():
    return [(_variant_label(2, d, t), 2, d, t)
            for d, t in [(False, False), (False, True), (True, False), (True, True)]]


def run_table1(args):
    columns = [(4, nt) for nt in (512, 1024, 2048, 4096, 8192)]
    return run_table(args, columns, _two_grid_variants())


def run_table2(args):
    columns = [(tf, 2048 * tf) for tf in (2, 4, 6, 8, 10, 12)]
    return run_table(args, columns, _two_grid_variants())


def run_table3(args):
    columns = [(tf, 2048 * tf) for tf in (2, 4, 6, 8)]
    variants = [(_variant_label(lv, d, t), lv, d, t)
                for d, t in [(False, False), (False, True), (True, False), (True, True)]
                for lv in (2, 3, 5, 7)]
    return run_table(args, columns, variants)


def run_fig1(args):
    """Per-iteration error transport of the plain two-grid iteration."""
    config = _mgrit_config(args, num_levels=2, use_delta=False, use_theta=False,
                           max_iters=args.iters)
    _, report = _run(args, config, args.tf, args.nt, record_errors=True,
                     detect_stall=False)
    rows = [["iteration", "t", "error"]]
    for k, errs in enumerate(report.error_history):
        rows += [[k, _fmt(t), _fmt(e)] for t, e in zip(report.error_times, errs)]
    _write_csv(args.out, rows)
    print(f"status: {report.status.value} after {report.iterations} iterations")
    return _EXIT_BY_STATUS[report.status]


def run_fig3(args):
    """Residual histories of all four two-grid algorithms on one domain."""
    rows = [["algorithm", "iteration", "residual"]]
    for label, levels, use_delta, use_theta in _two_grid_variants():
        config = _mgrit_config(args, num_levels=levels, use_delta=use_delta,
                               use_theta=use_theta)
        _, report = _run(args, config, args.tf, args.nt, detect_stall=False)
        rows += [[label, i, _fmt(r)]
                 for i, r in enumerate(report.residual_history)]
        print(f"{label}: {report.status.value} after {report.iterations} iterations")
    _write_csv(args.out, rows)
    return 0


def run_lyapunov_sweep(args):
    """Leading exponent of each integrator across step sizes.

    Theta rows use the asymptotic weight for the coarsening ratio each step
    size represents relative to the smallest one in the sweep.
    """
    try:
        h_values = [float(p) for p in args.h_values.split(",")]
    except ValueError:
        raise ConfigError(f"could not parse --h-values {args.h_values!r}") from None
    if not h_values or any(h <= 0 for h in h_values):
        raise ConfigError("--h-values must be positive floats")
    system = _build_system(args)
    cfg = LyapunovConfig(spinup_time=args.spinup, run_time=args.run_time,
                         reorth_interval=args.reorth)
    h_ref = min(h_values)

    def steppers_for(h):
        ratio = h / h_ref
        return [
            ("fe", fine_scheme_stepper("fe")),
            ("be", fine_scheme_stepper("be")),
            ("theta-fe", ThetaMethod((ratio + 1.0) / (2.0 * ratio))),
            ("theta-be", ThetaMethod((ratio - 1.0) / (2.0 * ratio))),
        ]

    rows = [["scheme", "h", "lambda0"]]
    for h in h_values:
        for name, stepper in steppers_for(h):
            try:
                lam = lyapunov_spectrum(system, stepper, h, cfg)
                cell = _fmt(lam[0])
            except (Overflow, NonChaotic):
                cell = ""
            rows.append([name, _fmt(h), cell])
            print(f"{name:10s} h={h:g}: {cell or 'overflow'}")
    _write_csv(args.out, rows)
    return 0


# -- argument wiring ---------------------------------------------------------


def _add_system_args(p):
    p.add_argument("--system", default="lorenz", help="ODE system (only 'lorenz')")
    p.add_argument("--sigma", type=float, default=10.0)
    p.add_argument("--rho", type=float, default=28.0)
    p.add_argument("--beta", type=float, default=8.0 / 3.0)
    p.add_argument("--u0", default="1,1,1", help="initial state 'x,y,z'")


def _add_solver_args(p, with_variant=True):
    p.add_argument("--cf", type=int, default=2, help="temporal coarsening factor")
    p.add_argument("--fine-scheme", choices=["fe", "be"], default="fe")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iters", type=int, default=100)
    if with_variant:
        p.add_argument("--levels", type=int, default=2, help="number of grid levels")
        p.add_argument("--theta", action="store_true",
                       help="theta-method coarse propagators")
        p.add_argument("--delta", action="store_true",
                       help="tangent correction of the coarse propagators")


def build_parser():
    parser = _Parser(prog="mgrit",
                     description="Time-multigrid convergence studies on the Lorenz system")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one configuration")
    _add_system_args(p)
    _add_solver_args(p)
    p.add_argument("--tf", type=float, default=4.0, help="horizon in tenfold times")
    p.add_argument("--nt", type=int, default=8192, help="number of fine time steps")
    p.add_argument("--out", default="", help="residual-history CSV (optional)")
    p.set_defaults(func=run_solve)

    for name, runner, helptext in [
        ("table1", run_table1, "two-grid iteration counts, fixed horizon, refined grids"),
        ("table2", run_table2, "two-grid iteration counts across growing horizons"),
        ("table3", run_table3, "multilevel iteration counts across growing horizons"),
    ]:
        p = sub.add_parser(name, help=helptext)
        _add_system_args(p)
        _add_solver_args(p, with_variant=False)
        p.add_argument("--out", default=f"{name}.csv")
        p.set_defaults(func=runner)

    p = sub.add_parser("fig1", help="per-iteration error over the time domain")
    _add_system_args(p)
    _add_solver_args(p, with_variant=False)
    p.add_argument("--tf", type=float, default=8.0)
    p.add_argument("--nt", type=int, default=8192)
    p.add_argument("--iters", type=int, default=30, help="fixed iteration budget")
    p.add_argument("--out", default="fig1.csv")
    p.set_defaults(func=run_fig1)

    p = sub.add_parser("fig3", help="residual histories of the four two-grid variants")
    _add_system_args(p)
    _add_solver_args(p, with_variant=False)
    p.add_argument("--tf", type=float, default=8.0)
    p.add_argument("--nt", type=int, default=8192)
    p.add_argument("--out", default="fig3.csv")
    p.set_defaults(func=run_fig3)

    p = sub.add_parser("lyapunov-sweep",
                       help="leading exponent of each integrator across step sizes")
    _add_system_args(p)
    p.add_argument("--h-values", default=DEFAULT_H_VALUES)
    p.add_argument("--spinup", type=float, default=10.0)
    p.add_argument("--run-time", type=float, default=50.0)
    p.add_argument("--reorth", type=int, default=10)
    p.add_argument("--out", default="lyapunov_sweep.csv")
    p.set_defaults(func=run_lyapunov_sweep)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
