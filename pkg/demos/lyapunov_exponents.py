"""Lyapunov spectrum of the Lorenz system and what it costs in precision.

Estimates all three exponents by QR-reorthogonalized tangent propagation,
checks the trace identity (the exponents must sum to the divergence of the
flow field, -(sigma + 1 + beta)), and translates the leading exponent into
the horizon beyond which double precision cannot follow a trajectory.  Run:

    python3 demos/lyapunov_exponents.py
"""

from mgrit import (
    ForwardEuler,
    LorenzSystem,
    LyapunovConfig,
    lyapunov_spectrum,
    lyapunov_time,
    precision_horizon,
)


def main():
    system = LorenzSystem()
    cfg = LyapunovConfig(spinup_time=20.0, run_time=200.0, reorth_interval=10)
    lams = lyapunov_spectrum(system, ForwardEuler(), 1e-3, cfg)
    print("exponents:", "  ".join(f"{x:+.4f}" for x in lams))
    trace = -(system.sigma + 1.0 + system.beta)
    print(f"sum {lams.sum():+.4f} vs flow divergence {trace:+.4f}")
    t10 = lyapunov_time(lams[0])
    print(f"time for a perturbation to grow tenfold: {t10:.3f}")
    units = precision_horizon(1e-10)
    print(f"horizon for 1e-10 accuracy from machine precision: "
          f"{units * t10:.2f} ({units:.2f} tenfold times)")


if __name__ == "__main__":
    main()
