"""Choosing the implicit/explicit blend so one coarse step matches m fine ones.

For scalar dynamics an exact blend weight exists in closed form; for systems
the asymptotic weight (m + 1) / (2m) recovers the accumulated truncation
error of m forward-Euler steps to leading order.  This script shows both:
exactness on the logistic equation, then coarse-step error on Lorenz for the
asymptotic weight vs a plain coarse Euler step.  Run:

    python3 demos/theta_coarsening.py
"""

import numpy as np

from mgrit import (
    ForwardEuler,
    LogisticSystem,
    LorenzSystem,
    ThetaMethod,
    theta_asymptotic,
    theta_exact_scalar,
)


def main():
    # scalar case: the fitted weight reproduces the multistep result exactly
    logistic = LogisticSystem()
    fe = ForwardEuler()
    u = np.array([0.2])
    h, m = 0.04, 4
    traj = [u]
    for _ in range(m):
        traj.append(fe.step(logistic, traj[-1], h))
    f_vals = np.array([float(logistic.rhs(v)[0]) for v in traj])
    theta = theta_exact_scalar(f_vals)
    fitted = ThetaMethod(theta).step(logistic, u, m * h)
    print(f"logistic, m = {m}: fitted weight {theta:.6f}")
    print(f"  multistep result {traj[-1][0]:.15f}")
    print(f"  one blended step {fitted[0]:.15f}  "
          f"(gap {abs(fitted[0] - traj[-1][0]):.1e})")
    print()

    # Lorenz: the asymptotic weight beats a plain coarse Euler step
    lorenz = LorenzSystem()
    u = np.array([1.0, 1.0, 1.0])
    h = 1e-3
    print("coarse-step error against m fine forward-Euler steps (Lorenz):")
    print(f"{'m':>4}{'plain Euler':>16}{'blended':>16}{'weight':>10}")
    for m in (2, 4, 8):
        w = u.copy()
        for _ in range(m):
            w = fe.step(lorenz, w, h)
        plain = fe.step(lorenz, u, m * h)
        th = theta_asymptotic(m, "fe")
        blended = ThetaMethod(th).step(lorenz, u, m * h)
        print(f"{m:>4}{np.abs(plain - w).max():>16.3e}"
              f"{np.abs(blended - w).max():>16.3e}{th:>10.4f}")


if __name__ == "__main__":
    main()
