"""Acceptance gate: the headline behaviors, one test per numbered criterion.

Each test prints exactly one ``[PASS]``/``[FAIL]`` line (visible with ``-s``
or in captured output) and asserts it.  Reference iteration counts and
tolerances are frozen; runs are deterministic, so these are regression
pins as much as behavioral checks.
"""

import time

import numpy as np

from mgrit import (
    ForwardEuler,
    BackwardEuler,
    LorenzSystem,
    LyapunovConfig,
    MgritConfig,
    SolveStatus,
    ThetaMethod,
    lyapunov_spectrum,
    solve,
    theta_asymptotic,
    theta_exact_scalar,
)
from mgrit import LogisticSystem, cli
from mgrit.solver import MgritSolver

from helpers import ZeroStepper, attractor_members, fd_tangent, march

TL = np.log(10.0) / 0.9
U0 = np.array([1.0, 1.0, 1.0])


def _check(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    print(line)
    assert ok, line


def _count(tf_units, nt, levels=2, delta=False, theta=False, **kw):
    cfg = MgritConfig(num_levels=levels, use_delta=delta, use_theta=theta)
    _, rep = solve(LorenzSystem(), cfg, U0, tf_units * TL, nt, **kw)
    return rep


def test_c01_corrected_two_grid_counts_at_constant_step():
    # reference counts 3,4,4,5,5 within +-2; the deepest horizon sits at the
    # double-precision conditioning limit, reference 48 within +-50%
    cells = [(2, 4096), (4, 8192), (6, 12288), (8, 16384), (10, 20480)]
    expect = [3, 4, 4, 5, 5]
    got = []
    for (tf, nt) in cells:
        rep = _count(tf, nt, delta=True, theta=True)
        got.append(rep.iterations if rep.converged else None)
    ok_main = all(g is not None and abs(g - e) <= 2 for g, e in zip(got, expect))
    rep12 = _count(12, 24576, delta=True, theta=True)
    got12 = rep12.iterations if rep12.converged else None
    ok_tail = got12 is not None and 24 <= got12 <= 72
    _check(
        "criterion 1 (corrected two-grid counts, constant step)",
        ok_main and ok_tail,
        f"counts {got} vs {expect} +-2; horizon cell {got12} vs 48 +-50%",
    )


def test_c02_plain_two_grid_degrades_with_horizon():
    got = [(_count(tf, nt).iterations) for tf, nt in
           [(2, 4096), (4, 8192), (6, 12288)]]
    expect = [10, 13, 17]
    ok_short = all(abs(g - e) <= 0.25 * e for g, e in zip(got, expect))
    floors = []
    for tf, nt in [(10, 20480), (12, 24576)]:
        rep = _count(tf, nt, detect_stall=False)
        floors.append(min(rep.residual_history))
    ok_long = all(f > 1e-10 for f in floors)
    _check(
        "criterion 2 (plain two-grid horizon degradation)",
        ok_short and ok_long,
        f"counts {got} vs {expect} +-25%; deep-horizon residual floors "
        f"{[f'{f:.1e}' for f in floors]} never reach 1e-10 in 100 iterations",
    )


def test_c03_multilevel_needs_both_corrections():
    cells = [(2, 4096), (4, 8192), (6, 12288), (8, 16384)]
    expect = [9, 15, 20, 23]
    got = []
    for tf, nt in cells:
        rep = _count(tf, nt, levels=7, delta=True, theta=True)
        got.append(rep.iterations if rep.converged else None)
    ok_both = all(g is not None and abs(g - e) <= 0.5 * e
                  for g, e in zip(got, expect))
    plain = [_count(tf, nt, levels=7).status for tf, nt in cells]
    delta_only = [_count(tf, nt, levels=5, delta=True).status for tf, nt in cells]
    ok_plain = all(s is SolveStatus.DIVERGED for s in plain)
    ok_delta = all(s is SolveStatus.DIVERGED for s in delta_only)
    _check(
        "criterion 3 (seven-level trend)",
        ok_both and ok_plain and ok_delta,
        f"corrected counts {got} vs {expect} +-50%; plain 7-level and "
        f"tangent-only 5-level diverge on every column",
    )


def test_c04_corrected_iteration_is_superlinear():
    rep = _count(8, 8192, delta=True, theta=True)
    r = np.asarray(rep.residual_history)
    lr = np.log(r)
    p = np.polyfit(lr[-4:-1], lr[-3:], 1)[0]
    _check(
        "criterion 4 (superlinear contraction)",
        rep.converged and p >= 1.5,
        f"fitted order {p:.2f} over the last three residual pairs (>= 1.5)",
    )


def test_c05_leading_exponent_estimate():
    cfg = LyapunovConfig(spinup_time=10.0, run_time=60.0, reorth_interval=10)
    t0 = time.perf_counter()
    lam0 = float(lyapunov_spectrum(LorenzSystem(), ForwardEuler(), 1e-4, cfg)[0])
    wall = time.perf_counter() - t0
    _check(
        "criterion 5 (leading exponent at h=1e-4)",
        0.8 <= lam0 <= 1.0 and wall < 60.0,
        f"lambda0 = {lam0:.4f} in [0.8, 1.0], {wall:.0f}s < 60s",
    )


def test_c06_step_size_trends_of_the_estimators():
    sys_ = LorenzSystem()
    hs = [2e-4, 5e-4, 1e-3, 2e-3, 4e-3]
    h_ref = min(hs)
    pool = attractor_members(1e-3, 512)

    def estimate(stepper, h, members):
        cfg = LyapunovConfig(spinup_time=5.0, run_time=members[1],
                             reorth_interval=10)
        lam = lyapunov_spectrum(sys_, stepper, h, cfg, u0=pool[: members[0]])
        return float(lam[..., 0].mean())

    big, small = (512, 20.0), (64, 15.0)
    fe = [estimate(ForwardEuler(), h, big) for h in hs]
    be = [estimate(BackwardEuler(), h, big if h < 1e-3 else small) for h in hs]
    th = []
    for h in hs:
        r = h / h_ref
        th.append(estimate(ThetaMethod((r + 1) / (2 * r)), h, small))
        th.append(estimate(ThetaMethod((r - 1) / (2 * r)), h, small))
    ok_fe = all(a <= b + 1e-12 for a, b in zip(fe, fe[1:]))
    ok_be = all(a >= b - 1e-12 for a, b in zip(be, be[1:]))
    dev = max(abs(x - 0.9) for x in th)
    _check(
        "criterion 6 (estimator trends across step sizes)",
        ok_fe and ok_be and dev <= 0.15,
        f"explicit row {[f'{x:.3f}' for x in fe]} non-decreasing; implicit row "
        f"{[f'{x:.3f}' for x in be]} non-increasing; blended-weight deviation "
        f"{dev:.3f} <= 0.15",
    )


# -- randomized configuration matrix, shared by criteria 7 and 8 ------------

_MATRIX = None


def _config_matrix():
    global _MATRIX
    if _MATRIX is None:
        rng = np.random.default_rng(20240817)
        rows = []
        for _ in range(20):
            levels = int(rng.integers(2, 4))
            use_d = bool(rng.integers(0, 2))
            use_t = bool(rng.integers(0, 2))
            tf = float(rng.uniform(0.5, 1.5)) * TL
            nt = int(rng.choice([1024, 2048]))
            cfg = MgritConfig(num_levels=levels, use_delta=use_d, use_theta=use_t)
            slv = MgritSolver(LorenzSystem(), cfg, U0, tf, nt)
            ref = slv.sequential_solution()
            v, rep = slv.solve()
            rows.append((cfg, tf, nt, ref, v, rep))
        _MATRIX = rows
    return _MATRIX


def test_c07_converged_iterates_match_sequential_marching():
    worst, all_conv = 0.0, True
    for cfg, tf, nt, ref, v, rep in _config_matrix():
        all_conv &= rep.converged
        worst = max(worst, np.abs(v - ref).max())
    _check(
        "criterion 7 (marching equivalence across 20 random configs)",
        all_conv and worst <= 1e-6,
        f"all converged, worst max-norm gap {worst:.1e} <= 1e-6",
    )


def test_c08_exact_solution_is_a_fixed_point():
    worst = 0.0
    for cfg, tf, nt, ref, _, _ in _config_matrix():
        slv = MgritSolver(LorenzSystem(), cfg, U0, tf, nt)
        slv.levels[0].v[:] = ref
        slv.v_cycle()
        worst = max(worst, (np.abs(slv.v - ref) / (1.0 + np.abs(ref))).max())
    _check(
        "criterion 8 (one cycle preserves the exact solution)",
        worst <= 1e-12,
        f"worst relative perturbation {worst:.1e} <= 1e-12",
    )


def test_c09_forgetful_coarse_grid_recovers_newton():
    # with a coarse stepper that returns zero, the corrected two-grid cycle
    # must reproduce Newton's method on the block system at the skip points
    sys_ = LorenzSystem()
    nt, tf = 16, 0.16
    h = tf / nt
    cfg = MgritConfig(num_levels=2, use_delta=True)
    slv = MgritSolver(sys_, cfg, U0, tf, nt,
                      steppers=[ForwardEuler(), ZeroStepper()])
    slv.initialize()

    fe = ForwardEuler()

    def two_step(x):
        w1, t1 = fe.step_with_tangent(sys_, x, h)
        w2, t2 = fe.step_with_tangent(sys_, w1, h)
        return w2, t2 @ t1

    newton = np.tile(U0, (9, 1))
    worst = 0.0
    for _ in range(5):
        slv.v_cycle()
        vals = np.empty((8, 3))
        tans = np.empty((8, 3, 3))
        for j in range(8):
            vals[j], tans[j] = two_step(newton[j])
        residual = newton[1:] - vals
        delta = np.zeros((9, 3))
        for j in range(1, 9):
            delta[j] = tans[j - 1] @ delta[j - 1] - residual[j - 1]
        newton = newton + delta
        worst = max(worst, np.abs(slv.v[::2] - newton).max())
    _check(
        "criterion 9 (zero coarse stepper equals block Newton)",
        worst <= 1e-8,
        f"worst per-iterate gap {worst:.1e} <= 1e-8 over 5 iterates",
    )


def test_c10_blend_weight_is_exact_for_scalar_dynamics():
    sys_ = LogisticSystem()
    fe = ForwardEuler()
    rng = np.random.default_rng(101)
    worst = 0.0
    for m in (2, 4, 8):
        for _ in range(50):
            u0 = np.array([rng.uniform(0.05, 0.45)])
            h = rng.uniform(0.01, 0.05)
            traj = march(sys_, fe, u0, h, m)
            f_vals = np.array([float(sys_.rhs(u)[0]) for u in traj])
            theta = theta_exact_scalar(f_vals)
            w = ThetaMethod(theta).step(sys_, traj[0], m * h)
            worst = max(worst, abs(float(w[0]) - float(traj[-1][0])))
    _check(
        "criterion 10 (scalar blend-weight exactness)",
        worst <= 1e-12,
        f"worst multistep reproduction gap {worst:.1e} <= 1e-12 "
        f"(m in 2,4,8; 50 intervals each)",
    )


def test_c11_tangents_match_finite_differences():
    sys_ = LorenzSystem()
    rng = np.random.default_rng(2024)
    states = rng.uniform(-18.0, 18.0, size=(100, 3))
    h = 5e-3
    steppers = [ForwardEuler(), BackwardEuler(), ThetaMethod(0.5),
                ThetaMethod(theta_asymptotic(4, "fe"))]
    worst = 0.0
    for stepper in steppers:
        for u in states:
            _, T = stepper.step_with_tangent(sys_, u, h)
            T_fd = fd_tangent(lambda x: stepper.step(sys_, x, h), u)
            worst = max(worst, np.abs(T - T_fd).max() / (1.0 + np.abs(T_fd).max()))
    # the multi-step product tangent, via the solver's interval propagator
    cfg = MgritConfig(num_levels=2, coarsening_factor=4)
    slv = MgritSolver(sys_, cfg, U0, 4 * h, 4)
    for u in states[:25]:
        _, W = slv.ideal_coarse_step(0, 0, u)
        W_fd = fd_tangent(lambda x: slv.ideal_coarse_step(0, 0, x)[0], u)
        worst = max(worst, np.abs(W - W_fd).max() / (1.0 + np.abs(W_fd).max()))
    _check(
        "criterion 11 (tangents vs finite differences)",
        worst <= 1e-6,
        f"worst relative gap {worst:.1e} <= 1e-6 over 100 states",
    )


def test_c12_batched_execution_and_reruns_are_bitwise_stable(tmp_path):
    sys_ = LorenzSystem()
    cfg = MgritConfig(num_levels=3, use_delta=True, use_theta=True)
    slv = MgritSolver(sys_, cfg, U0, TL, 256)
    slv.initialize()
    slv.v_cycle()
    ok = True
    for level in (0, 1):
        tau_b, delta_b = slv.assemble_corrections(level, chunk_size=None)
        tau_s, delta_s = slv.assemble_corrections(level, chunk_size=1)
        ok &= np.array_equal(tau_b, tau_s) and np.array_equal(delta_b, delta_s)
        before = slv.levels[level].v.copy()
        slv.f_relax(level, chunk_size=None)
        batched = slv.levels[level].v.copy()
        slv.levels[level].v[:] = before
        slv.f_relax(level, chunk_size=1)
        ok &= np.array_equal(batched, slv.levels[level].v)

    pairs = []
    for name, argv in [
        ("solve", ["solve", "--tf", "1", "--nt", "512", "--delta", "--theta"]),
        ("sweep", ["lyapunov-sweep", "--h-values", "2e-3,4e-3",
                   "--spinup", "2", "--run-time", "5"]),
    ]:
        files = [str(tmp_path / f"{name}{i}.csv") for i in (0, 1)]
        for f in files:
            cli.main(argv + ["--out", f])
        pairs.append(open(files[0], "rb").read() == open(files[1], "rb").read())
    ok &= all(pairs)
    _check(
        "criterion 12 (bitwise determinism)",
        ok,
        "chunked relaxation/assembly identical; command reruns byte-identical",
    )
