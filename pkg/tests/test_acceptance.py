"""Acceptance suite: one test per criterion, each printing a PASS line.

Every criterion runs at its stated tolerance and asserts its stated
runtime cap.  Run with `pytest tests/test_acceptance.py -v -s` to see
the per-criterion lines.
"""

import math
import time

import numpy as np
import pytest

from ringchain.chain import (
    ChainParams,
    init_from_profile,
    integrate,
    limit_velocity,
    random_admissible_state,
)
from ringchain.continuum import (
    ContinuumSolution,
    bessel_solution,
    dalembert_solution,
    diffeomorphism_check,
    inhomogeneous_wave_check,
    lagrangian_solution,
)
from ringchain.fields import discrete_force, euler_residuals, limit_force, pressure
from ringchain.forcing import Constant, PeriodicFourier
from ringchain.profiles import gamma_constant, trig_profile, z_of_x
from ringchain.spectral import exact_gaps, tube_certificate

COS001 = trig_profile(L=1.0, x_cos={1: 0.01})
BUMP = trig_profile(
    L=1.0,
    x_cos={1: 0.002, 2: 0.001},
    x_sin={3: 0.0003},
    v_cos={2: 0.002},
    v_sin={1: 0.005},
)


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def report(name: str, ok: bool, detail: str, timer: Timer, cap: float):
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail} ({timer.elapsed:.2f} s)"
    print(line)
    assert ok, line
    assert timer.elapsed < cap, f"{name} exceeded the {cap:.0f} s runtime cap"


@pytest.fixture(scope="module")
def relaxation_run():
    # N=32 circle driven by a constant force, energetic randomized
    # admissible start, collisions on, horizon t=40
    state = random_admissible_state(
        32, L=1.0, seed=1, gap_spread=0.8, vel_spread=1.5
    )
    params = ChainParams(omega0=1.0, alpha=1.0, forcing=Constant(1.0))
    with Timer() as tm:
        res = integrate(state, 40.0, params, collisions=True, record_energy=True)
    return state, res, tm


def test_criterion_01_relaxation_constant_forcing(relaxation_run):
    _, res, tm = relaxation_run
    N, L = 32, 1.0
    gap_dev = float(np.max(np.abs(res.final.gaps() - L / N)))
    vel_dev = float(np.max(np.abs(res.final.v - 1.0)))  # w = f / alpha = 1
    ok = gap_dev < 1e-3 * L / N and vel_dev < 1e-4
    report(
        "criterion 1 (relaxation, constant forcing)",
        ok,
        f"gap dev {gap_dev:.2e} < {1e-3 * L / N:.2e}, "
        f"vel dev {vel_dev:.2e} < 1e-4, events={len(res.events)}",
        tm,
        cap=30.0,
    )


def test_criterion_02_periodic_forcing():
    force = PeriodicFourier({1: 0.5, -1: 0.5})  # f(t) = cos t
    params = ChainParams(omega0=1.0, alpha=1.0, forcing=force)
    state = random_admissible_state(32, L=1.0, seed=7, gap_spread=0.4, vel_spread=0.5)
    with Timer() as tm:
        res = integrate(state, 30.0, params, collisions=True, sample_times=[10.0, 30.0])
        devs = {}
        for snap in res.samples:
            w = (math.cos(snap.t) + math.sin(snap.t)) / 2.0
            assert w == pytest.approx(limit_velocity(force, 1.0, snap.t), rel=1e-12)
            devs[snap.t] = float(np.max(np.abs(snap.v - w)))
    ok = devs[30.0] < 1e-3 and devs[10.0] / devs[30.0] >= 100.0
    report(
        "criterion 2 (periodic forcing velocity limit)",
        ok,
        f"dev(30)={devs[30.0]:.2e} < 1e-3, decay factor {devs[10.0] / devs[30.0]:.0f} >= 100",
        tm,
        cap=30.0,
    )


def test_criterion_03_oracle_equivalence():
    N, omega0, alpha = 128, 1.0, 0.5
    state = init_from_profile(COS001, N)
    params = ChainParams(omega0=omega0, alpha=alpha, forcing=Constant(0.0))
    ts = np.linspace(0.25, 10.0, 40)
    with Timer() as tm:
        res = integrate(
            state, 10.0, params, dt=0.125 / N, collisions=False, sample_times=ts
        )
        worst = 0.0
        for snap in res.samples:
            r_direct = snap.gaps() - state.L / N
            r_exact = exact_gaps(state, omega0, alpha, snap.t)
            worst = max(worst, float(np.max(np.abs(r_direct - r_exact))))
    ok = worst <= 1e-6
    report(
        "criterion 3 (direct vs spectral oracle)",
        ok,
        f"max gap difference {worst:.2e} <= 1e-6",
        tm,
        cap=20.0,
    )


def test_criterion_04_regularity_tube():
    N, delta = 512, 0.6
    with Timer() as tm:
        state = init_from_profile(COS001, N)
        reg = gamma_constant(COS001, alpha=0.0, omega0=1.0, delta=delta)
        cert = tube_certificate(
            state, COS001, reg, np.linspace(0.0, 20.0, 256), 1.0, 0.0
        )
    ok = reg.gamma < delta and cert.ok and cert.bound_ok
    report(
        "criterion 4 (no-collision tube)",
        ok,
        f"gamma={reg.gamma:.4f} < {delta}, max N|r|/L={cert.max_scaled_deviation:.4f}, "
        f"analytic envelope respected",
        tm,
        cap=60.0,
    )


def test_criterion_05_continuum_convergence():
    omega0, alpha = 1.0, 0.5
    sol = ContinuumSolution(COS001, omega0, alpha)
    ts = np.linspace(0.0, 5.0, 11)[1:]
    rng = np.random.default_rng(3)
    x_grid = np.sort(rng.uniform(0.0, 1.0, size=64))
    z_grid = np.array([z_of_x(COS001, float(x)) for x in x_grid])
    err_field = []
    err_traj = []
    with Timer() as tm:
        for N in (64, 128, 256):
            state = init_from_profile(COS001, N)
            grid = np.arange(N) / N
            r_disc = exact_gaps(state, omega0, alpha, ts)
            err_field.append(
                max(
                    float(np.max(np.abs(r_disc[i] - sol.r_value(float(t), grid) / N)))
                    for i, t in enumerate(ts)
                )
            )
            params = ChainParams(omega0=omega0, alpha=alpha, forcing=Constant(0.0))
            res = integrate(state, 5.0, params, collisions=False, sample_times=ts)
            ks = np.searchsorted(state.x, x_grid, side="right") - 1
            worst = 0.0
            for snap in res.samples:
                G = lagrangian_solution(sol, snap.t, z_grid)[0]
                worst = max(worst, float(np.max(np.abs(snap.x[ks] - G))))
            err_traj.append(worst)
    fr = [err_field[0] / err_field[1], err_field[1] / err_field[2]]
    tr = [err_traj[0] / err_traj[1], err_traj[1] / err_traj[2]]
    ok = all(5.0 <= r <= 12.0 for r in fr) and all(1.5 <= r <= 3.0 for r in tr)
    report(
        "criterion 5 (continuum convergence rates)",
        ok,
        f"gap-field ratios {fr[0]:.2f}, {fr[1]:.2f} in [5,12]; "
        f"trajectory ratios {tr[0]:.2f}, {tr[1]:.2f} in [1.5,3]",
        tm,
        cap=180.0,
    )


def test_criterion_06_solution_crosscheck():
    rng = np.random.default_rng(12)
    ts = rng.uniform(0.1, 3.0, size=50)
    zs = rng.uniform(0.0, 1.0, size=50)
    sol = ContinuumSolution(
        BUMP, 1.0, 0.8, forcing=PeriodicFourier({1: -0.5j, -1: 0.5j}), v=0.05
    )  # f(t) = sin t
    sol0 = ContinuumSolution(BUMP, 1.0, 0.0, forcing=Constant(0.0), v=0.05)
    with Timer() as tm:
        worst_fb = max(
            abs(
                lagrangian_solution(sol, float(t), float(z))[0]
                - bessel_solution(sol, float(t), float(z))
            )
            for t, z in zip(ts, zs)
        )
        worst_fd = 0.0
        worst_bd = 0.0
        for t, z in zip(ts, zs):
            gd = dalembert_solution(sol0, float(t), float(z))
            worst_fd = max(
                worst_fd, abs(lagrangian_solution(sol0, float(t), float(z))[0] - gd)
            )
            worst_bd = max(worst_bd, abs(bessel_solution(sol0, float(t), float(z)) - gd))
    ok = worst_fb <= 1e-6 and worst_fd <= 1e-8 and worst_bd <= 1e-8
    report(
        "criterion 6 (three solution routes agree)",
        ok,
        f"fourier-bessel {worst_fb:.2e} <= 1e-6; "
        f"vs d'alembert {worst_fd:.2e}, {worst_bd:.2e} <= 1e-8",
        tm,
        cap=60.0,
    )


def test_criterion_07_pde_residuals():
    sol = ContinuumSolution(
        BUMP, 1.0, 0.5, forcing=PeriodicFourier({1: 0.5, -1: 0.5}), v=0.05
    )
    rng = np.random.default_rng(5)
    with Timer() as tm:
        worst_lag = 0.0
        worst_eul = 0.0
        for _ in range(100):
            t = float(rng.uniform(0.2, 4.0))
            z = float(rng.uniform(0.0, 1.0))
            res = inhomogeneous_wave_check(sol, t, z, h=1e-3)
            worst_lag = max(worst_lag, res.lagrangian)
            worst_eul = max(worst_eul, res.eulerian)
    ok = worst_lag <= 1e-5 and worst_eul <= 1e-5
    report(
        "criterion 7 (wave-equation residuals)",
        ok,
        f"material form {worst_lag:.2e}, position form {worst_eul:.2e} <= 1e-5",
        tm,
        cap=30.0,
    )


def test_criterion_08_euler_residuals():
    sol = ContinuumSolution(
        BUMP, 1.0, 0.5, forcing=PeriodicFourier({1: 0.5, -1: 0.5}), v=0.05
    )
    rng = np.random.default_rng(8)
    with Timer() as tm:
        for t in np.linspace(0.2, 4.0, 9):
            assert diffeomorphism_check(sol, float(t), n_grid=1024).ok
        worst = dict(continuity=0.0, momentum=0.0, lagr_c=0.0, lagr_m=0.0)
        for _ in range(100):
            t = float(rng.uniform(0.2, 4.0))
            y = float(rng.uniform(0.0, 1.0))
            res = euler_residuals(sol, t, y, h=1e-3)
            worst["continuity"] = max(worst["continuity"], res.continuity)
            worst["momentum"] = max(worst["momentum"], res.momentum)
            worst["lagr_c"] = max(worst["lagr_c"], res.lagr_continuity)
            worst["lagr_m"] = max(worst["lagr_m"], res.lagr_momentum)
        p_unit = pressure(1.0, sol.omega1)
    ok = all(v <= 1e-4 for v in worst.values()) and p_unit == 0.0
    report(
        "criterion 8 (Euler residuals + pressure normalization)",
        ok,
        "max residuals "
        + ", ".join(f"{k}={v:.2e}" for k, v in worst.items())
        + f" <= 1e-4; p(rho=1)={p_unit}",
        tm,
        cap=60.0,
    )


def test_criterion_09_force_limit():
    omega0, alpha = 1.0, 0.5
    sol = ContinuumSolution(COS001, omega0, alpha)
    rng = np.random.default_rng(11)
    pts = [
        (float(t), float(y))
        for t, y in zip(rng.uniform(0.2, 2.0, 20), rng.uniform(0.0, 1.0, 20))
    ]
    t_samples = sorted({t for t, _ in pts})
    errs = []
    with Timer() as tm:
        for N in (128, 256, 512):
            state = init_from_profile(COS001, N)
            params = ChainParams(omega0=omega0, alpha=alpha, forcing=Constant(0.0))
            res = integrate(
                state,
                max(t_samples),
                params,
                collisions=False,
                sample_times=t_samples,
            )
            by_t = {round(s.t, 12): s for s in res.samples}
            errs.append(
                max(
                    abs(
                        discrete_force(by_t[round(t, 12)], y, omega0)
                        - limit_force(sol, t, y)
                    )
                    for t, y in pts
                )
            )
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    ok = all(1.5 <= r <= 3.0 for r in ratios)
    report(
        "criterion 9 (force limit convergence)",
        ok,
        f"doubling ratios {ratios[0]:.2f}, {ratios[1]:.2f} in [1.5,3]",
        tm,
        cap=120.0,
    )


def test_criterion_10_conservation_suite(relaxation_run):
    state0, res, _ = relaxation_run
    with Timer() as tm:
        # gap sum on the accepted collision run
        gap_err = abs(float(res.final.gaps().sum()) - 1.0) / 1.0
        # every velocity exchange preserves sum v and sum v^2 / 2
        assert len(res.events) > 0
        worst_dv = max(abs(e.dv_sum) for e in res.events)
        worst_dke = max(abs(e.dke_sum) / 2.0 for e in res.events)
        # H0 non-increasing per step on collision-free segments, alpha > 0
        s = init_from_profile(COS001, 32)
        params = ChainParams(omega0=1.0, alpha=1.0, forcing=Constant(1.0))
        quiet = integrate(s, 5.0, params, collisions=False, record_energy=True)
        h0 = np.array([r.H0 for r in quiet.energies])
        worst_rise = float(np.max(np.diff(h0)))
        # and on the event-free steps of the collision run itself
        hc = np.array([r.H0 for r in res.energies])
        flags = np.array(res.energy_step_events, dtype=bool)
        rises = np.diff(hc)[~flags]
        worst_rise_ev = float(np.max(rises)) if rises.size else 0.0
    ok = (
        gap_err <= 1e-9
        and worst_dv <= 1e-12
        and worst_dke <= 1e-12
        and worst_rise <= 1e-10
        and worst_rise_ev <= 1e-10
    )
    report(
        "criterion 10 (conservation suite)",
        ok,
        f"gap-sum err {gap_err:.1e} <= 1e-9; event dSv {worst_dv:.1e}, "
        f"dKE {worst_dke:.1e} <= 1e-12; H0 step rise {worst_rise:.1e}, "
        f"{worst_rise_ev:.1e} <= 1e-10",
        tm,
        cap=30.0,
    )
