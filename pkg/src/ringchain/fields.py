"""Hydrodynamic layer: distribution function, density, velocity, pressure.

Fields live on the circle [0, L).  The map z -> y = G(t, z) mod L is a
certified diffeomorphism, so a position y determines a unique material
label z(t, y); density and velocity follow from the closed-form G as
rho = 1 / (L G_z) and u = G_t evaluated there.  The conservation-law and
momentum residuals measure how well the fields satisfy the Euler
equations under finite differencing; the identities themselves are
exact, so the residuals quantify numerics only.

Note on normalization: the pressure law p = -omega1^2 / rho + omega1^2
vanishes at unit density.  The Eulerian density integrates to one, so
its equilibrium value is 1/L and the Eulerian momentum balance in the
form u_t + u u_y + alpha u - f = -p_y / rho holds with this pressure on
circles of unit length (the acceptance configuration); the Lagrangian
form with rho_hat = L rho = 1 / G_z is exact for every L.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chain import ChainState
from .continuum import ContinuumSolution, fd1
from .profiles import x_of_z

__all__ = [
    "EmpiricalDistribution",
    "EulerResiduals",
    "FieldSample",
    "empirical_distribution",
    "limit_distribution",
    "eulerian_to_lagrangian",
    "density_velocity",
    "pressure",
    "field_sample",
    "euler_residuals",
    "particle_index_at",
    "discrete_force",
    "limit_force",
    "write_field_csv",
]


class EmpiricalDistribution:
    """Right-continuous step function F(y) = (1/N) #{k : pi(x_k) <= y}."""

    def __init__(self, state: ChainState) -> None:
        self.N = state.N
        self.L = state.L
        self.positions = np.sort(state.wrapped_positions())

    def __call__(self, y):
        y_arr = np.asarray(y, dtype=float)
        out = np.searchsorted(self.positions, y_arr, side="right") / self.N
        return out if y_arr.shape else float(out)


def empirical_distribution(s: ChainState) -> EmpiricalDistribution:
    """Counting distribution of the wrapped particle positions.

    A particle exactly at y is counted (<= convention), jumps have size
    1/N, and F(L-) = 1.
    """
    return EmpiricalDistribution(s)


@dataclass(frozen=True)
class FieldSample:
    """Hydrodynamic fields at one point of the circle."""

    t: float
    y: float
    rho: float
    u: float
    p: float


@dataclass(frozen=True)
class EulerResiduals:
    """Finite-difference residuals of the Euler identities at one point."""

    continuity: float
    momentum: float
    lagr_continuity: float
    lagr_momentum: float
    h: float


def eulerian_to_lagrangian(sol: ContinuumSolution, t: float, y: float) -> tuple[float, float]:
    """Invert y = pi(G(t, z)) for the material label: returns (z, x).

    Solved on the strictly increasing unwrapped branch with z in [0, L)
    by bisection plus Newton polish, driving |G - y~| to machine level;
    x = x(z) is the initial position of that material point.  A
    non-monotone G (diffeomorphism violation) surfaces as a residual
    failure and is reported.
    """
    L = sol.L
    if not 0.0 <= y < L:
        raise ValueError("y must lie in [0, L)")
    g0, _ = sol.boundary(t)
    m = math.ceil((g0 - y) / L)
    y_t = y + m * L
    if y_t < g0:  # guard the ceil against roundoff
        y_t += L
    if y_t >= g0 + L:
        y_t -= L

    def g(z):
        return g0 + z + sol.r_antideriv(t, z)

    lo, hi = 0.0, L
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        if g(mid) < y_t:
            lo = mid
        else:
            hi = mid
    z = 0.5 * (lo + hi)
    ok = False
    for _ in range(12):
        res = g(z) - y_t
        if abs(res) <= 1e-13 * max(1.0, abs(y_t)):
            ok = True
            break
        gz = 1.0 + sol.r_value(t, z)
        if gz <= 0.0:
            raise RuntimeError(
                f"flow map is not increasing at t={t}, z={z}: G_z={gz}"
            )
        z = min(max(z - res / gz, lo), hi)
    if not ok and abs(g(z) - y_t) > 1e-9 * max(1.0, abs(y_t)):
        raise RuntimeError(
            f"inversion of the flow map failed at t={t}, y={y}; "
            "the diffeomorphism certificate likely does not hold"
        )
    if z >= L:
        z -= L
    return z, float(x_of_z(sol.profile, z))


def limit_distribution(sol: ContinuumSolution, t: float, y: float) -> float:
    """Limiting distribution function F(t, y) = z(x(t, y)) / L in [0, 1)."""
    z, _ = eulerian_to_lagrangian(sol, t, y)
    return z / sol.L


def density_velocity(sol: ContinuumSolution, t: float, y: float) -> tuple[float, float]:
    """Density and velocity at a circle point: rho = 1 / (L G_z), u = G_t.

    Both are evaluated at the material label z(t, y).  rho <= 0 cannot
    occur while the flow map is a diffeomorphism; it is reported as an
    error rather than returned.
    """
    z, _ = eulerian_to_lagrangian(sol, t, y)
    gz = 1.0 + sol.r_value(t, z)
    if gz <= 0.0:
        raise RuntimeError(f"nonpositive G_z={gz}: diffeomorphism violated at t={t}")
    _, g0t = sol.boundary(t)
    u = g0t + sol.rt_antideriv(t, z)
    return 1.0 / (sol.L * gz), float(u)


def pressure(rho: float, omega1: float) -> float:
    """p = -omega1^2 / rho + omega1^2, zero at unit density."""
    if rho <= 0.0:
        raise ValueError("density must be positive")
    return -(omega1**2) / rho + omega1**2


def field_sample(sol: ContinuumSolution, t: float, y: float) -> FieldSample:
    rho, u = density_velocity(sol, t, y)
    return FieldSample(t=t, y=y, rho=rho, u=u, p=pressure(rho, sol.omega1))


def euler_residuals(
    sol: ContinuumSolution, t: float, y: float, h: float = 1e-3
) -> EulerResiduals:
    """Fourth-order finite-difference residuals of the Euler identities.

    Eulerian: |rho_t + (u rho)_y| and
    |u_t + u u_y + alpha u - f(t) + p_y / rho|.  Time derivatives
    redo the flow-map inversion at each stencil point; y-derivatives are
    taken in the material chart (d/dy = (1/G_z) d/dz of closed-form
    functions), which avoids differencing the inverted map.
    Lagrangian: |d/dt (1/rho_hat) - u_hat_z| and
    |u_hat_t + alpha u_hat - f(t) + p_hat_z| at the frozen label z.
    Requires the diffeomorphism on [t - 2h, t + 2h].
    """
    if t < 2.0 * h:
        raise ValueError("need t >= 2h for the central time stencil")
    L = sol.L
    w1sq = sol.omega1**2
    z0, _ = eulerian_to_lagrangian(sol, t, y)

    def gz_at(tt, zz):
        return 1.0 + sol.r_value(tt, zz)

    def gt_at(tt, zz):
        return sol.boundary(tt)[1] + sol.rt_antideriv(tt, zz)

    gz0 = gz_at(t, z0)
    rho0 = 1.0 / (L * gz0)
    u0 = gt_at(t, z0)
    f_t = sol.forcing.value(t)

    # --- Eulerian, fixed y ---
    def rho_at_time(tt):
        zz, _ = eulerian_to_lagrangian(sol, tt, y)
        return 1.0 / (L * gz_at(tt, zz))

    def u_at_time(tt):
        zz, _ = eulerian_to_lagrangian(sol, tt, y)
        return gt_at(tt, zz)

    rho_t = fd1(rho_at_time, t, h)
    u_t = fd1(u_at_time, t, h)

    def urho_of_z(zz):
        return gt_at(t, zz) / (L * gz_at(t, zz))

    def u_of_z(zz):
        return gt_at(t, zz)

    def p_of_z(zz):
        return pressure(1.0 / (L * gz_at(t, zz)), sol.omega1)

    urho_y = fd1(urho_of_z, z0, h) / gz0
    u_y = fd1(u_of_z, z0, h) / gz0
    p_y = fd1(p_of_z, z0, h) / gz0

    continuity = abs(rho_t + urho_y)
    momentum = abs(u_t + u0 * u_y + sol.alpha * u0 - f_t + p_y / rho0)

    # --- Lagrangian, fixed z ---
    dgz_dt = fd1(lambda tt: gz_at(tt, z0), t, h)
    du_dz = fd1(lambda zz: gt_at(t, zz), z0, h)
    lagr_continuity = abs(dgz_dt - du_dz)

    du_dt = fd1(lambda tt: gt_at(tt, z0), t, h)
    phat_z = fd1(lambda zz: -w1sq * gz_at(t, zz), z0, h)
    lagr_momentum = abs(du_dt + sol.alpha * u0 - f_t + phat_z)

    return EulerResiduals(
        continuity=float(continuity),
        momentum=float(momentum),
        lagr_continuity=float(lagr_continuity),
        lagr_momentum=float(lagr_momentum),
        h=h,
    )


def particle_index_at(s: ChainState, y: float) -> int:
    """Original index k with x_k <= y < x_{k+1} in the circular sense.

    A particle exactly at y is the one selected (half-open convention).
    """
    if not 0.0 <= y < s.L:
        raise ValueError("y must lie in [0, L)")
    wrapped = s.wrapped_positions()
    order = np.argsort(wrapped, kind="stable")
    pos_sorted = wrapped[order]
    i = int(np.searchsorted(pos_sorted, y, side="right")) - 1
    if i < 0:
        i = s.N - 1  # the particle below y is the top one shifted by -L
    return int(order[i])


def discrete_force(s: ChainState, y: float, omega0: float) -> float:
    """Net spring force on the particle occupying y:
    omega^2 (q_k - L/N) - omega^2 (q_{k-1} - L/N), omega = omega0 N."""
    k = particle_index_at(s, y)
    q = s.gaps()
    omega_sq = (omega0 * s.N) ** 2
    return float(omega_sq * (q[k] - q[(k - 1) % s.N]))


def limit_force(sol: ContinuumSolution, t: float, y: float) -> float:
    """Continuum counterpart of the discrete force: omega1^2 G_zz at z(t, y).

    Equals -p_y / rho for the normalized density (unit-length circle).
    """
    z, _ = eulerian_to_lagrangian(sol, t, y)
    return float(sol.omega1**2 * sol.r_value(t, z, deriv=1))


def write_field_csv(
    path,
    sol: ContinuumSolution,
    t: float,
    y_values: Sequence[float],
    h: float = 1e-3,
) -> None:
    """CSV dump: t,y,rho,u,p,residual_continuity,residual_momentum."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "y", "rho", "u", "p", "residual_continuity", "residual_momentum"])
        for y in y_values:
            rho, u = density_velocity(sol, t, float(y))
            res = euler_residuals(sol, t, float(y), h=h)
            w.writerow(
                [
                    f"{t:.17g}",
                    f"{y:.17g}",
                    f"{rho:.17g}",
                    f"{u:.17g}",
                    f"{pressure(rho, sol.omega1):.17g}",
                    f"{res.continuity:.17g}",
                    f"{res.momentum:.17g}",
                ]
            )
