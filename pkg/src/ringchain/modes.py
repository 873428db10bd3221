"""Closed-form kernels for damped harmonic modes.

Every Fourier mode of the gap dynamics obeys y'' + alpha y' + W^2 y = 0.
This module provides the (a, b) envelope pair of that equation in the
three damping regimes, numerically stable for both tiny and large
arguments, plus exact time integrals of exponential basis functions
against the kernels exp(-alpha (t-s)), (1 - exp(-alpha (t-s))) and
(t - s).  The integrals let the boundary trajectory of the continuum
solution be evaluated to machine precision, which the finite-difference
residual checks depend on.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "UNDERDAMPED",
    "OVERDAMPED",
    "CRITICAL",
    "classify",
    "discriminant_root",
    "envelope_pair",
    "exp_int",
    "exp_int_s",
    "conv_exp",
    "conv_exp_s",
    "lin_exp",
    "lin_exp_s",
    "ramp_exp",
]

UNDERDAMPED = "underdamped"
OVERDAMPED = "overdamped"
CRITICAL = "critical"

_CRIT_TOL = 1e-12


def classify(alpha: float, Omega: float) -> str:
    """Damping regime by the sign of alpha^2/4 - Omega^2.

    Discriminants within 1e-12 * max(1, Omega^2) of zero are treated as
    critical for floating-point safety near the degenerate case.
    """
    disc = 0.25 * alpha * alpha - Omega * Omega
    if abs(disc) <= _CRIT_TOL * max(1.0, Omega * Omega):
        return CRITICAL
    return OVERDAMPED if disc > 0.0 else UNDERDAMPED


def discriminant_root(alpha: float, Omega: float) -> float:
    """d = sqrt(|alpha^2/4 - Omega^2|)."""
    return float(np.sqrt(abs(0.25 * alpha * alpha - Omega * Omega)))


def _sinhc(x: np.ndarray) -> np.ndarray:
    """sinh(x)/x, accurate through x = 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-6
    safe = np.where(small, 1.0, x)
    out = np.where(small, 1.0 + x * x / 6.0, np.sinh(safe) / safe)
    return out


def envelope_pair(alpha: float, Omega, t):
    """Envelopes (a, b) of y'' + alpha y' + Omega^2 y = 0 with a(0)=1, b(0)=0.

    The solution with initial data (y0, y0') is
    y(t) = (a + alpha b / 2) y0 + b y0'.  Omega and t broadcast against
    each other; the overdamped branch is evaluated as a sum of decaying
    exponentials so large arguments cannot overflow.
    """
    Omega_arr = np.asarray(Omega, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    beta = 0.5 * alpha
    disc = beta * beta - Omega_arr * Omega_arr
    crit = np.abs(disc) <= _CRIT_TOL * np.maximum(1.0, Omega_arr * Omega_arr)
    d = np.where(crit, 0.0, np.sqrt(np.abs(disc)))
    over = (disc > 0.0) & ~crit

    d_b, t_b = np.broadcast_arrays(d, t_arr)
    over_b = np.broadcast_to(over, d_b.shape)
    dt = d_b * t_b
    env = np.exp(-beta * t_b)

    a = np.where(over_b, 1.0, env * np.cos(dt))
    b = np.where(over_b, 0.0, env * t_b * np.sinc(dt / np.pi))
    if np.any(over_b):
        # e^{-beta t} cosh(d t) = (e^{(d-beta)t} + e^{-(d+beta)t}) / 2, d < beta
        ep = np.exp((d_b - beta) * t_b, where=over_b, out=np.zeros_like(d_b))
        em = np.exp(-(d_b + beta) * t_b, where=over_b, out=np.zeros_like(d_b))
        a = np.where(over_b, 0.5 * (ep + em), a)
        small = over_b & (np.abs(dt) < 1e-6)
        b_over = np.where(
            small,
            env * t_b * _sinhc(dt),
            np.divide(0.5 * (ep - em), d_b, where=over_b, out=np.zeros_like(d_b)),
        )
        b = np.where(over_b, b_over, b)
    if a.shape:
        return a, b
    return float(a), float(b)


# ---------------------------------------------------------------------------
# Exact integrals of t^p e^{mu t} basis functions, p in {0, 1}
# ---------------------------------------------------------------------------

_SERIES_CUT = 1e-4


def exp_int(mu: complex, t: float) -> complex:
    """int_0^t e^{mu s} ds."""
    m = mu * t
    if abs(m) < _SERIES_CUT:
        return t * (1.0 + m / 2.0 + m * m / 6.0 + m**3 / 24.0 + m**4 / 120.0)
    return (np.exp(m) - 1.0) / mu


def exp_int_s(mu: complex, t: float) -> complex:
    """int_0^t s e^{mu s} ds."""
    m = mu * t
    if abs(m) < _SERIES_CUT:
        return t * t * (0.5 + m / 3.0 + m * m / 8.0 + m**3 / 30.0 + m**4 / 144.0)
    e = np.exp(m)
    return t * e / mu - (e - 1.0) / (mu * mu)


def conv_exp(mu: complex, alpha: float, t: float) -> complex:
    """int_0^t e^{-alpha (t-s)} e^{mu s} ds."""
    return np.exp(-alpha * t) * exp_int(mu + alpha, t)


def conv_exp_s(mu: complex, alpha: float, t: float) -> complex:
    """int_0^t e^{-alpha (t-s)} s e^{mu s} ds."""
    return np.exp(-alpha * t) * exp_int_s(mu + alpha, t)


def lin_exp(mu: complex, alpha: float, t: float) -> complex:
    """int_0^t (1 - e^{-alpha (t-s)}) e^{mu s} ds."""
    return exp_int(mu, t) - conv_exp(mu, alpha, t)


def lin_exp_s(mu: complex, alpha: float, t: float) -> complex:
    """int_0^t (1 - e^{-alpha (t-s)}) s e^{mu s} ds."""
    return exp_int_s(mu, t) - conv_exp_s(mu, alpha, t)


def ramp_exp(mu: complex, t: float) -> complex:
    """int_0^t (t - s) e^{mu s} ds, the alpha = 0 limit kernel."""
    return t * exp_int(mu, t) - exp_int_s(mu, t)
