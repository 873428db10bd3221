"""Shared oracles and finite-difference utilities for the test suite."""

from __future__ import annotations

import numpy as np


def fd1(f, x, h):
    """Fourth-order central first derivative."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def fd2(f, x, h):
    """Fourth-order central second derivative."""
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (
        12 * h * h
    )


def dft_reference(r):
    """Brute-force forward transform sum_k r_k exp(+2 pi i j k / N)."""
    r = np.asarray(r, dtype=complex)
    N = r.size
    out = np.zeros(N, dtype=complex)
    for j in range(N):
        for k in range(N):
            out[j] += r[k] * np.exp(2j * np.pi * j * k / N)
    return out


def bessel_series_reference(x, terms=30):
    """I0 and I1 partial sums with a fixed high term count."""
    i0 = 0.0
    i1 = 0.0
    fact = 1.0  # m!
    for m in range(terms):
        if m > 0:
            fact *= m
        gamma1 = fact  # Gamma(m + 1) = m!
        gamma2 = fact * (m + 1)  # Gamma(m + 2) = (m + 1)!
        i0 += (x / 2.0) ** (2 * m) / (fact * gamma1)
        i1 += (x / 2.0) ** (2 * m + 1) / (fact * gamma2)
    return i0, i1
