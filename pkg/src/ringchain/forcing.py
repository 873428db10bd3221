"""External driving forces acting equally on every particle.

Three variants are supported: a constant force, a 2-pi-periodic force
given by a finite Fourier series, and a wide-sense-stationary force
represented by a finite set of spectral atoms plus a mean.  All variants
are real-valued by construction (conjugate-symmetric coefficients) and
expose themselves as a finite sum of complex exponentials, which keeps
every time integral used elsewhere in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Tuple, Union

import numpy as np

__all__ = [
    "Constant",
    "PeriodicFourier",
    "SpectralAtoms",
    "Forcing",
    "as_exp_terms",
    "forcing_is_zero",
    "random_spectral_atoms",
    "forcing_to_json",
    "forcing_from_json",
]

_SYM_TOL = 1e-12


@dataclass(frozen=True)
class Constant:
    """f(t) = f for all t."""

    f: float = 0.0

    def value(self, t):
        t_arr = np.asarray(t, dtype=float)
        if t_arr.shape:
            return np.full(t_arr.shape, self.f)
        return float(self.f)


@dataclass(frozen=True)
class PeriodicFourier:
    """f(t) = sum_m a_m exp(i m t), conjugate-symmetric so f is real."""

    a: Union[Mapping[int, complex], Iterable[Tuple[int, complex]]]

    def __post_init__(self) -> None:
        items = self.a.items() if isinstance(self.a, Mapping) else self.a
        merged: dict[int, complex] = {}
        for m, c in items:
            merged[int(m)] = merged.get(int(m), 0.0) + complex(c)
        for m, c in merged.items():
            other = merged.get(-m, 0.0)
            if abs(other - np.conj(c)) > _SYM_TOL * max(1.0, abs(c)):
                raise ValueError(
                    f"Fourier forcing is not conjugate-symmetric at m={m}"
                )
        object.__setattr__(self, "a", tuple(sorted(merged.items())))
        object.__setattr__(self, "_ms", np.array([m for m, _ in self.a], dtype=float))
        object.__setattr__(self, "_cs", np.array([c for _, c in self.a], dtype=complex))

    def value(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = np.real(np.exp(1j * np.multiply.outer(t_arr, self._ms)) @ self._cs)
        return out if t_arr.shape else float(out)


@dataclass(frozen=True)
class SpectralAtoms:
    """f(t) = f_bar + sum_j amp_j exp(i u_j t) with conjugate-paired atoms.

    A degenerate orthogonal spectral measure concentrated on finitely
    many frequencies; seed records how the atoms were drawn so runs stay
    reproducible.
    """

    f_bar: float = 0.0
    atoms: Tuple[Tuple[float, complex], ...] = ()
    seed: int | None = None

    def __post_init__(self) -> None:
        atoms = tuple((float(u), complex(c)) for u, c in self.atoms)
        for u, c in atoms:
            if u == 0.0:
                if abs(c.imag) > _SYM_TOL * max(1.0, abs(c)):
                    raise ValueError("zero-frequency atom must be real")
                continue
            partner = [cc for uu, cc in atoms if abs(uu + u) <= 1e-12 * max(1.0, abs(u))]
            if not partner or abs(partner[0] - np.conj(c)) > _SYM_TOL * max(1.0, abs(c)):
                raise ValueError(
                    f"spectral atoms are not conjugate-paired at u={u}"
                )
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "_us", np.array([u for u, _ in atoms], dtype=float))
        object.__setattr__(self, "_cs", np.array([c for _, c in atoms], dtype=complex))

    def value(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = self.f_bar + np.real(
            np.exp(1j * np.multiply.outer(t_arr, self._us)) @ self._cs
        )
        return out if t_arr.shape else float(out)


Forcing = Union[Constant, PeriodicFourier, SpectralAtoms]


def as_exp_terms(force: Forcing) -> list[tuple[complex, complex]]:
    """Represent f(t) as sum of coef * exp(mu t) terms (mu purely imaginary)."""
    if isinstance(force, Constant):
        return [(complex(force.f), 0.0 + 0.0j)] if force.f != 0.0 else []
    if isinstance(force, PeriodicFourier):
        return [(c, 1j * float(m)) for m, c in force.a if c != 0.0]
    if isinstance(force, SpectralAtoms):
        terms: list[tuple[complex, complex]] = []
        if force.f_bar != 0.0:
            terms.append((complex(force.f_bar), 0.0 + 0.0j))
        terms.extend((c, 1j * u) for u, c in force.atoms if c != 0.0)
        return terms
    raise TypeError(f"not a forcing variant: {force!r}")


def forcing_is_zero(force: Forcing) -> bool:
    return not as_exp_terms(force)


def random_spectral_atoms(
    seed: int,
    n_atoms: int = 3,
    freq_scale: float = 2.0,
    amp_scale: float = 0.2,
    f_bar: float = 0.0,
) -> SpectralAtoms:
    """Draw a reproducible conjugate-paired atom set."""
    rng = np.random.default_rng(seed)
    atoms: list[tuple[float, complex]] = []
    for _ in range(n_atoms):
        u = float(rng.uniform(0.2, freq_scale))
        amp = amp_scale * (rng.normal() + 1j * rng.normal()) / 2.0
        atoms.append((u, amp))
        atoms.append((-u, np.conj(amp)))
    return SpectralAtoms(f_bar=f_bar, atoms=tuple(atoms), seed=seed)


def forcing_to_json(force: Forcing) -> dict:
    if isinstance(force, Constant):
        return {"type": "constant", "f": force.f}
    if isinstance(force, PeriodicFourier):
        return {
            "type": "periodic",
            "a": [[int(m), c.real, c.imag] for m, c in force.a],
        }
    if isinstance(force, SpectralAtoms):
        return {
            "type": "atoms",
            "f_bar": force.f_bar,
            "atoms": [[u, c.real, c.imag] for u, c in force.atoms],
            "seed": force.seed,
        }
    raise TypeError(f"not a forcing variant: {force!r}")


def forcing_from_json(d: Mapping) -> Forcing:
    kind = d.get("type")
    if kind == "constant":
        return Constant(f=float(d.get("f", 0.0)))
    if kind == "periodic":
        return PeriodicFourier(a={int(m): complex(re, im) for m, re, im in d["a"]})
    if kind == "atoms":
        return SpectralAtoms(
            f_bar=float(d.get("f_bar", 0.0)),
            atoms=tuple((float(u), complex(re, im)) for u, re, im in d.get("atoms", [])),
            seed=d.get("seed"),
        )
    raise ValueError(f"unknown forcing type {kind!r}")
