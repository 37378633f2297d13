"""Conditional expectation with respect to a partition-generated algebra.

The conditional expectation of f is the mass-weighted average of f on each
atom; it is the orthogonal projection of L^2 of the space onto the
subspace of atom-constant functions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measure import FiniteMeasureSpace, MFunction, Partition

__all__ = [
    "atom_masses",
    "atom_averages",
    "cond_exp",
    "projection_matrix",
    "is_A_measurable",
    "MeasurabilityVerdict",
]


def atom_masses(p: Partition, sp: FiniteMeasureSpace) -> np.ndarray:
    """Total mass of each atom, shape (atom_count,)."""
    p.check_aligned(sp)
    return np.bincount(p.atom_of, weights=sp.masses, minlength=p.atom_count)


def atom_averages(f: MFunction, p: Partition, sp: FiniteMeasureSpace) -> np.ndarray:
    """Mass-weighted mean of f per atom, shape (atom_count,) complex."""
    f.check_aligned(sp)
    p.check_aligned(sp)
    w = sp.masses
    num_re = np.bincount(p.atom_of, weights=w * f.values.real, minlength=p.atom_count)
    num_im = np.bincount(p.atom_of, weights=w * f.values.imag, minlength=p.atom_count)
    return (num_re + 1j * num_im) / atom_masses(p, sp)


def cond_exp(f: MFunction, p: Partition, sp: FiniteMeasureSpace) -> MFunction:
    """Atom-wise averaging projection; constant on each atom."""
    return MFunction(atom_averages(f, p, sp)[p.atom_of])


def projection_matrix(p: Partition, sp: FiniteMeasureSpace) -> np.ndarray:
    """Matrix of the averaging projection in orthonormal coordinates.

    Coordinates are e_i = delta_i / sqrt(mu_i), so the matrix is Hermitian
    and idempotent with rank equal to the atom count.  Built by applying the
    projection to each basis vector.
    """
    p.check_aligned(sp)
    n = sp.n
    sqrt_m = np.sqrt(sp.masses)
    mat = np.empty((n, n), dtype=complex)
    for i in range(n):
        basis = np.zeros(n, dtype=complex)
        basis[i] = 1.0 / sqrt_m[i]
        col = cond_exp(MFunction(basis), p, sp)
        mat[:, i] = col.values * sqrt_m
    return mat


@dataclass(frozen=True)
class MeasurabilityVerdict:
    measurable: bool
    max_deviation: float
    worst_atom: int


def is_A_measurable(
    f: MFunction, p: Partition, sp: FiniteMeasureSpace, tol: float
) -> MeasurabilityVerdict:
    """Whether f is (numerically) constant on every atom.

    The deviation on an atom is the mass-weighted standard deviation of f
    there, computed in centered form sqrt(E(|f - E(f)|^2)); the verdict is
    true iff the largest deviation is <= tol.  The uncentered identity
    E(|f|^2) - |E(f)|^2 would cancel catastrophically and put a
    sqrt(eps)-sized floor under the deviation of genuinely atom-constant
    functions.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    mean = atom_averages(f, p, sp)
    centered = f.values - mean[p.atom_of]
    var = atom_averages(MFunction(np.abs(centered) ** 2), p, sp).real
    dev = np.sqrt(np.maximum(var, 0.0))
    worst = int(np.argmax(dev))
    return MeasurabilityVerdict(
        measurable=bool(dev[worst] <= tol),
        max_deviation=float(dev[worst]),
        worst_atom=worst,
    )
