"""Discretized measure spaces, measurable functions and partitions.

A space is a finite collection of point masses; countable spaces are
accessed only through truncation against explicit tail bounds.  All values
are immutable after construction and all operations are pure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping

import numpy as np

__all__ = [
    "DimensionMismatchError",
    "NotSummableError",
    "FiniteMeasureSpace",
    "MFunction",
    "Partition",
    "CountableSpaceSpec",
    "Truncation",
    "weighted_inner_product",
    "support",
    "ess_range",
    "truncate",
]

#: hard cap on index scans over countable specs
TRUNCATION_CAP = 200_000


class DimensionMismatchError(ValueError):
    """A function or partition is not aligned with its space."""


class NotSummableError(RuntimeError):
    """A tail bound never dropped below the requested tolerance."""


@dataclass(frozen=True)
class FiniteMeasureSpace:
    """Point masses mu_i > 0, optionally carrying coordinate labels."""

    masses: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        object.__setattr__(self, "masses", masses)
        if masses.ndim != 1 or masses.size < 1:
            raise ValueError("need at least one point mass")
        if not np.all(np.isfinite(masses)) or np.any(masses <= 0.0):
            raise ValueError("all point masses must be strictly positive and finite")
        if self.labels is not None:
            labels = np.atleast_2d(np.asarray(self.labels, dtype=float))
            if labels.shape[0] != masses.size:
                raise DimensionMismatchError(
                    f"{labels.shape[0]} labels for {masses.size} points"
                )
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.masses.size

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())


@dataclass(frozen=True)
class MFunction:
    """Complex-valued function given by its values at the space's points."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("function values must be a nonempty 1-d array")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.size

    def check_aligned(self, sp: FiniteMeasureSpace) -> None:
        if self.n != sp.n:
            raise DimensionMismatchError(
                f"function has {self.n} values, space has {sp.n} points"
            )


@dataclass(frozen=True)
class Partition:
    """Atoms of a partition-generated sub-sigma-algebra.

    ``atom_of[i]`` is the atom index (0..atom_count-1) of point i.  Every
    atom is nonempty; since point masses are strictly positive, every atom
    automatically has positive mass.
    """

    atom_of: np.ndarray

    def __post_init__(self):
        atom_of = np.asarray(self.atom_of, dtype=int)
        object.__setattr__(self, "atom_of", atom_of)
        if atom_of.ndim != 1 or atom_of.size < 1:
            raise ValueError("atom_of must be a nonempty 1-d index array")
        m = int(atom_of.max()) + 1
        if atom_of.min() < 0 or len(np.unique(atom_of)) != m:
            raise ValueError("atom indices must cover 0..m-1 with no gaps")

    @property
    def n(self) -> int:
        return self.atom_of.size

    @property
    def atom_count(self) -> int:
        return int(self.atom_of.max()) + 1

    @property
    def is_singletons(self) -> bool:
        return self.atom_count == self.n

    def check_aligned(self, sp: FiniteMeasureSpace) -> None:
        if self.n != sp.n:
            raise DimensionMismatchError(
                f"partition covers {self.n} points, space has {sp.n}"
            )

    @classmethod
    def from_blocks(cls, blocks: list[list[int]], n: int) -> "Partition":
        """Build from explicit index blocks; blocks must partition range(n)."""
        atom_of = np.full(n, -1, dtype=int)
        for a, block in enumerate(blocks):
            for i in block:
                if i < 0 or i >= n:
                    raise ValueError(f"point index {i} out of range")
                if atom_of[i] != -1:
                    raise ValueError(f"point {i} appears in two atoms")
                atom_of[i] = a
        if np.any(atom_of == -1):
            missing = np.nonzero(atom_of == -1)[0]
            raise ValueError(f"points {missing.tolist()} not covered by any atom")
        return cls(atom_of)


def weighted_inner_product(f: MFunction, g: MFunction, sp: FiniteMeasureSpace) -> complex:
    """<f, g> = sum_i f_i conj(g_i) mu_i."""
    f.check_aligned(sp)
    g.check_aligned(sp)
    return complex(np.sum(f.values * np.conj(g.values) * sp.masses))


def support(f: MFunction, tol: float) -> frozenset[int]:
    """Indices where |f| exceeds tol."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return frozenset(np.nonzero(np.abs(f.values) > tol)[0].tolist())


def ess_range(f: MFunction, sp: FiniteMeasureSpace, tol: float) -> list[complex]:
    """Distinct values of f on positive-mass points, merged at tolerance.

    Values closer than tol join one cluster; the representative is the
    mass-weighted mean of the cluster.  Since every point has positive mass
    by construction, every point participates.
    """
    f.check_aligned(sp)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    reps: list[complex] = []
    cluster_mass: list[float] = []
    # visit values in sorted order so clusters accrete deterministically
    order = np.lexsort((f.values.imag, f.values.real))
    for i in order:
        v = complex(f.values[i])
        m = float(sp.masses[i])
        for k, rep in enumerate(reps):
            if abs(v - rep) <= tol:
                total = cluster_mass[k] + m
                reps[k] = (rep * cluster_mass[k] + v * m) / total
                cluster_mass[k] = total
                break
        else:
            reps.append(v)
            cluster_mass.append(m)
    return sorted(reps, key=lambda z: (z.real, z.imag))


@dataclass(frozen=True)
class CountableSpaceSpec:
    """Lazy description of a countable point-mass space.

    ``tail_bound(N)`` bounds sum_{i>=N} mass_at(i), the mass discarded when
    the first N points are kept, and must be nonincreasing with limit 0.
    ``weighted_tail_bound(N)``, when present, bounds
    sum_{i>=N} mass_at(i)|symbol_at(i)|^2 and certifies convergence of the
    weighted series.  ``divergent_atoms`` maps an atom identifier to a
    witness: given a target B it names an index by which that atom's
    weighted partial sum provably exceeds B (verified numerically).
    """

    mass_at: Callable[[int], float]
    tail_bound: Callable[[int], float]
    atom_of: Callable[[int], Hashable]
    symbol_at: Callable[[int], complex]
    weighted_tail_bound: Callable[[int], float] | None = None
    divergent_atoms: Mapping[Hashable, Callable[[float], int]] = field(default_factory=dict)


@dataclass(frozen=True)
class Truncation:
    """Finite view of a countable space: the first ``size`` points."""

    space: FiniteMeasureSpace
    partition: Partition
    symbol: MFunction
    size: int
    discarded_mass_bound: float
    atom_ids: tuple[Hashable, ...]  # original atom identifier per atom index


def truncate(spec: CountableSpaceSpec, tail_tol: float, *, weighted: bool = False) -> Truncation:
    """Keep the first N points, N smallest with tail_bound(N) <= tail_tol,
    so the discarded mass is provably below tail_tol.

    With ``weighted=True`` the weighted tail bound (on sum mu_i |u_i|^2) is
    used instead, which is the right cut when the symbol grows.  At least
    one point is always kept.
    """
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    bound = spec.weighted_tail_bound if weighted else spec.tail_bound
    if bound is None:
        raise ValueError("spec has no weighted tail bound")
    size = None
    for candidate in range(1, TRUNCATION_CAP + 1):
        if bound(candidate) <= tail_tol:
            size = candidate
            break
    if size is None:
        raise NotSummableError(
            f"tail bound never dropped below {tail_tol} within {TRUNCATION_CAP} indices"
        )
    masses = np.array([spec.mass_at(i) for i in range(size)], dtype=float)
    symbol = np.array([spec.symbol_at(i) for i in range(size)], dtype=complex)
    raw_atoms = [spec.atom_of(i) for i in range(size)]
    seen: dict[Hashable, int] = {}
    atom_of = np.empty(size, dtype=int)
    for i, a in enumerate(raw_atoms):
        atom_of[i] = seen.setdefault(a, len(seen))
    return Truncation(
        space=FiniteMeasureSpace(masses),
        partition=Partition(atom_of),
        symbol=MFunction(symbol),
        size=size,
        discarded_mass_bound=float(bound(size)),
        atom_ids=tuple(seen),
    )
