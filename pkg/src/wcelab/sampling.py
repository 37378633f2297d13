"""Randomized operator instances for cross-validation.

The classification criteria are boundary-heavy: a Gaussian symbol is
essentially never atom-constant, so special instances (atom-constant,
real, atom-constant real, zero-mean symbol) are injected with fixed
probability to exercise every verdict branch.
"""
from __future__ import annotations

import numpy as np

from .condexp import cond_exp
from .measure import FiniteMeasureSpace, MFunction, Partition
from .operator import WeightedCondExpOperator

__all__ = ["random_operator", "SPECIAL_KINDS"]

SPECIAL_KINDS = ("generic", "atom_constant", "real", "atom_constant_real", "zero_mean")

#: probability of drawing each non-generic kind
_SPECIAL_P = 0.12


def _random_partition(rng: np.random.Generator, n: int) -> Partition:
    m = int(rng.integers(1, n + 1))
    # guarantee every atom nonempty, then scatter the rest
    atom_of = np.concatenate([np.arange(m), rng.integers(0, m, size=n - m)])
    rng.shuffle(atom_of)
    return Partition(atom_of)


def random_operator(
    rng: np.random.Generator,
    max_n: int = 64,
    kind: str | None = None,
) -> WeightedCondExpOperator:
    """One random (space, partition, symbol) instance.

    Sizes are uniform in [2, max_n], masses log-uniform in [1e-3, 1],
    the symbol standard complex Gaussian.  ``kind`` forces a special
    instance; by default specials are injected with fixed probability.
    """
    if kind is None:
        r = rng.random()
        idx = int(r // _SPECIAL_P) + 1
        kind = SPECIAL_KINDS[idx] if idx < len(SPECIAL_KINDS) else "generic"
    if kind not in SPECIAL_KINDS:
        raise ValueError(f"unknown kind {kind!r}")

    n = int(rng.integers(2, max_n + 1))
    masses = np.exp(rng.uniform(np.log(1e-3), 0.0, size=n))
    sp = FiniteMeasureSpace(masses)
    p = _random_partition(rng, n)

    u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if kind in ("real", "atom_constant_real"):
        u = u.real.astype(complex)
    if kind in ("atom_constant", "atom_constant_real"):
        per_atom = rng.standard_normal(p.atom_count) + (
            0.0 if kind == "atom_constant_real" else 1j * rng.standard_normal(p.atom_count)
        )
        u = per_atom[p.atom_of].astype(complex)
    if kind == "zero_mean":
        u = u - cond_exp(MFunction(u), p, sp).values

    return WeightedCondExpOperator(space=sp, partition=p, symbol=MFunction(u))
