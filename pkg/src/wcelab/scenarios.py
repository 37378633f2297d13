"""Named scenario builders and the space-description file format.

Builders are deterministic: identical parameters produce bit-identical
spaces.  The symmetric-interval scenario uses symmetric midpoint nodes so
that the pair-averaging projection is exact at the nodes and hyperbolic
identities can be checked at 1e-12 rather than at quadrature order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .measure import (
    CountableSpaceSpec,
    FiniteMeasureSpace,
    MFunction,
    Partition,
    truncate,
)

__all__ = [
    "Scenario",
    "ScenarioParameterError",
    "SpaceFileError",
    "build_full_algebra",
    "build_trivial_algebra",
    "build_block_partition",
    "build_product_grid",
    "build_symmetric_interval",
    "build_poisson_parity",
    "build_geometric_blowup",
    "poisson_parity_spec",
    "geometric_blowup_spec",
    "load_space_file",
    "build_scenario",
    "SCENARIO_BUILDERS",
]


class ScenarioParameterError(ValueError):
    """Invalid scenario parameters."""


class SpaceFileError(ValueError):
    """A space-description file violated the schema."""


@dataclass(frozen=True)
class Scenario:
    name: str
    parameters: dict[str, float | int]
    space: FiniteMeasureSpace
    partition: Partition
    symbol: MFunction
    countable_spec: CountableSpaceSpec | None = field(default=None, repr=False)


def _default_symbol(n: int) -> np.ndarray:
    return np.arange(1, n + 1, dtype=complex)


def build_full_algebra(n: int, symbol: np.ndarray | None = None) -> Scenario:
    """Singleton atoms: the averaging projection is the identity and the
    operator is plain multiplication by the symbol."""
    if n < 1:
        raise ScenarioParameterError("n must be >= 1")
    u = _default_symbol(n) if symbol is None else np.asarray(symbol, dtype=complex)
    return Scenario(
        name="full-algebra",
        parameters={"n": n},
        space=FiniteMeasureSpace(np.full(n, 1.0 / n)),
        partition=Partition(np.arange(n)),
        symbol=MFunction(u),
    )


def build_trivial_algebra(n: int, symbol: np.ndarray | None = None) -> Scenario:
    """One atom: the operator maps f to the constant mean of u*f (rank <= 1)."""
    if n < 1:
        raise ScenarioParameterError("n must be >= 1")
    u = _default_symbol(n) if symbol is None else np.asarray(symbol, dtype=complex)
    return Scenario(
        name="trivial-algebra",
        parameters={"n": n},
        space=FiniteMeasureSpace(np.full(n, 1.0 / n)),
        partition=Partition(np.zeros(n, dtype=int)),
        symbol=MFunction(u),
    )


def build_block_partition(
    n: int,
    m: int,
    masses: np.ndarray | None = None,
    symbol: np.ndarray | None = None,
) -> Scenario:
    """m contiguous atoms over n points."""
    if not 1 <= m <= n:
        raise ScenarioParameterError(f"need 1 <= m <= n, got m={m} n={n}")
    bounds = np.linspace(0, n, m + 1).astype(int)
    atom_of = np.empty(n, dtype=int)
    for a in range(m):
        atom_of[bounds[a] : bounds[a + 1]] = a
    w = np.full(n, 1.0 / n) if masses is None else np.asarray(masses, dtype=float)
    u = _default_symbol(n) if symbol is None else np.asarray(symbol, dtype=complex)
    return Scenario(
        name="block-partition",
        parameters={"n": n, "m": m},
        space=FiniteMeasureSpace(w),
        partition=Partition(atom_of),
        symbol=MFunction(u),
    )


def build_product_grid(
    m: int, symbol_fn: Callable[[float, float], complex] | None = None
) -> Scenario:
    """m x m midpoint grid on the unit square, mass 1/m^2 per point.

    Atoms are the rows of constant first coordinate, so averaging
    integrates out the second coordinate (exactly, for symbols linear in it).
    Default symbol: u(x, y) = y.
    """
    if m < 2:
        raise ScenarioParameterError("m must be >= 2")
    fn = symbol_fn if symbol_fn is not None else (lambda x, y: y)
    xs = (np.arange(m) + 0.5) / m
    labels = np.array([(x, y) for x in xs for y in xs])
    atom_of = np.repeat(np.arange(m), m)
    u = np.array([fn(x, y) for x, y in labels], dtype=complex)
    return Scenario(
        name="product-grid",
        parameters={"m": m},
        space=FiniteMeasureSpace(np.full(m * m, 1.0 / (m * m)), labels=labels),
        partition=Partition(atom_of),
        symbol=MFunction(u),
    )


def build_symmetric_interval(
    N: int, symbol_fn: Callable[[float], complex] | None = None
) -> Scenario:
    """N symmetric midpoint nodes on [-1, 1] with mass 1/N each.

    Atoms pair each node with its mirror image, so averaging is exactly
    (f(x) + f(-x)) / 2 at the nodes.  N must be even (a node at 0 would
    break the mirror pairing).  Default symbol: exp(x).
    """
    if N < 2 or N % 2:
        raise ScenarioParameterError("N must be even and >= 2")
    fn = symbol_fn if symbol_fn is not None else (lambda x: math.exp(x))
    k = np.arange(N)
    x = -1.0 + (k + 0.5) * 2.0 / N
    atom_of = np.minimum(k, N - 1 - k)
    u = np.array([fn(xi) for xi in x], dtype=complex)
    return Scenario(
        name="symmetric-interval",
        parameters={"N": N},
        space=FiniteMeasureSpace(np.full(N, 1.0 / N), labels=x.reshape(-1, 1)),
        partition=Partition(atom_of),
        symbol=MFunction(u),
    )


def _poisson_mass(theta: float, x: int) -> float:
    return math.exp(-theta + x * math.log(theta) - math.lgamma(x + 1))


def poisson_parity_spec(theta: float) -> CountableSpaceSpec:
    """Poisson weights on 0, 1, 2, ... with atoms {0}, odds, evens; u(x) = x.

    Tail bounds are geometric-majorant bounds on the discarded part
    sum_{x >= N}: for x >= N the term ratio of mu_x is at most
    theta / (N + 1), and of x^2 mu_x at most theta (N + 1) / N^2.
    """
    if theta <= 0:
        raise ScenarioParameterError("theta must be positive")

    def tail_bound(N: int) -> float:
        r = theta / (N + 1)
        if r >= 1.0:
            return math.inf
        return _poisson_mass(theta, N) / (1.0 - r)

    def weighted_tail_bound(N: int) -> float:
        if N == 0:
            return weighted_tail_bound(1)  # the x = 0 term vanishes
        r = theta * (N + 1) / N**2
        if r >= 1.0:
            return math.inf
        return N**2 * _poisson_mass(theta, N) / (1.0 - r)

    return CountableSpaceSpec(
        mass_at=lambda i: _poisson_mass(theta, i),
        tail_bound=tail_bound,
        atom_of=lambda i: "zero" if i == 0 else ("odd" if i % 2 else "even"),
        symbol_at=lambda i: complex(i),
        weighted_tail_bound=weighted_tail_bound,
    )


def build_poisson_parity(theta: float, tail_tol: float) -> Scenario:
    """Truncated Poisson-parity scenario.

    The cut uses the weighted tail bound on sum mu_i |u_i|^2 (the symbol
    grows), so the densely-defined evidence survives truncation.
    """
    spec = poisson_parity_spec(theta)
    trunc = truncate(spec, tail_tol, weighted=True)
    return Scenario(
        name="poisson-parity",
        parameters={"theta": theta, "tail_tol": tail_tol},
        space=trunc.space,
        partition=trunc.partition,
        symbol=trunc.symbol,
        countable_spec=spec,
    )


def geometric_blowup_spec() -> CountableSpaceSpec:
    """One atom, mu_i = 2^-i, u_i = 2^i: mass is summable but the weighted
    series sum mu_i |u_i|^2 = sum 2^i diverges, with an explicit witness."""

    def witness(target: float) -> int:
        # partial sum through index N is 2^(N+1) - 1
        return max(0, math.ceil(math.log2(target + 1.0)))

    return CountableSpaceSpec(
        mass_at=lambda i: 2.0 ** (-i),
        tail_bound=lambda N: 2.0 ** (1 - N),  # sum_{i >= N} 2^-i
        atom_of=lambda i: "all",
        symbol_at=lambda i: complex(2.0**i),
        weighted_tail_bound=None,
        divergent_atoms={"all": witness},
    )


def build_geometric_blowup(tail_tol: float = 2.0**-10) -> Scenario:
    spec = geometric_blowup_spec()
    trunc = truncate(spec, tail_tol)
    return Scenario(
        name="geometric-blowup",
        parameters={"tail_tol": tail_tol},
        space=trunc.space,
        partition=trunc.partition,
        symbol=trunc.symbol,
        countable_spec=spec,
    )


_BUILTIN_SYMBOLS = ("exp_label0", "identity_label0", "sign_alternating")


def load_space_file(path: str) -> Scenario:
    """Read a space-description file (JSON).

    Schema: top-level keys ``points`` (records with positive ``weight`` and
    optional ``label`` list), ``atoms`` (lists of zero-based point indices
    that must partition the index range), ``u`` (either ``values``: list of
    [re, im] pairs, or ``builtin``: one of exp_label0 / identity_label0 /
    sign_alternating), optional ``name``.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpaceFileError(f"cannot read space file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpaceFileError("top level must be an object")
    for key in ("points", "atoms", "u"):
        if key not in doc:
            raise SpaceFileError(f"missing required key {key!r}")

    points = doc["points"]
    if not isinstance(points, list) or not points:
        raise SpaceFileError("'points' must be a nonempty list")
    masses = []
    labels = []
    have_labels = None
    for rec in points:
        if not isinstance(rec, dict) or "weight" not in rec:
            raise SpaceFileError("each point needs a 'weight'")
        w = rec["weight"]
        if not isinstance(w, (int, float)) or w <= 0:
            raise SpaceFileError(f"point weight must be positive, got {w!r}")
        masses.append(float(w))
        has = "label" in rec
        if have_labels is None:
            have_labels = has
        elif have_labels != has:
            raise SpaceFileError("either all points carry labels or none do")
        if has:
            labels.append([float(v) for v in rec["label"]])
    n = len(masses)

    atoms = doc["atoms"]
    if not isinstance(atoms, list) or not all(isinstance(b, list) for b in atoms):
        raise SpaceFileError("'atoms' must be a list of index lists")
    atom_of = [-1] * n
    for a, block in enumerate(atoms):
        for i in block:
            if not isinstance(i, int) or not 0 <= i < n:
                raise SpaceFileError(f"atom index {i!r} out of range 0..{n - 1}")
            if atom_of[i] != -1:
                raise SpaceFileError(f"point {i} appears in more than one atom")
            atom_of[i] = a
    if any(a == -1 for a in atom_of):
        missing = [i for i, a in enumerate(atom_of) if a == -1]
        raise SpaceFileError(f"points {missing} not covered by the atom lists")
    if any(not block for block in atoms):
        raise SpaceFileError("empty atoms are not allowed")

    spec_u = doc["u"]
    if not isinstance(spec_u, dict) or ("values" in spec_u) == ("builtin" in spec_u):
        raise SpaceFileError("'u' must carry exactly one of 'values' or 'builtin'")
    if "values" in spec_u:
        vals = spec_u["values"]
        if len(vals) != n:
            raise SpaceFileError(f"'u.values' has {len(vals)} entries for {n} points")
        try:
            u = np.array([complex(re, im) for re, im in vals])
        except (TypeError, ValueError) as exc:
            raise SpaceFileError(f"'u.values' entries must be [re, im] pairs: {exc}")
    else:
        builtin = spec_u["builtin"]
        if builtin not in _BUILTIN_SYMBOLS:
            raise SpaceFileError(
                f"unknown builtin {builtin!r}; choose from {_BUILTIN_SYMBOLS}"
            )
        if builtin == "sign_alternating":
            u = np.array([(-1.0) ** i for i in range(n)], dtype=complex)
        else:
            if not have_labels:
                raise SpaceFileError(f"builtin {builtin!r} needs point labels")
            first = np.array([lab[0] for lab in labels])
            u = np.exp(first).astype(complex) if builtin == "exp_label0" else first.astype(complex)

    return Scenario(
        name=str(doc.get("name", "space-file")),
        parameters={"n": n},
        space=FiniteMeasureSpace(
            np.array(masses), labels=np.array(labels) if have_labels else None
        ),
        partition=Partition(np.array(atom_of)),
        symbol=MFunction(u),
    )


SCENARIO_BUILDERS: dict[str, tuple[Callable[..., Scenario], dict[str, float | int]]] = {
    "full-algebra": (build_full_algebra, {"n": 8}),
    "trivial-algebra": (build_trivial_algebra, {"n": 4}),
    "block-partition": (build_block_partition, {"n": 8, "m": 3}),
    "product-grid": (build_product_grid, {"m": 8}),
    "symmetric-interval": (build_symmetric_interval, {"N": 32}),
    "poisson-parity": (build_poisson_parity, {"theta": 1.0, "tail_tol": 1e-12}),
    "geometric-blowup": (build_geometric_blowup, {}),
}


def build_scenario(name: str, overrides: dict[str, float | int] | None = None) -> Scenario:
    if name not in SCENARIO_BUILDERS:
        raise ScenarioParameterError(
            f"unknown scenario {name!r}; choose from {sorted(SCENARIO_BUILDERS)}"
        )
    builder, defaults = SCENARIO_BUILDERS[name]
    params = dict(defaults)
    for key, value in (overrides or {}).items():
        if key not in defaults:
            raise ScenarioParameterError(
                f"scenario {name!r} takes parameters {sorted(defaults)}, not {key!r}"
            )
        params[key] = value
    # integer parameters stay integers after CLI parsing
    for key, default in defaults.items():
        if isinstance(default, int):
            params[key] = int(params[key])
    return builder(**params)
