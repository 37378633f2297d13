"""The weighted conditional expectation operator f -> E(u f).

Everything the closed-form theory says about this operator is computed
here from the symbol u and its atom averages: the adjoint, the
self-adjoint / normal / quasinormal classification, the polar
decomposition, the spectrum, densely-defined verdicts on countable
spaces, and the domain-invariance constant.  The dense-matrix ground
truth lives in :mod:`wcelab.oracle` and never reuses these formulas.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

import numpy as np

from .condexp import atom_averages, cond_exp, is_A_measurable
from .measure import (
    TRUNCATION_CAP,
    CountableSpaceSpec,
    FiniteMeasureSpace,
    MFunction,
    Partition,
    ess_range,
    support,
)

__all__ = [
    "WeightedCondExpOperator",
    "ClassificationReport",
    "PolarParts",
    "SpectrumReport",
    "DomainReport",
    "InternalInconsistencyError",
    "UndecidableDomainError",
    "apply",
    "apply_adjoint",
    "classify",
    "polar",
    "apply_modulus",
    "apply_isometry",
    "spectrum_formula",
    "densely_defined",
    "domain_invariance_min_c",
    "multiplication_domain_min_c",
]


class InternalInconsistencyError(RuntimeError):
    """A verdict ordering that theory forbids was produced."""


class UndecidableDomainError(RuntimeError):
    """A countable spec supplied neither a convergence nor a divergence certificate."""


@dataclass(frozen=True)
class WeightedCondExpOperator:
    """The triple (space, partition, symbol) defining f -> E(u f).

    The atom averages E(u) and E(|u|^2) are cached at construction; they
    always equal the averages recomputed from scratch.
    """

    space: FiniteMeasureSpace
    partition: Partition
    symbol: MFunction
    symbol_mean: MFunction = field(init=False)
    symbol_sq_mean: MFunction = field(init=False)

    def __post_init__(self):
        self.symbol.check_aligned(self.space)
        self.partition.check_aligned(self.space)
        object.__setattr__(
            self, "symbol_mean", cond_exp(self.symbol, self.partition, self.space)
        )
        sq = MFunction(np.abs(self.symbol.values) ** 2)
        object.__setattr__(
            self, "symbol_sq_mean", cond_exp(sq, self.partition, self.space)
        )

    @property
    def n(self) -> int:
        return self.space.n

    def with_symbol(self, symbol: MFunction) -> "WeightedCondExpOperator":
        return WeightedCondExpOperator(self.space, self.partition, symbol)


def apply(T: WeightedCondExpOperator, f: MFunction) -> MFunction:
    """T f = E(u f)."""
    f.check_aligned(T.space)
    return cond_exp(MFunction(T.symbol.values * f.values), T.partition, T.space)


def apply_adjoint(T: WeightedCondExpOperator, f: MFunction) -> MFunction:
    """T* f = conj(u) E(f)."""
    f.check_aligned(T.space)
    ef = cond_exp(f, T.partition, T.space)
    return MFunction(np.conj(T.symbol.values) * ef.values)


@dataclass(frozen=True)
class ClassificationReport:
    self_adjoint: bool
    normal: bool
    quasinormal: bool
    residuals: dict[str, float]
    witnesses: dict[str, int | None]
    quasinormal_source: str  # "formula" or "oracle"

    def __post_init__(self):
        if (self.self_adjoint and not self.normal) or (
            self.normal and not self.quasinormal
        ):
            raise InternalInconsistencyError(
                f"verdict ordering violated: sa={self.self_adjoint} "
                f"normal={self.normal} quasi={self.quasinormal}"
            )


def classify(T: WeightedCondExpOperator, tol: float) -> ClassificationReport:
    """Self-adjoint / normal / quasinormal verdicts with residuals.

    Normality holds iff the symbol is atom-constant; self-adjointness
    additionally needs a real symbol.  Quasinormality is the pointwise test
    conj(u) E(u) = E(|u|^2) on the common support of E(u) and E(|u|^2)
    when those supports coincide; when they differ the verdict is
    delegated to the dense commutator residual ||M |M|^2 - |M|^2 M||_F.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    meas = is_A_measurable(T.symbol, T.partition, T.space, tol)
    normal = meas.measurable
    imag_abs = np.abs(T.symbol.values.imag)
    worst_imag = int(np.argmax(imag_abs))
    self_adjoint = normal and bool(imag_abs[worst_imag] <= tol)

    residuals = {
        "atom_deviation": meas.max_deviation,
        "max_imag": float(imag_abs[worst_imag]),
    }
    witnesses: dict[str, int | None] = {
        "normal": None if normal else meas.worst_atom,
        "self_adjoint": None if self_adjoint else worst_imag,
        "quasinormal": None,
    }

    s_mean = support(T.symbol_mean, tol)
    s_sq = support(T.symbol_sq_mean, tol)
    if s_mean == s_sq:
        source = "formula"
        if s_sq:
            idx = np.fromiter(s_sq, dtype=int)
            gap = np.abs(
                np.conj(T.symbol.values[idx]) * T.symbol_mean.values[idx]
                - T.symbol_sq_mean.values[idx]
            )
            worst = int(np.argmax(gap))
            residuals["quasinormal_gap"] = float(gap[worst])
            quasinormal = bool(gap[worst] <= tol)
            if not quasinormal:
                witnesses["quasinormal"] = int(idx[worst])
        else:
            residuals["quasinormal_gap"] = 0.0
            quasinormal = True
    else:
        # supports of E(u) and E(|u|^2) differ: the closed-form criterion
        # does not apply, fall back on the dense commutator test
        from .oracle import matrix_of

        source = "oracle"
        M = matrix_of(T)
        G = M.conj().T @ M
        res = float(np.linalg.norm(M @ G - G @ M))
        norm = float(np.linalg.norm(M))
        residuals["quasinormal_commutator"] = res
        quasinormal = bool(res <= tol * max(norm, 1e-300) ** 3)

    return ClassificationReport(
        self_adjoint=self_adjoint,
        normal=normal,
        quasinormal=quasinormal,
        residuals=residuals,
        witnesses=witnesses,
        quasinormal_source=source,
    )


@dataclass(frozen=True)
class PolarParts:
    """Symbols of the polar factors of T = (partial isometry) * (modulus).

    ``modulus_symbol`` w satisfies |T| f = w * E(u f);
    ``isometry_symbol`` v satisfies U f = E(v f).  Both vanish off the
    support of E(|u|^2).
    """

    modulus_symbol: MFunction
    isometry_symbol: MFunction
    support_set: frozenset[int]


def polar(T: WeightedCondExpOperator, tol: float) -> PolarParts:
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = support(T.symbol_sq_mean, tol)
    mask = np.zeros(T.n, dtype=bool)
    if s:
        mask[np.fromiter(s, dtype=int)] = True
    inv_sqrt = np.zeros(T.n, dtype=float)
    inv_sqrt[mask] = 1.0 / np.sqrt(T.symbol_sq_mean.values[mask].real)
    modulus = np.where(mask, inv_sqrt * np.conj(T.symbol.values), 0.0 + 0.0j)
    isometry = np.where(mask, inv_sqrt * T.symbol.values, 0.0 + 0.0j)
    return PolarParts(
        modulus_symbol=MFunction(modulus),
        isometry_symbol=MFunction(isometry),
        support_set=s,
    )


def apply_modulus(T: WeightedCondExpOperator, parts: PolarParts, f: MFunction) -> MFunction:
    """|T| f = modulus_symbol * E(u f)."""
    return MFunction(parts.modulus_symbol.values * apply(T, f).values)


def apply_isometry(T: WeightedCondExpOperator, parts: PolarParts, f: MFunction) -> MFunction:
    """U f = E(isometry_symbol * f)."""
    f.check_aligned(T.space)
    return cond_exp(
        MFunction(parts.isometry_symbol.values * f.values), T.partition, T.space
    )


@dataclass(frozen=True)
class SpectrumReport:
    values: tuple[complex, ...]
    includes_zero: bool
    source: str  # "formula" or "oracle"


def spectrum_formula(T: WeightedCondExpOperator, tol: float) -> SpectrumReport:
    """Closed-form spectrum.

    With singleton atoms the operator is plain multiplication by u and the
    spectrum is the essential range of u.  With any coarser partition the
    spectrum is the essential range of E(u) together with 0.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if T.partition.is_singletons:
        values = ess_range(T.symbol, T.space, tol)
        includes_zero = any(abs(v) <= tol for v in values)
    else:
        values = ess_range(T.symbol_mean, T.space, tol)
        if not any(abs(v) <= tol for v in values):
            values = sorted(values + [0.0 + 0.0j], key=lambda z: (z.real, z.imag))
        includes_zero = True
    return SpectrumReport(
        values=tuple(values), includes_zero=includes_zero, source="formula"
    )


@dataclass(frozen=True)
class AtomDomainVerdict:
    converges: bool
    sq_mean: float | None  # E(|u|^2) on the atom when it converges
    partial_sum: float
    tail_bound: float | None
    terms_used: int


@dataclass(frozen=True)
class DomainReport:
    densely_defined: bool
    per_atom: dict[Hashable, AtomDomainVerdict]
    sigma_finite_restriction: bool
    tail_tol: float

    @property
    def verdicts_agree(self) -> bool:
        return self.densely_defined == self.sigma_finite_restriction


_DIVERGENCE_TARGETS = (1e3, 1e6, 1e12)


def _scan_length(spec: CountableSpaceSpec, tail_tol: float) -> int:
    if spec.weighted_tail_bound is None:
        return 0
    for n in range(1, TRUNCATION_CAP + 1):
        if spec.weighted_tail_bound(n) <= tail_tol:
            return n
    raise UndecidableDomainError(
        f"weighted tail bound never reached {tail_tol} within {TRUNCATION_CAP} indices"
    )


def densely_defined(spec: CountableSpaceSpec, tail_tol: float) -> DomainReport:
    """Decide whether f -> E(u f) is densely defined on a countable space.

    Per atom, convergence of sum mu_i |u_i|^2 is certified by the spec's
    weighted tail bound; divergence must come with an explicit witness
    (partial sums provably exceeding escalating targets).  Atoms with
    neither certificate are an error, never a guess.  The sigma-finiteness
    of the measure with density E(|u|^2) restricted to the sub-algebra is
    decided independently from the per-atom masses.
    """
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    scan = _scan_length(spec, tail_tol) if spec.weighted_tail_bound else 0
    tail = spec.weighted_tail_bound(scan) if spec.weighted_tail_bound else None

    # weighted partial sums and masses per atom over the scanned range
    sums: dict[Hashable, float] = {}
    masses: dict[Hashable, float] = {}
    counts: dict[Hashable, int] = {}
    for i in range(scan):
        a = spec.atom_of(i)
        term = spec.mass_at(i) * abs(spec.symbol_at(i)) ** 2
        sums[a] = sums.get(a, 0.0) + term
        masses[a] = masses.get(a, 0.0) + spec.mass_at(i)
        counts[a] = counts.get(a, 0) + 1

    per_atom: dict[Hashable, AtomDomainVerdict] = {}
    for a, witness in spec.divergent_atoms.items():
        partial, used = _verify_divergence(spec, a, witness)
        per_atom[a] = AtomDomainVerdict(
            converges=False,
            sq_mean=None,
            partial_sum=partial,
            tail_bound=None,
            terms_used=used,
        )

    if spec.weighted_tail_bound is None and not per_atom:
        raise UndecidableDomainError(
            "spec carries neither a weighted tail bound nor divergence witnesses"
        )

    for a, s in sums.items():
        if a in per_atom:
            continue
        if spec.weighted_tail_bound is None:
            raise UndecidableDomainError(
                f"atom {a!r} has no convergence or divergence certificate"
            )
        per_atom[a] = AtomDomainVerdict(
            converges=True,
            sq_mean=(s + tail) / masses[a] if masses[a] > 0 else 0.0,
            partial_sum=s,
            tail_bound=tail,
            terms_used=counts[a],
        )

    dense = all(v.converges for v in per_atom.values())
    sigma_finite = _sigma_finite_restriction(spec, per_atom, tail)
    return DomainReport(
        densely_defined=dense,
        per_atom=per_atom,
        sigma_finite_restriction=sigma_finite,
        tail_tol=tail_tol,
    )


def _verify_divergence(spec, atom, witness) -> tuple[float, int]:
    """Check a divergence witness by direct summation; returns last partial sum."""
    partial = 0.0
    done = 0
    for target in _DIVERGENCE_TARGETS:
        upto = witness(target)
        if upto > TRUNCATION_CAP:
            raise UndecidableDomainError(
                f"divergence witness for atom {atom!r} exceeds iteration cap"
            )
        for i in range(done, upto + 1):
            if spec.atom_of(i) == atom:
                partial += spec.mass_at(i) * abs(spec.symbol_at(i)) ** 2
        done = upto + 1
        if partial < target:
            raise UndecidableDomainError(
                f"divergence witness for atom {atom!r} failed: partial sum "
                f"{partial} below target {target}"
            )
    return partial, done


def _sigma_finite_restriction(spec, per_atom, tail) -> bool:
    """Sigma-finiteness of the E(|u|^2)-density measure on the sub-algebra.

    The minimal sub-algebra sets are the atoms, so an exhaustion by sets of
    finite measure exists iff every atom carries finite weighted mass:
    an atom of infinite mass can never be covered.
    """
    for verdict in per_atom.values():
        if not verdict.converges:
            return False
        # finite weighted mass of the atom: bounded partial sum plus tail
        if tail is not None and not np.isfinite(verdict.partial_sum + tail):
            return False
    return True


def domain_invariance_min_c(T: WeightedCondExpOperator) -> float:
    """Minimal c with |E(u)|^4 <= c (1 + |E(u)|^2) at every point."""
    a = np.abs(T.symbol_mean.values) ** 2
    return float(np.max(a**2 / (1.0 + a)))


def multiplication_domain_min_c(f: MFunction) -> float:
    """Minimal c with |f|^4 <= c (1 + |f|^2); the singleton-atom variant."""
    a = np.abs(f.values) ** 2
    return float(np.max(a**2 / (1.0 + a)))
