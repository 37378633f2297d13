"""Command-line interface.

Exit codes: 0 all checks pass, 1 any check fails, 2 usage or parse error.
Discrepancy entries never affect the exit code; they are counted in the
summary line instead.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .measure import MFunction, NotSummableError
from .operator import (
    UndecidableDomainError,
    WeightedCondExpOperator,
    apply,
    apply_modulus,
    apply_isometry,
    classify,
    densely_defined,
    polar,
    spectrum_formula,
)
from .oracle import matrix_of, psd_sqrt, residuals, spectrum_probe_check
from .sampling import random_operator
from .scenarios import (
    SCENARIO_BUILDERS,
    Scenario,
    ScenarioParameterError,
    SpaceFileError,
    build_scenario,
    load_space_file,
)
from .suite import DEFAULT_TOLERANCES, run_claim_suite

USAGE_ERROR = 2


def _parse_params(items: list[str]) -> dict[str, float]:
    out: dict[str, float] = {}
    for item in items:
        if "=" not in item:
            raise ScenarioParameterError(f"--params entries look like k=v, got {item!r}")
        key, _, value = item.partition("=")
        try:
            out[key] = float(value)
        except ValueError as exc:
            raise ScenarioParameterError(f"cannot parse {item!r}: {exc}") from exc
    return out


def _resolve_scenario(args) -> Scenario:
    if getattr(args, "space_file", None):
        return load_space_file(args.space_file)
    if not args.scenario:
        raise ScenarioParameterError("need --scenario or --space-file")
    return build_scenario(args.scenario, _parse_params(args.params or []))


def _operator_of(sc: Scenario) -> WeightedCondExpOperator:
    return WeightedCondExpOperator(sc.space, sc.partition, sc.symbol)


def _fmt_complex(z: complex) -> str:
    if abs(z.imag) < 1e-15:
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}i"


def cmd_classify(args) -> int:
    sc = _resolve_scenario(args)
    T = _operator_of(sc)
    rep = classify(T, args.tol)
    res = residuals(T)
    print(f"scenario: {sc.name}  (n={T.n}, atoms={T.partition.atom_count})")
    print(f"self-adjoint: {rep.self_adjoint}")
    print(f"normal:       {rep.normal}")
    print(f"quasinormal:  {rep.quasinormal}  (via {rep.quasinormal_source})")
    for name, value in rep.residuals.items():
        print(f"  residual {name}: {value:.3e}")
    print(
        f"  oracle residuals: self-adjoint {res.self_adjoint_rel:.3e}, "
        f"normal {res.normal_rel:.3e}, quasinormal {res.quasinormal_rel:.3e}"
    )
    return 0


def cmd_spectrum(args) -> int:
    sc = _resolve_scenario(args)
    T = _operator_of(sc)
    rep = spectrum_formula(T, args.tol)
    print(f"scenario: {sc.name}  (n={T.n}, atoms={T.partition.atom_count})")
    print(f"spectrum ({len(rep.values)} values, includes_zero={rep.includes_zero}):")
    for v in rep.values:
        print(f"  {_fmt_complex(v)}")
    if args.oracle:
        probe = spectrum_probe_check(T, rep)
        ok = probe.candidates_ok(args.tol) and probe.probes_ok(args.tol)
        print(
            f"oracle check: max candidate sigma_min "
            f"{max(probe.candidate_sigmas):.3e}, probe floor "
            f"{'ok' if probe.probes_ok(args.tol) else 'VIOLATED'}"
        )
        print(f"oracle verdict: {'pass' if ok else 'FAIL'}")
        return 0 if ok else 1
    return 0


def cmd_polar(args) -> int:
    sc = _resolve_scenario(args)
    T = _operator_of(sc)
    parts = polar(T, args.tol)
    n = T.n
    # reconstruction residual on the full basis
    M = matrix_of(T)
    sqrt_m = np.sqrt(T.space.masses)
    U_mat = np.empty((n, n), dtype=complex)
    A_mat = np.empty((n, n), dtype=complex)
    for i in range(n):
        basis = np.zeros(n, dtype=complex)
        basis[i] = 1.0 / sqrt_m[i]
        U_mat[:, i] = apply_isometry(T, parts, MFunction(basis)).values * sqrt_m
        A_mat[:, i] = apply_modulus(T, parts, MFunction(basis)).values * sqrt_m
    recon = float(np.linalg.norm(U_mat @ A_mat - M))
    sqrt_err = float(np.linalg.norm(A_mat - psd_sqrt(M.conj().T @ M)))
    norm = float(np.linalg.norm(M))
    print(f"scenario: {sc.name}  (n={n})")
    print(f"support size of mean-square symbol: {len(parts.support_set)} of {n}")
    print(f"reconstruction residual ||U|T| - T||_F: {recon:.3e}")
    print(f"modulus-vs-psd-sqrt residual:           {sqrt_err:.3e}")
    ok = recon <= 1e-10 * max(norm, 1e-300) and sqrt_err <= 1e-8 * max(norm, 1e-300)
    print(f"verdict: {'pass' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_domain(args) -> int:
    sc = build_scenario(args.scenario, {})
    if sc.countable_spec is None:
        print(f"scenario {sc.name!r} has no countable description", file=sys.stderr)
        return USAGE_ERROR
    if args.scenario == "poisson-parity":
        from .scenarios import poisson_parity_spec

        spec = poisson_parity_spec(args.theta)
    else:
        spec = sc.countable_spec
    rep = densely_defined(spec, args.tail_tol)
    print(f"scenario: {args.scenario}")
    print(f"densely defined:            {rep.densely_defined}")
    print(f"sigma-finite restriction:   {rep.sigma_finite_restriction}")
    print(f"verdicts agree:             {rep.verdicts_agree}")
    for atom, v in sorted(rep.per_atom.items(), key=lambda kv: str(kv[0])):
        if v.converges:
            print(
                f"  atom {atom!r}: converges, mean-square symbol "
                f"{v.sq_mean:.12g} (partial sum {v.partial_sum:.6g}, "
                f"tail bound {v.tail_bound:.3e}, {v.terms_used} terms)"
            )
        else:
            print(
                f"  atom {atom!r}: diverges (witnessed partial sum "
                f"{v.partial_sum:.6g} over {v.terms_used} terms)"
            )
    return 0 if rep.verdicts_agree else 1


def cmd_suite(args) -> int:
    tols = dict(DEFAULT_TOLERANCES)
    if args.tol is not None:
        tols["identity"] = args.tol
    if args.tol_oracle is not None:
        tols["oracle"] = args.tol_oracle
    if args.tol_exact is not None:
        tols["exact"] = args.tol_exact
    report = run_claim_suite(tolerances=tols)
    if args.format == "json":
        print(report.to_json())
    else:
        print(report.format_text())
    return 0 if report.all_ok else 1


def cmd_oracle_check(args) -> int:
    failures = 0
    for seed in range(args.seeds):
        rng = np.random.default_rng(seed)
        T = random_operator(rng, max_n=args.max_n)
        rep = classify(T, args.tol)
        sa, nrm, qn = residuals(T).verdicts(args.tol)
        ok = (rep.self_adjoint, rep.normal, rep.quasinormal) == (sa, nrm, qn)
        # polar reconstruction on a random vector
        parts = polar(T, args.tol)
        f = MFunction(
            rng.standard_normal(T.n) + 1j * rng.standard_normal(T.n)
        )
        lhs = apply_isometry(T, parts, apply_modulus(T, parts, f))
        rhs = apply(T, f)
        scale = max(float(np.linalg.norm(rhs.values)), 1.0)
        polar_ok = np.linalg.norm(lhs.values - rhs.values) <= 1e-9 * scale
        if not (ok and polar_ok):
            failures += 1
            print(
                f"seed {seed}: MISMATCH classify={rep.self_adjoint, rep.normal, rep.quasinormal} "
                f"oracle={sa, nrm, qn} polar_ok={polar_ok}"
            )
    print(f"oracle-check: {args.seeds - failures}/{args.seeds} instances consistent")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wcelab",
        description=(
            "numerical laboratory for weighted conditional expectation "
            "operators on discretized measure spaces"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scenario_opts(p, tol_default=1e-8):
        p.add_argument("--scenario", choices=sorted(SCENARIO_BUILDERS))
        p.add_argument("--params", nargs="*", metavar="k=v")
        p.add_argument("--space-file", dest="space_file", metavar="PATH")
        p.add_argument("--tol", type=float, default=tol_default)

    p = sub.add_parser("classify", help="self-adjoint / normal / quasinormal verdicts")
    add_scenario_opts(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("spectrum", help="closed-form spectrum, optionally oracle-checked")
    add_scenario_opts(p)
    p.add_argument("--oracle", action="store_true")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("polar", help="polar decomposition and its residuals")
    add_scenario_opts(p)
    p.set_defaults(func=cmd_polar)

    p = sub.add_parser("domain", help="densely-defined verdict on a countable space")
    p.add_argument(
        "--scenario",
        choices=["poisson-parity", "geometric-blowup"],
        default="poisson-parity",
    )
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--tail-tol", dest="tail_tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_domain)

    p = sub.add_parser("suite", help="run the full claims verification suite")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--tol", type=float, default=None, help="identity tolerance")
    p.add_argument("--tol-oracle", dest="tol_oracle", type=float, default=None)
    p.add_argument("--tol-exact", dest="tol_exact", type=float, default=None)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("oracle-check", help="randomized formula-vs-oracle cross-validation")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--max-n", dest="max_n", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors already
        raise exc
    try:
        return args.func(args)
    except (ScenarioParameterError, SpaceFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (NotSummableError, UndecidableDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
