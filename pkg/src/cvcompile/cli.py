r"""Command-line surface: decompose, verify, count, table1, kerr.

Exit codes: 0 success, 1 internal error, 2 ineligible target, 3 verification
tolerance failure.  Diagnostics go to stderr; data to stdout or --out.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import DEFAULT_HBAR
from .algebra import QuadPoly
from .circuit import Circuit, count_gates
from .commutator import ApproximationBudget, IneligibleTerm, UnsynthesizableFactor, compile_approximate
from .exact import DecompositionReport, IneligibleTarget, MonomialTarget, synthesize_product
from .fock import circuit_unitary, compare, photon_shell_indices, unitary_of
from .gaussian import QuadraticHamiltonian, compile_gaussian
from .kerr import DrivenKerrParams, FrameParams, cubic_residual, effective_hamiltonian, solve_cancellation
from .parsing import ParseError, parse
from .table import build_table, format_table


def _emit(data: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data + ("\n" if not data.endswith("\n") else ""))


def _target_is_quadratic(spec) -> bool:
    return spec.poly().degree() <= 2


def _quadratic_hamiltonian_of(poly: QuadPoly, hbar: float) -> QuadraticHamiltonian:
    from .commutator import _quadratic_of

    return _quadratic_of(poly, 1.0, hbar)


def cmd_decompose(args) -> int:
    try:
        spec = parse(args.target)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    hbar = args.hbar
    method = args.method
    try:
        if method == "auto":
            if _target_is_quadratic(spec):
                method = "gaussian"
            elif spec.is_monomial_product():
                coeff, exps, basis = spec.monomial()
                probe = MonomialTarget(exps, 1.0, basis)
                from .exact import classic_eligible, generalized_eligible

                if classic_eligible(probe)[0]:
                    method = "exact"
                elif generalized_eligible(probe)[0]:
                    method = "exact-generalized"
                else:
                    method = "commutator"
            else:
                method = "commutator"
        if method == "gaussian":
            if not _target_is_quadratic(spec):
                print("gaussian method needs a generator of degree <= 2", file=sys.stderr)
                return 2
            h = _quadratic_hamiltonian_of(spec.poly() * Fraction(args.t).limit_denominator(10**12), hbar)
            circ = compile_gaussian(h, hbar)
            report = DecompositionReport(circ, count_gates(circ), 0.0, "gaussian")
        elif method in ("exact", "exact-generalized"):
            if not spec.is_monomial_product():
                print("exact methods take a single product of quadrature powers", file=sys.stderr)
                return 2
            coeff, exps, basis = spec.monomial()
            target = MonomialTarget(exps, float(coeff) * args.t, basis)
            report = synthesize_product(
                target, "classic" if method == "exact" else "generalized", hbar
            )
        elif method == "commutator":
            budget = ApproximationBudget(epsilon=args.epsilon, t=args.t, K=args.K)
            report = compile_approximate(spec.poly(), budget, hbar)
        else:
            print(f"unknown method {method!r}", file=sys.stderr)
            return 2
    except (IneligibleTarget, IneligibleTerm, UnsynthesizableFactor) as exc:
        print(f"ineligible target: {exc}", file=sys.stderr)
        return 2
    payload = report.to_json(hbar)
    payload["target"] = args.target
    _emit(json.dumps(payload, indent=2), args.out)
    if args.circuit_out:
        with open(args.circuit_out, "w") as fh:
            fh.write(report.circuit.dumps(hbar))
    return 0


def cmd_verify(args) -> int:
    with open(args.circuit) as fh:
        circ = Circuit.from_json(json.load(fh))
    try:
        spec = parse(args.target)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    hbar = args.hbar
    poly = spec.poly()
    if not poly.is_hermitian():
        print("target generator must be Hermitian", file=sys.stderr)
        return 2
    num_modes = max(circ.num_modes, (max(poly.modes()) + 1) if poly.modes() else 1)
    circ.num_modes = num_modes
    u_target = unitary_of(poly, args.t, args.cutoff, hbar, num_modes=num_modes)
    u_circuit = circuit_unitary(circ, args.cutoff, hbar)
    if args.subspace_photons is not None:
        indices = photon_shell_indices(args.cutoff, num_modes, args.subspace_photons)
        rep = compare(u_target, u_circuit, indices=indices)
    else:
        d = args.subspace if args.subspace else args.cutoff // 2
        from .fock import low_level_indices

        rep = compare(u_target, u_circuit, indices=low_level_indices(args.cutoff, num_modes, d))
    _emit(json.dumps(rep.to_json(), indent=2), args.out)
    leak_ok = rep.leakage < 10 * max(rep.distance, 1e-30)
    if rep.distance > args.tol:
        print(f"distance {rep.distance:.3e} above tolerance {args.tol:.3e}", file=sys.stderr)
        return 3
    if not leak_ok:
        print("leakage dominates the comparison; increase the cutoff", file=sys.stderr)
        return 3
    return 0


def cmd_count(args) -> int:
    with open(args.circuit) as fh:
        circ = Circuit.from_json(json.load(fh))
    _emit(json.dumps(count_gates(circ).to_json(), indent=2), args.out)
    return 0


def cmd_table1(args) -> int:
    rows = build_table(args.epsilon, args.hbar)
    if args.json:
        _emit(json.dumps([r.to_json() for r in rows], indent=2), args.out)
    else:
        _emit(format_table(rows), args.out)
    return 0


def cmd_kerr(args) -> int:
    chi = Fraction(args.chi).limit_denominator(10**9)
    lam = Fraction(args.squeeze).limit_denominator(10**9)
    report = cubic_residual(chi, lam, args.y_exponent, args.hbar)
    delta, beta = solve_cancellation(chi, Fraction(report["y"]).limit_denominator(10**9))
    eff = effective_hamiltonian(DrivenKerrParams(chi, delta, beta),
                                FrameParams(lam, Fraction(report["y"]).limit_denominator(10**9)))
    report["effective_terms"] = {
        repr(m): str(c) for m, c in sorted(eff.terms.items(), key=lambda kv: str(kv[0]))
    }
    _emit(json.dumps(report, indent=2), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cvcompile",
                                 description="decompose continuous-variable gates into a universal set")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="compile a target generator into a circuit")
    p.add_argument("target", help="generator expression, e.g. '0.1*x1*x2^2'")
    p.add_argument("--method", default="auto",
                   choices=["gaussian", "exact", "exact-generalized", "commutator", "kerr", "auto"])
    p.add_argument("--t", type=float, default=1.0, help="gate time multiplying the generator")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--hbar", type=float, default=DEFAULT_HBAR)
    p.add_argument("--out", default=None, help="report JSON (embeds the circuit)")
    p.add_argument("--circuit-out", default=None, help="bare circuit JSON")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="compare a circuit against a target generator")
    p.add_argument("circuit", help="circuit JSON path")
    p.add_argument("target", help="generator expression")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--cutoff", type=int, default=16)
    p.add_argument("--subspace", type=int, default=None,
                   help="compare on the lowest d levels per mode")
    p.add_argument("--subspace-photons", type=int, default=None,
                   help="compare on total photon number <= k")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--hbar", type=float, default=DEFAULT_HBAR)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="gate-count report for a circuit JSON")
    p.add_argument("circuit")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("table1", help="gate-count comparison across methods")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--hbar", type=float, default=DEFAULT_HBAR)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("kerr", help="driven-Kerr effective-Hamiltonian report")
    p.add_argument("--chi", type=float, default=1.0)
    p.add_argument("--squeeze", type=float, default=8.0, help="squeeze scale lambda")
    p.add_argument("--y-exponent", type=int, default=3, help="y = lambda^q")
    p.add_argument("--hbar", type=float, default=DEFAULT_HBAR)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_kerr)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # pragma: no cover - internal-error path
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
