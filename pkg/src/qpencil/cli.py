"""Command-line front end.

Subcommands ``forward``, ``spectrum``, ``invert``, ``roundtrip``, ``verify`` and
``eval`` read and write the JSON formats of the library.  Exit codes:

== =====================================================
0  success
1  a numerical check failed or an unexpected pencil error
2  unreadable input or invalid configuration
3  divergence suspected in the coefficient tables
4  the eigenvalue search could not isolate the zeros
5  degenerate spectral data (vanishing diagonal)
6  no usable source for beta
== =====================================================
"""

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import oracle
from ._jsonio import cpair, dumps, write_json
from .errors import (
    ContourThroughPole,
    DivergenceSuspected,
    GenericityFailure,
    NoBetaSource,
    NonConvergence,
    NonPhysicalBeta,
    PencilError,
    SpectralDataError,
)
from .inverse import invert
from .potential import FourierPotential, random_potential
from .solutions import FundamentalSystem, SolutionKind
from .spectral import SpectralData, assemble_spectral_data

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_CONTOUR = 4
EXIT_GENERICITY = 5
EXIT_BETA = 6

ROUNDTRIP_TOL = 1e-6
POLE_SCAN_TOL = 1e-3
VERIFY_TOL = 1e-6
RADIUS_RETRIES = (1.0, 0.987, 1.013)


class ConfigError(Exception):
    pass


def _load_potential(path):
    try:
        return FourierPotential.load(path)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise ConfigError(f"cannot read potential {path}: {exc}") from exc


def _load_spectral(path):
    try:
        return SpectralData.load(path)
    except OSError as exc:
        raise ConfigError(f"cannot read spectral data {path}: {exc}") from exc
    except SpectralDataError as exc:
        raise ConfigError(str(exc)) from exc


def _check_config(args):
    if getattr(args, "order", 1) < 1:
        raise ConfigError("--order must be at least 1")
    if getattr(args, "radius", 1.0) <= 0:
        raise ConfigError("--radius must be positive")
    N = getattr(args, "inverse_order", None)
    if N is not None:
        if N < 1:
            raise ConfigError("--inverse-order must be at least 1")
        if hasattr(args, "order") and N > args.order:
            raise ConfigError("--inverse-order must not exceed --order")


def _emit(args, report):
    if getattr(args, "out", None):
        write_json(args.out, report)


def _spectrum_with_retries(pot, M, R, N, include_beta, system=None):
    """The eigenvalue search, retried on slightly different radii."""
    last = None
    for factor in RADIUS_RETRIES:
        try:
            return assemble_spectral_data(pot, M, R * factor, N, include_beta, system)
        except (ContourThroughPole, NonConvergence) as exc:
            last = exc
    raise last


def cmd_forward(args):
    pot = _load_potential(args.potential)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DivergenceSuspected)
        system = FundamentalSystem.build(pot, args.order)
    prefix = args.out or str(Path(args.potential).with_suffix("")) + "_vtable"
    for vt in (system.f1_plus, system.f1_minus):
        name = f"{prefix}_{'plus' if vt.sign == '+' else 'minus'}.json"
        write_json(name, vt.to_dict())
        print(f"{vt.sign} table: M={vt.M} growth={vt.growth:.3g} last column={vt.tail:.3g} -> {name}")
    if system.f1_plus.diverging or system.f1_minus.diverging:
        print("divergence suspected: the tables do not settle by the last column")
        return EXIT_DIVERGENCE
    return EXIT_OK


def cmd_spectrum(args):
    pot = _load_potential(args.potential)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DivergenceSuspected)
        system = FundamentalSystem.build(pot, args.order)
    if system.diverging:
        print("warning: divergence suspected in the coefficient tables")
    sd = _spectrum_with_retries(pot, args.order, args.radius, args.inverse_order,
                                args.include_beta, system)
    out = args.out or "spectral.json"
    sd.save(out)
    counts = [sum(1 for e in sd.eigenvalues if e[0] == k) for k in range(4)]
    print(f"eigenvalues per sector {counts}; {len(sd.circles)} circles -> {out}")
    return EXIT_OK


def cmd_invert(args):
    sd = _load_spectral(args.spectral)
    N = args.inverse_order or sd.order
    if N > sd.order:
        raise ConfigError(f"spectral data have order {sd.order}, {N} requested")
    pot, report = invert(sd, N)
    out = args.out or "recovered.json"
    pot.save(out)
    rep = report.to_dict()
    rep_path = args.report or str(Path(out).with_suffix("")) + "_report.json"
    write_json(rep_path, rep)
    print(f"recovered N={N} beta={pot.beta:.12g} ({report.beta_method}) -> {out}")
    return EXIT_OK


def _relative_errors(true, got):
    true = np.asarray(true, dtype=complex)
    got = np.asarray(got, dtype=complex)
    n = max(len(true), len(got))
    t = np.zeros(n, dtype=complex)
    g = np.zeros(n, dtype=complex)
    t[:len(true)] = true
    g[:len(got)] = got
    err = np.abs(g - t)
    nz = np.abs(t) > 0
    err[nz] /= np.abs(t[nz])
    return [float(e) for e in err]


def roundtrip(pot, M=32, R=6.0, N=None):
    """Forward map followed by inversion; returns ``(report, exit_code)``."""
    N = max(pot.N, 1) if N is None else N
    report = {"input": pot.to_dict(), "order": M, "inverse_order": N, "radius": R}
    try:
        sd = _spectrum_with_retries(pot, M, R, N, False)
        rec, rep = invert(sd, N)
    except GenericityFailure as exc:
        report["error"] = str(exc)
        report["note"] = "degenerate spectral data: no potential is reconstructed"
        return report, EXIT_GENERICITY
    pe = _relative_errors(pot.p, rec.p[:N] if rec.N else [])
    qe = _relative_errors(pot.q, rec.q[:N] if rec.N else [])
    beta_err = abs(rec.beta - pot.beta) / pot.beta
    beta_tol = ROUNDTRIP_TOL if rep.beta_method == "eigenvalue" else POLE_SCAN_TOL
    ok = max(pe + qe, default=0.0) <= ROUNDTRIP_TOL and beta_err <= beta_tol
    report.update(
        {
            "recovered": rec.to_dict(),
            "p_errors": pe,
            "q_errors": qe,
            "beta_error": beta_err,
            "beta_method": rep.beta_method,
            "beta_tolerance": beta_tol,
            "eigenvalue_count": len(sd.eigenvalues),
            "recovery": rep.to_dict(),
            "passed": bool(ok),
        }
    )
    return report, EXIT_OK if ok else EXIT_FAILED


def cmd_roundtrip(args):
    if args.random is not None:
        rng = np.random.default_rng(args.seed)
        pot = random_potential(rng, args.random, args.amplitude)
    elif args.potential:
        pot = _load_potential(args.potential)
    else:
        raise ConfigError("give a potential file or --random N")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DivergenceSuspected)
        report, code = roundtrip(pot, args.order, args.radius, args.inverse_order)
    _emit(args, report)
    if "error" in report:
        print(report["note"])
    else:
        worst = max(report["p_errors"] + report["q_errors"], default=0.0)
        print(f"worst coefficient error {worst:.3e}; beta error {report['beta_error']:.3e} "
              f"({report['beta_method']}); {'pass' if report['passed'] else 'FAIL'}")
    return code


def verify(pot, M=32, lambdas=oracle.STANDARD_LAMBDAS, tol=VERIFY_TOL):
    """Oracle suite on the standard grid; returns ``(report, passed)``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DivergenceSuspected)
        system = FundamentalSystem.build(pot, M)
    report = {
        "divergence_suspected": bool(system.diverging),
        "tables": {
            k.value: {"growth": system.table(k).growth, "last_column": system.table(k).tail}
            for k in SolutionKind
        },
        "solutions": [],
        "connections": [],
    }
    ok = not system.diverging
    for lam in lambdas:
        for kind in SolutionKind:
            try:
                r = oracle.verify_solution(pot, kind, lam, system=system).to_dict()
                ok &= max(r["ode_residual"], r["propagation_mismatch"],
                          r["quasi_periodicity_defect"]) <= tol
            except PencilError as exc:
                r = {"kind": kind.value, "lam": cpair(lam), "error": str(exc)}
                ok = False
            report["solutions"].append(r)
        try:
            c = oracle.verify_connection(pot, lam, system=system).to_dict()
            ok &= max(c["positive_defect"], c["negative_defect"]) <= tol
        except PencilError as exc:
            c = {"lam": cpair(lam), "error": str(exc)}
            ok = False
        report["connections"].append(c)
    report["passed"] = bool(ok)
    return report, ok


def cmd_verify(args):
    pot = _load_potential(args.potential)
    report, ok = verify(pot, args.order)
    _emit(args, report)
    if report["divergence_suspected"]:
        print("divergence suspected: the coefficient tables do not settle")
    worst = 0.0
    for r in report["solutions"]:
        if "error" not in r:
            worst = max(worst, r["ode_residual"], r["propagation_mismatch"], r["quasi_periodicity_defect"])
    for c in report["connections"]:
        if "error" not in c:
            worst = max(worst, c["positive_defect"], c["negative_defect"])
    print(f"worst oracle defect {worst:.3e}; {'pass' if ok else 'FAIL'}")
    if report["divergence_suspected"]:
        return EXIT_DIVERGENCE
    return EXIT_OK if ok else EXIT_FAILED


def cmd_eval(args):
    pot = _load_potential(args.potential)
    system = FundamentalSystem.build(pot, args.order)
    lam = complex(args.lam[0], args.lam[1])
    rows = []
    for x in args.x:
        s = system.evaluate(args.kind, lam, x)
        rows.append({"x": x, "value": cpair(s.value), "derivative": cpair(s.derivative)})
    out = {"kind": args.kind, "lambda": cpair(lam), "samples": rows}
    _emit(args, out)
    sys.stdout.write(dumps(out))
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="qpencil", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, inverse=True, radius=True):
        p.add_argument("--order", type=int, default=32, help="truncation order M")
        if inverse:
            p.add_argument("--inverse-order", type=int, default=None,
                           help="order N of the spectral data / inversion")
        if radius:
            p.add_argument("--radius", type=float, default=6.0, help="eigenvalue search radius R")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)

    p = sub.add_parser("forward", help="coefficient tables of both signs")
    p.add_argument("potential")
    common(p, inverse=False, radius=False)
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("spectrum", help="spectral data of a potential")
    p.add_argument("potential")
    common(p)
    p.add_argument("--include-beta", action="store_true", help="store beta as a hint")
    p.set_defaults(func=cmd_spectrum, inverse_order=None)

    p = sub.add_parser("invert", help="recover a potential from spectral data")
    p.add_argument("spectral")
    common(p, radius=False)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("roundtrip", help="spectrum then inversion, in memory")
    p.add_argument("potential", nargs="?")
    common(p)
    p.add_argument("--random", type=int, default=None, metavar="N",
                   help="use a seeded random potential with N harmonics")
    p.add_argument("--amplitude", type=float, default=0.2)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("verify", help="oracle checks of the series solutions")
    p.add_argument("potential")
    common(p, inverse=False, radius=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval", help="evaluate one fundamental solution")
    p.add_argument("potential")
    p.add_argument("--kind", choices=[k.value for k in SolutionKind], default="f1_plus")
    p.add_argument("--lambda", dest="lam", type=float, nargs=2, metavar=("RE", "IM"), required=True)
    p.add_argument("--x", type=float, nargs="+", default=[0.0])
    common(p, inverse=False, radius=False)
    p.set_defaults(func=cmd_eval)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "spectrum" and args.inverse_order is None:
            args.inverse_order = 8
        _check_config(args)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SpectralDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ContourThroughPole, NonConvergence) as exc:
        print(f"eigenvalue search failed: {exc}", file=sys.stderr)
        return EXIT_CONTOUR
    except GenericityFailure as exc:
        print(f"degenerate data: {exc}", file=sys.stderr)
        return EXIT_GENERICITY
    except (NoBetaSource, NonPhysicalBeta) as exc:
        print(f"beta: {exc}", file=sys.stderr)
        return EXIT_BETA
    except PencilError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
