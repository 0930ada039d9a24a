"""Command-line interface.

Exit codes: 0 on success or an affirmative verdict, 1 on a negative verdict,
2 on invalid input. Results are JSON on stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import balls, completion, extremal, harness, schur, sector, triangular
from .errors import OpExtError
from .matcore import Tolerances, op_norm, use_tolerances
from .serialize import hole_from_json, load_json, matrix_from_json, pair_from_json, to_jsonable

EXIT_OK, EXIT_NEGATIVE, EXIT_INVALID = 0, 1, 2


class UsageError(OpExtError):
    pass


def _load_matrix(path) -> np.ndarray:
    return matrix_from_json(load_json(path))


def _phi(args, required: bool = True) -> float | None:
    if args.phi is not None:
        return args.phi
    if args.phi_deg is not None:
        return math.radians(args.phi_deg)
    if required:
        raise UsageError("an angle is required (--phi or --phi-deg)")
    return None


def _emit(args, report: dict, matrix: np.ndarray | None = None) -> None:
    """Write the matrix (or the report) to ``--out``; print the report to stdout.

    When there is no ``--out`` the matrix is included in the printed report.
    """
    if args.out:
        payload = to_jsonable(matrix if matrix is not None else report)
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
    elif matrix is not None:
        report = {"matrix": matrix, **report}
    if not args.quiet:
        print(json.dumps(to_jsonable(report), indent=2, allow_nan=False))


# ---------------------------------------------------------------------------
# subcommands


def cmd_complete(args) -> int:
    pair = pair_from_json(load_json(args.pair))
    T = completion.complete(pair, _load_matrix(args.k))
    phi = _phi(args, required=False)
    if phi is None:
        _emit(args, {"contraction": bool(op_norm(T) <= 1 + args.tol.norm_slack)}, T)
        return EXIT_OK
    rep = sector.in_cphi(T, phi)
    _emit(args, {"phi": phi, "in_class": rep.in_class, "margin": rep.margin}, T)
    return EXIT_OK if rep.in_class else EXIT_NEGATIVE


def cmd_angle(args) -> int:
    ca = completion.critical_angle(pair_from_json(load_json(args.pair)))
    text = ca.phi1 if not ca.consistent else f"{ca.phi1:.12f}"
    if args.out:
        Path(args.out).write_text(json.dumps({"phi1": ca.phi1, "consistent": ca.consistent}) + "\n")
    if not args.quiet:
        print(text)
    return EXIT_OK


def cmd_check(args) -> int:
    rep = sector.in_cphi(_load_matrix(args.matrix), _phi(args))
    _emit(args, dataclasses.asdict(rep))
    return EXIT_OK if rep.in_class else EXIT_NEGATIVE


def cmd_cayley(args) -> int:
    A = _load_matrix(args.matrix)
    X = sector.cayley_inv(A) if args.inverse else sector.cayley(A)
    _emit(args, {"inverse": args.inverse}, X)
    return EXIT_OK


def cmd_short(args) -> int:
    A = _load_matrix(args.matrix)
    if not 0 <= args.split <= A.shape[0]:
        raise UsageError(f"--split must lie in [0, {A.shape[0]}]")
    _emit(args, {"split": args.split}, schur.shorted(A, args.split))
    return EXIT_OK


def cmd_tri(args) -> int:
    phi = _phi(args, required=False)
    tp = triangular.TriPair(_load_matrix(args.t11), _load_matrix(args.t22), phi)
    K = _load_matrix(args.k)
    if phi is None:
        T = triangular.tri_complete(tp, K)
        ok = bool(op_norm(T) <= 1 + args.tol.norm_slack)
        _emit(args, {"contraction": ok}, T)
    else:
        T, ok = triangular.shmulyan_complete(tp, K)
        _emit(args, {"phi": phi, "in_class": ok}, T)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _verdict_exit(verdict: extremal.Verdict) -> int:
    return EXIT_OK if verdict is extremal.Verdict.EXTREME_CERTIFIED else EXIT_NEGATIVE


def cmd_extreme(args) -> int:
    phi = _phi(args)
    K = _load_matrix(args.k)
    if args.pair:
        rep = extremal.completion_extreme(pair_from_json(load_json(args.pair)), phi, K)
        _emit(args, {"verdict": rep.verdict, "certificate": rep.certificate, "identities": rep.identities})
        return _verdict_exit(rep.verdict)
    if args.q:
        cert = extremal.loone_certificate(K, _load_matrix(args.q), phi, search_witness=True)
        _emit(args, {"verdict": cert.verdict, "certificate": cert})
        return _verdict_exit(cert.verdict)
    rep = extremal.cphi_extreme_tests(K, phi)
    _emit(args, {"verdict": rep.verdict, "report": rep})
    return _verdict_exit(rep.verdict)


def cmd_hole(args) -> int:
    hole = hole_from_json(load_json(args.hole))
    if args.action == "member":
        if not args.matrix:
            raise UsageError("hole member needs --matrix")
        ok, k = balls.hole_member(hole, _load_matrix(args.matrix))
        _emit(args, {"member": ok, "k": k})
        return EXIT_OK if ok else EXIT_NEGATIVE
    if args.action == "singleton":
        ok = balls.hole_singleton(hole)
        _emit(args, {"singleton": ok})
        return EXIT_OK if ok else EXIT_NEGATIVE
    members = balls.hole_sample(hole, np.random.default_rng(args.seed), args.count)
    _emit(args, {"seed": args.seed, "members": members})
    return EXIT_OK if members else EXIT_NEGATIVE


def cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in harness.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}")
    start = time.perf_counter()
    report = harness.run_suite(args.suite, seed=args.seed, trials=args.trials, dims=args.dims)
    if not args.quiet:
        print(f"verify: {time.perf_counter() - start:.1f} s", file=sys.stderr)
    _emit(args, dataclasses.asdict(report))
    return EXIT_OK if report.failures == 0 else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# parser


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base seed for random choices")
    common.add_argument("--tol-rank", type=float, help="relative rank cut for pseudoinverses")
    common.add_argument("--tol-psd", type=float, help="eigenvalue band treated as zero")
    common.add_argument("--norm-slack", type=float, help="slack in the contraction test")
    common.add_argument("--out", help="write the result to this file")
    common.add_argument("--quiet", action="store_true", help="print nothing on stdout")

    angle = argparse.ArgumentParser(add_help=False)
    g = angle.add_mutually_exclusive_group()
    g.add_argument("--phi", type=float, help="angle in radians")
    g.add_argument("--phi-deg", type=float, help="angle in degrees")

    parser = argparse.ArgumentParser(prog="opext", description="Contractive and C(phi) completions of block matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complete", parents=[common, angle], help="completion T_K of a dual pair")
    p.add_argument("--pair", required=True)
    p.add_argument("--k", required=True)
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("angle", parents=[common], help="critical angle of a symmetric dual pair")
    p.add_argument("--pair", required=True)
    p.set_defaults(func=cmd_angle)

    p = sub.add_parser("check", parents=[common, angle], help="C(phi) membership and negative indices")
    p.add_argument("--matrix", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("cayley", parents=[common], help="Cayley transform -I + 2(I + A)^-1")
    p.add_argument("--matrix", required=True)
    p.add_argument("--inverse", action="store_true")
    p.set_defaults(func=cmd_cayley)

    p = sub.add_parser("short", parents=[common], help="shorted operator onto the trailing block")
    p.add_argument("--matrix", required=True)
    p.add_argument("--split", type=int, required=True, help="size of the leading block")
    p.set_defaults(func=cmd_short)

    p = sub.add_parser("tri", parents=[common, angle], help="upper-triangular completion")
    p.add_argument("--t11", required=True)
    p.add_argument("--t22", required=True)
    p.add_argument("--k", required=True)
    p.set_defaults(func=cmd_tri)

    p = sub.add_parser("extreme", parents=[common, angle], help="extreme-point certificate")
    p.add_argument("--k", required=True, help="the point to test")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--q", help="shift of the loone (default: C(phi) with Q = I)")
    src.add_argument("--pair", help="test the completion with parameter K of this pair")
    p.set_defaults(func=cmd_extreme)

    p = sub.add_parser("hole", parents=[common], help="operator hole queries")
    p.add_argument("action", choices=["member", "sample", "singleton"])
    p.add_argument("--hole", required=True)
    p.add_argument("--matrix")
    p.add_argument("--count", type=_positive_int, default=10)
    p.set_defaults(func=cmd_hole)

    p = sub.add_parser("verify", parents=[common], help="run randomized oracle suites")
    p.add_argument("--suite", default="all")
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--dims", type=_positive_int, default=4)
    p.add_argument("--tol", dest="verify_tol", type=float, help="alias for --norm-slack")
    p.set_defaults(func=cmd_verify)
    return parser


def _tolerances(args) -> Tolerances:
    tol = Tolerances.from_env()
    overrides = {
        "rank_tol": args.tol_rank,
        "psd_tol": args.tol_psd,
        "norm_slack": args.norm_slack if getattr(args, "verify_tol", None) is None else args.verify_tol,
    }
    return dataclasses.replace(tol, **{k: v for k, v in overrides.items() if v is not None})


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        args.tol = _tolerances(args)
        with use_tolerances(args.tol):
            return args.func(args)
    except (OpExtError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"opext {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
