"""Command-line front end.

Exit-code contract: 0 on success, 1 on usage/input errors, 2 on method
limitations (no certified global solution for this instance), so scripts
can separate hard instances from bugs.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from . import minimax, oracle, quartic
from .errors import (
    CanodualError,
    DimensionTooLargeError,
    HardCaseError,
    NoDualCriticalPointError,
    ShapeMismatchError,
    UnboundedError,
)
from .model import (
    Classification,
    ProblemInstance,
    SolveReport,
    parse_problem,
)
from .reproduce import reproduce_example
from .solver import SolverConfig, find_critical_points, solve_global

def _load(path: str) -> ProblemInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_problem(fh)


def _config(args) -> SolverConfig:
    return SolverConfig(seed=args.seed, num_starts=args.starts)


def _print_report(report: SolveReport, status: str, as_json: bool):
    if as_json:
        print(json.dumps(report.as_dict(status), indent=2))
        return
    print(f"status: {status}")
    print(f"existence: {report.existence_verdict.value}   "
          f"iterations: {report.iterations}   residual: {report.residual_norm:.3e}")
    for note in report.notes:
        print(f"note: {note}")
    for i, p in enumerate(report.critical_pairs, 1):
        x = ", ".join(f"{v:.6f}" for v in p.x)
        tau = ", ".join(f"{v:.6f}" for v in p.zeta.tau)
        sigma = ", ".join(f"{v:.6f}" for v in p.zeta.sigma)
        print(f"[{i}] {p.classification.value:<12} region={p.region.value:<10} "
              f"value={p.primal_value:.8f} gap={p.gap:.2e}")
        print(f"    x = ({x})  tau = ({tau})  sigma = ({sigma})")


def _empty_report() -> SolveReport:
    return SolveReport()


def cmd_solve(args) -> int:
    try:
        inst = _load(args.path)
    except (OSError, CanodualError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.beta is not None:
        inst = ProblemInstance(A=inst.A, f=inst.f, lse_terms=inst.lse_terms,
                               quartic_terms=inst.quartic_terms, beta=args.beta)
    cfg = _config(args)
    try:
        if args.all_critical:
            report = find_critical_points(inst, cfg)
            found_global = any(p.classification == Classification.GLOBAL_MIN
                               for p in report.critical_pairs)
            _print_report(report, "CRITICAL_POINTS_FOUND", args.json)
            return 0 if found_global else 2
        if args.specialize:
            try:
                qi = quartic.QuarticInstance.from_problem(inst)
                report = quartic.solve(qi, cfg)
                _print_report(report, "GLOBAL_MIN_FOUND", args.json)
                return 0
            except ShapeMismatchError:
                pass
            try:
                report = minimax.solve_smoothed(inst, cfg)
                _print_report(report, "GLOBAL_MIN_FOUND", args.json)
                return 0
            except ShapeMismatchError:
                pass  # no fast path applies; fall through to the general solver
        report = solve_global(inst, cfg)
        _print_report(report, "GLOBAL_MIN_FOUND", args.json)
        return 0
    except (HardCaseError, NoDualCriticalPointError, UnboundedError) as exc:
        report = _empty_report()
        report.notes.append(str(exc))
        if exc.code == "NO_SA_PLUS_CRITICAL_POINT":
            report.notes.append(
                "no certified global solution from the dual; a load "
                "perturbation strategy would be needed for this instance")
        _print_report(report, exc.code, args.json)
        return 2
    except CanodualError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


def cmd_check_existence(args) -> int:
    try:
        inst = _load(args.path)
    except (OSError, CanodualError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        try:
            qi = quartic.QuarticInstance.from_problem(inst)
            detail = quartic.existence_detail(qi.spectral(), qi.alpha, qi.c)
        except ShapeMismatchError:
            can = minimax.canonical_from_problem(inst)
            detail = minimax.existence_detail(can.spectral(), can.d, can.beta)
    except ShapeMismatchError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    print(detail["verdict"].value)
    print(f"lambda_min = {detail['lambda_min']:.9g} "
          f"(multiplicity {detail['multiplicity']})")
    print(f"load component on ground eigenspace: {detail['head_component_inf']:.3e} "
          f"(threshold {detail['head_threshold']:.3e})")
    print(f"boundary inequality left-hand side: {detail['boundary_lhs']:.9g} "
          f"( > 0 required when the ground component vanishes)")
    return 0


def cmd_reproduce(args) -> int:
    try:
        comparison = reproduce_example(args.example, beta=args.beta,
                                       cfg=SolverConfig(seed=args.seed,
                                                        num_starts=args.starts))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(comparison.table())
    return 0 if comparison.ok else 2


def cmd_oracle_compare(args) -> int:
    try:
        inst = _load(args.path)
    except (OSError, CanodualError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        report = solve_global(inst, _config(args))
        x_star, v_star = oracle.grid_global_min(inst, (-6.0, 6.0), resolution=601)
    except DimensionTooLargeError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except (HardCaseError, NoDualCriticalPointError, UnboundedError) as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    best = report.best
    dev = abs(best.primal_value - v_star)
    print(f"dual solve:  value = {best.primal_value:.10f}  "
          f"x = ({', '.join(f'{v:.6f}' for v in best.x)})")
    print(f"grid oracle: value = {v_star:.10f}  "
          f"x = ({', '.join(f'{v:.6f}' for v in x_star)})")
    print(f"|difference| = {dev:.3e} (tolerance {args.tol:g})")
    return 0 if dev <= args.tol else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="canodual",
        description="Certified global minimization of quadratic + smoothed-max "
                    "+ quartic double-well objectives via the canonical dual.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=42,
                       help="seed for all randomized behavior (default 42)")
        p.add_argument("--starts", type=int, default=64,
                       help="multistart sample count (default 64)")

    p_solve = sub.add_parser("solve", help="solve a problem file")
    p_solve.add_argument("path")
    p_solve.add_argument("--json", action="store_true",
                         help="machine-readable report")
    p_solve.add_argument("--specialize", action="store_true",
                         help="use the univariate fast path when the instance "
                              "has the single-quartic or smoothed-minimax shape")
    p_solve.add_argument("--all-critical", action="store_true",
                         help="enumerate and classify all dual critical points")
    p_solve.add_argument("--beta", type=float, default=None,
                         help="override the smoothing weight of the instance")
    add_common(p_solve)

    p_exist = sub.add_parser("check-existence",
                             help="evaluate the specialized existence condition")
    p_exist.add_argument("path")

    p_repro = sub.add_parser("reproduce",
                             help="re-solve a built-in benchmark and compare "
                                  "against its reference solution")
    p_repro.add_argument("example", type=int, choices=(1, 2, 3))
    p_repro.add_argument("--beta", type=float, default=None,
                         help="override the smoothing weight (benchmark 3)")
    add_common(p_repro)

    p_orc = sub.add_parser("oracle-compare",
                           help="cross-check the dual solve against the grid "
                                "oracle (n <= 3)")
    p_orc.add_argument("path")
    p_orc.add_argument("--tol", type=float, default=1e-4,
                       help="agreement tolerance (default 1e-4)")
    add_common(p_orc)
    return parser


def main(argv: Optional[list] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; the exit contract reserves 1
        return 0 if exc.code in (0, None) else 1
    if args.command == "solve":
        return cmd_solve(args)
    if args.command == "check-existence":
        return cmd_check_existence(args)
    if args.command == "reproduce":
        return cmd_reproduce(args)
    if args.command == "oracle-compare":
        return cmd_oracle_compare(args)
    return 1


if __name__ == "__main__":
    sys.exit(main())
