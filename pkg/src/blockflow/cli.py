"""Command line: ``blockflow validate|stats|solve|compare|generate``.

Exit codes: 0 success, 2 validation failure, 3 solver failure
(non-convergence, singular Jacobian, inconsistent block), 4 parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .block_solver import SolverOptions
from .errors import (
    DocumentError,
    InconsistentBlock,
    InvalidNetwork,
    NonConvergence,
    PartitionError,
    SingularJacobian,
    SlacksSpanBlocks,
)
from .generate import random_network
from .hierarchical import SolveReport, solve_hierarchical, solve_monolithic
from .io import dump_json, load_network, network_to_dict, solution_to_dict
from .network import Edge, Junction, Network, validate_network
from .partition import OversizedBlock, compute_blocks, partition_with_max_size, trivial_partition
from .stats import partition_stats

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NONCONVERGENCE = 3
EXIT_PARSE = 4


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _options(args) -> SolverOptions:
    return SolverOptions(tol=args.tol, max_iter=args.max_iter, workers=args.workers)


def _partition(net, max_block_size):
    if max_block_size is None:
        return compute_blocks(net) if net.n_junctions >= 3 else trivial_partition(net)
    result = partition_with_max_size(net, max_block_size)
    return result.partition if isinstance(result, OversizedBlock) else result


def _run(net, method, args):
    report = SolveReport(method)
    opts = _options(args)
    if method == "monolithic":
        sol = solve_monolithic(net, opts, report)
    else:
        sol = solve_hierarchical(net, _partition(net, args.max_block_size), opts, report)
    return sol, report


def cmd_validate(args) -> int:
    net = load_network(args.input)
    report = validate_network(net)
    if args.json:
        doc = {"valid": report.ok, "violations": report.violations, "warnings": report.warnings}
        print(json.dumps(doc, indent=2))
    else:
        print(f"{net.name}: {net.n_junctions} junctions, {net.n_edges} edges")
        for code, msg in report.violations:
            print(f"  violation {code}: {msg}")
        for code, msg in report.warnings:
            print(f"  warning {code}: {msg}")
        print("valid" if report.ok else "INVALID")
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_stats(args) -> int:
    net = load_network(args.input)
    if not net.is_connected():
        print("network is not connected", file=sys.stderr)
        return EXIT_INVALID
    if args.max_block_size is None:
        result = compute_blocks(net)
    else:
        result = partition_with_max_size(net, args.max_block_size)
    report = partition_stats(net, result, verbose=args.verbose)
    if args.output:
        _emit(dump_json(report.to_dict()), args.output)
    if args.format == "json":
        _emit(dump_json(report.to_dict()), None)
    else:
        print(report.table())
    return EXIT_OK


def cmd_solve(args) -> int:
    net = load_network(args.input)
    sol, report = _run(net, args.method, args)
    doc = solution_to_dict(sol, args.method, report.to_dict())
    _emit(dump_json(doc), args.output)
    if args.output not in (None, "-"):
        print(
            f"{args.method}: residual {sol.residual_inf_norm:.3e}, "
            f"{sol.iterations_total} Newton iterations, {len(report.blocks)} block(s)"
        )
    return EXIT_OK


def _max_rel_diff(a, b):
    worst = 0.0
    for key in a:
        worst = max(worst, abs(a[key] - b[key]) / (1.0 + abs(b[key])))
    return worst


def _warm_up() -> None:
    """Load the compiled kernels so neither timed method pays for it."""
    net = Network(
        (Junction("a", slack=True, potential=10.0), Junction("b", injection=1.0),
         Junction("c", injection=1.0), Junction("d", injection=1.0)),
        (Edge("ab", "a", "b", "pipe", alpha=1.0), Edge("bc", "b", "c", "pipe", alpha=1.0),
         Edge("ca", "c", "a", "pipe", alpha=1.0), Edge("cd", "c", "d", "pipe", alpha=1.0)),
    )
    solve_hierarchical(net)
    solve_monolithic(net)


def cmd_compare(args) -> int:
    net = load_network(args.input)
    _warm_up()
    rows = {}
    sols = {}
    for method in ("hierarchical", "monolithic"):
        clock = time.perf_counter()
        try:
            sol, report = _run(net, method, args)
        except (NonConvergence, SingularJacobian, InconsistentBlock) as exc:
            rows[method] = {"status": "failed", "error": str(exc), "seconds": time.perf_counter() - clock}
            continue
        sols[method] = sol
        rows[method] = {
            "status": "converged",
            "residual": sol.residual_inf_norm,
            "iterations": sol.iterations_total,
            "blocks": len(report.blocks),
            "seconds": time.perf_counter() - clock,
        }
    diff = None
    if len(sols) == 2:
        h, m = sols["hierarchical"], sols["monolithic"]
        diff = max(_max_rel_diff(h.potentials, m.potentials), _max_rel_diff(h.flows, m.flows))
    if args.format == "json":
        print(json.dumps({"methods": rows, "max_rel_diff": diff}, indent=2))
    else:
        print(f"{'method':<14}{'status':<11}{'residual':>11}{'iters':>7}{'blocks':>8}{'seconds':>10}")
        for method, row in rows.items():
            if row["status"] == "converged":
                print(
                    f"{method:<14}{'converged':<11}{row['residual']:>11.2e}{row['iterations']:>7}"
                    f"{row['blocks']:>8}{row['seconds']:>10.4f}"
                )
            else:
                print(f"{method:<14}{'FAILED':<11}{'-':>11}{'-':>7}{'-':>8}{row['seconds']:>10.4f}  {row['error']}")
        print(f"max componentwise relative difference: {'-' if diff is None else f'{diff:.3e}'}")
    return EXIT_OK if len(sols) == 2 else EXIT_NONCONVERGENCE


def cmd_generate(args) -> int:
    try:
        net = random_network(args.nodes, args.cycles, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(dump_json(network_to_dict(net)), args.output)
    return EXIT_OK


def _solver_flags(p):
    p.add_argument("--max-block-size", type=int, default=None, help="cap on junctions per generalized block")
    p.add_argument("--tol", type=float, default=1e-8, help="scaled residual tolerance")
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--workers", type=int, default=1, help="threads per level (hierarchical)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockflow",
        description="Steady nonlinear network flow, solved block by block over the block-cut tree.",
        epilog="exit codes: 0 success, 2 invalid network, 3 solver failure, 4 parse error",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check connectivity and slack/ideal-edge assumptions")
    p.add_argument("input")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="block-cut tree statistics")
    p.add_argument("input")
    p.add_argument("--max-block-size", type=int, default=None)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--output", help="also write the JSON report here")
    p.add_argument("--verbose", action="store_true", help="include tree-edge flows")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("solve", help="solve the steady flow equations")
    p.add_argument("input")
    p.add_argument("--method", choices=("hierarchical", "monolithic"), default="hierarchical")
    _solver_flags(p)
    p.add_argument("--output", default=None, help="solution document path (default stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", help="run both methods and compare")
    p.add_argument("input")
    _solver_flags(p)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("generate", help="write a seeded random pipe network")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--cycles", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidNetwork, SlacksSpanBlocks, PartitionError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NonConvergence, SingularJacobian, InconsistentBlock) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        if isinstance(exc, NonConvergence) and exc.trace:
            print("residual trace: " + " ".join(f"{r:.2e}" for r in exc.trace), file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
