"""Command-line pipeline: verify, search, grid, encode, report, enumerate.

Exit codes: 0 success (search: UNKNOWN), 1 verification or grid failure,
2 usage error, 10 search found a model, 20 search proved none exists.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .algebra import (
    binar_to_dict,
    check_identity,
    check_lattice,
    check_residuation,
    load_model,
    save_model,
)
from .encoder import EncodeOptions, SearchTask, decode_model, encode_search, write_dimacs_file
from .oracle import (
    BoundExceeded,
    count_models,
    enumerate_lattices,
    enumerate_residuated_binars,
)
from .orchestrator import (
    ConfigError,
    GridConfig,
    build_grid,
    load_results,
    run_grid,
)
from .reporting import report_bundle
from .solver import SAT, UNSAT, SolveBudget, solve
from .terms import DISTRIBUTIVITY_NAMES, builtin
from .algebra import are_isomorphic

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_SAT = 10
EXIT_UNSAT = 20


def _default_solver() -> str:
    return os.environ.get("RB_SOLVER", "pysat:kissat404")


def _parse_assume(text: str | None, distributive: bool) -> frozenset[str]:
    names = set()
    if text:
        for raw in text.split(","):
            name = raw.strip()
            if name:
                names.add(name)
    if distributive:
        names.add("LD")
    return frozenset(names)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resbinar",
        description="Search for residuated binars separating distributivity identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="verify a model file")
    p.add_argument("model", help="model JSON file")
    p.add_argument("--assume", help="comma-separated identities that must hold")
    p.add_argument("--refute", help="identity that must fail")
    p.add_argument("--distributive", action="store_true",
                   help="also require the lattice distributivity identity")

    p = sub.add_parser("search", help="solve one search task")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--refute")
    p.add_argument("--assume")
    p.add_argument("--distributive", action="store_true",
                   help="assume the lattice distributivity identity")
    p.add_argument("--solver", default=None, help="builtin | pysat:<engine> | command with {file}")
    p.add_argument("--timeout", type=float)
    p.add_argument("--out", help="write the model JSON here on SAT")

    p = sub.add_parser("grid", help="run the independence experiment grid")
    p.add_argument("--min-size", type=int, default=2)
    p.add_argument("--max-size", type=int, default=10)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--ld", choices=("assume", "omit", "both"), default="omit")
    p.add_argument("--targets", help="comma-separated targets (default: all six)")
    p.add_argument("--out", default="results")
    p.add_argument("--solver", default=None)
    p.add_argument("--timeout", type=float)

    p = sub.add_parser("encode", help="emit the CNF for one task")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--refute")
    p.add_argument("--assume")
    p.add_argument("--distributive", action="store_true")
    p.add_argument("--dimacs", required=True, help="output DIMACS file")
    p.add_argument("--no-symmetry", action="store_true",
                   help="omit symmetry-breaking clauses")

    p = sub.add_parser("report", help="render grid results")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", dest="out_dir", required=True)

    p = sub.add_parser("enumerate", help="exhaustive oracle enumeration")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--up-to-iso", action="store_true")
    p.add_argument("--lattices", action="store_true",
                   help="enumerate lattices instead of residuated binars")
    return parser


def _cmd_check(args) -> int:
    try:
        model = load_model(args.model)
    except (OSError, ValueError) as exc:
        print(f"cannot load model: {exc}", file=sys.stderr)
        return EXIT_USAGE
    failures = []
    report = check_lattice(model)
    if not report.passed:
        failures.append(f"lattice axioms fail ({len(report.violations)} violations)")
    else:
        res = check_residuation(model)
        if not res.passed:
            failures.append(f"residuation fails ({len(res.violations)} violations)")
    assume = _parse_assume(args.assume, args.distributive)
    for name in sorted(assume):
        if check_identity(model, builtin(name)) is not None:
            failures.append(f"{name} fails")
    if args.refute:
        witness = check_identity(model, builtin(args.refute))
        if witness is None:
            failures.append(f"{args.refute} holds but should fail")
        else:
            env = " ".join(f"{k}={v}" for k, v in witness.env)
            print(f"{args.refute} fails at {env}: {witness.lhs} != {witness.rhs}")
    if failures:
        for line in failures:
            print(f"FAIL: {line}")
        return EXIT_FAIL
    print("pass")
    return EXIT_OK


def _cmd_search(args) -> int:
    try:
        task = SearchTask(args.size, _parse_assume(args.assume, args.distributive),
                          args.refute)
        cnf = encode_search(task)
    except ValueError as exc:
        print(f"invalid task: {exc}", file=sys.stderr)
        return EXIT_USAGE
    budget = SolveBudget(max_seconds=args.timeout) if args.timeout else None
    result = solve(cnf, args.solver or _default_solver(), budget)
    if result.status == SAT:
        model = decode_model(result.assignment, cnf.varmap, task.size)
        for name in sorted(task.assume):
            assert check_identity(model, builtin(name)) is None
        assert check_lattice(model).passed and check_residuation(model).passed
        if task.refute:
            assert check_identity(model, builtin(task.refute)) is not None
        print(f"SAT: {task.describe()}")
        text = json.dumps(binar_to_dict(model), indent=1)
        if args.out:
            Path(args.out).write_text(text + "\n", encoding="utf-8")
            print(f"model written to {args.out}")
        else:
            print(text)
        return EXIT_SAT
    if result.status == UNSAT:
        print(f"UNSAT: {task.describe()}")
        return EXIT_UNSAT
    print(f"UNKNOWN: {task.describe()} ({result.reason})")
    return EXIT_OK


def _cmd_grid(args) -> int:
    targets = DISTRIBUTIVITY_NAMES
    if args.targets:
        targets = tuple(t.strip() for t in args.targets.split(",") if t.strip())
    config = GridConfig(
        targets=targets,
        ld=args.ld,
        min_size=args.min_size,
        max_size=args.max_size,
        workers=args.workers,
        timeout=args.timeout,
        solver=args.solver or _default_solver(),
        out_dir=args.out,
    )
    tasks = build_grid(config)
    outcome = run_grid(tasks, config)
    for result in outcome.results:
        extra = f" ({result.reason})" if result.reason else ""
        flag = " [expected UNSAT]" if result.expect_unsat else ""
        print(f"{result.task.describe():50s} {result.status}{flag}{extra}")
    sat = [r for r in outcome.results if r.status == SAT]
    print(f"{len(outcome.results)} results, {len(sat)} SAT, "
          f"{len(outcome.violations)} expectation violations, "
          f"{len(outcome.errors)} errors")
    for violation in outcome.violations:
        print(f"VIOLATION: {violation.task.describe()} is SAT but was expected UNSAT")
    for error in outcome.errors:
        print(f"ERROR: {error}")
    return EXIT_OK if outcome.ok else EXIT_FAIL


def _cmd_encode(args) -> int:
    try:
        task = SearchTask(args.size, _parse_assume(args.assume, args.distributive),
                          args.refute)
        cnf = encode_search(task, EncodeOptions(symmetry=not args.no_symmetry))
    except ValueError as exc:
        print(f"invalid task: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_dimacs_file(cnf, args.dimacs)
    print(f"p cnf {cnf.num_vars} {cnf.clause_count} -> {args.dimacs}")
    return EXIT_OK


def _cmd_report(args) -> int:
    results = load_results(args.in_dir)
    written = report_bundle(results, args.out_dir)
    print(f"{len(written)} files written to {args.out_dir}")
    return EXIT_OK


def _cmd_enumerate(args) -> int:
    try:
        if args.lattices:
            catalogue = enumerate_lattices(args.size, up_to_iso=args.up_to_iso)
            if args.count_only:
                print(len(catalogue))
                return EXIT_OK
            for meet, join in catalogue:
                print(json.dumps({"size": args.size,
                                  "meet": [list(r) for r in meet],
                                  "join": [list(r) for r in join]}))
            return EXIT_OK
        if args.count_only and not args.up_to_iso:
            print(count_models(args.size))
            return EXIT_OK
        models = []
        for binar in enumerate_residuated_binars(args.size):
            if args.up_to_iso and any(are_isomorphic(binar, seen) for seen in models):
                continue
            models.append(binar)
            if not args.count_only:
                print(json.dumps(binar_to_dict(binar)))
        if args.count_only:
            print(len(models))
        return EXIT_OK
    except BoundExceeded as exc:
        print(f"out of range: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "check": _cmd_check,
        "search": _cmd_search,
        "grid": _cmd_grid,
        "encode": _cmd_encode,
        "report": _cmd_report,
        "enumerate": _cmd_enumerate,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, BoundExceeded) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
