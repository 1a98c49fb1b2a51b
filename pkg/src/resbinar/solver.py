"""SAT decision procedures over CnfInstance.

Three paths share one result type: a hermetic DPLL for air-gapped tests, an
in-process pysat backend ("pysat:<engine>"), and any external solver that
accepts a DIMACS file path.  No path ever returns SAT without re-checking
the assignment against every clause.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .encoder import CnfInstance, write_dimacs_file

SAT = "SAT"
UNSAT = "UNSAT"
UNKNOWN = "UNKNOWN"

DEFAULT_ENGINE = "kissat404"

# engines whose in-process solve can be aborted by a timer thread
_INTERRUPTIBLE = {"glucose3", "glucose4", "glucose42", "minisat22",
                  "minisatgh", "maplecm", "maplesat", "mergesat3",
                  "gluecard3", "gluecard4", "minicard"}


class SolverSpawnError(RuntimeError):
    pass


class OutputParseError(ValueError):
    pass


@dataclass(frozen=True)
class SolveBudget:
    """Resource ceiling; exceeding it yields UNKNOWN, never a wrong answer."""

    max_decisions: int | None = None
    max_seconds: float | None = None


@dataclass(frozen=True)
class SolveResult:
    status: str
    assignment: tuple[bool, ...] | None = None
    stats: Mapping[str, float] = field(default_factory=dict)
    reason: str | None = None

    def __post_init__(self):
        if (self.assignment is not None) != (self.status == SAT):
            raise ValueError("assignment present iff status is SAT")


def check_assignment(cnf: CnfInstance, assignment: tuple[bool, ...]) -> bool:
    """True when every clause has a true literal under the assignment."""
    sat = True
    for clause in cnf.iter_clauses():
        for lit in clause:
            var = lit if lit > 0 else -lit
            if var <= len(assignment) and assignment[var - 1] == (lit > 0):
                break
        else:
            return False
    return sat


def solve_builtin(cnf: CnfInstance, budget: SolveBudget | None = None) -> SolveResult:
    """Plain iterative DPLL with two watched literals per clause.

    Branching is activity-free: lowest-numbered unassigned variable, True
    first.  With the encoder's variable layout that walks the meet table
    first, which keeps the derived order decided early.
    """
    start = time.monotonic()
    max_decisions = budget.max_decisions if budget else None
    max_seconds = budget.max_seconds if budget else None
    nvars = cnf.num_vars

    clauses: list[list[int]] = [list(c) for c in cnf.iter_clauses()]
    watches: list[list[int]] = [[] for _ in range(2 * nvars + 1)]
    val = bytearray(nvars + 1)  # 0 unassigned, 1 true, 2 false
    trail: list[int] = []
    decisions = 0
    propagations = 0

    def stats() -> dict[str, float]:
        return {
            "decisions": decisions,
            "propagations": propagations,
            "seconds": time.monotonic() - start,
        }

    def lit_true(lit: int) -> bool:
        return val[lit] == 1 if lit > 0 else val[-lit] == 2

    def lit_false(lit: int) -> bool:
        return val[lit] == 2 if lit > 0 else val[-lit] == 1

    def assign(lit: int) -> None:
        val[abs(lit)] = 1 if lit > 0 else 2
        trail.append(lit)

    for ci, clause in enumerate(clauses):
        if len(clause) == 1:
            lit = clause[0]
            if lit_false(lit):
                return SolveResult(UNSAT, stats=stats())
            if not lit_true(lit):
                assign(lit)
        else:
            watches[nvars + clause[0]].append(ci)
            watches[nvars + clause[1]].append(ci)

    qhead = 0

    def propagate() -> bool:
        """Exhaust unit propagation; False on conflict."""
        nonlocal qhead, propagations
        while qhead < len(trail):
            lit = trail[qhead]
            qhead += 1
            propagations += 1
            falsified = -lit
            ws = watches[nvars + falsified]
            kept = []
            i = 0
            while i < len(ws):
                ci = ws[i]
                i += 1
                clause = clauses[ci]
                if clause[0] == falsified:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                if lit_true(first):
                    kept.append(ci)
                    continue
                for k in range(2, len(clause)):
                    other = clause[k]
                    if not lit_false(other):
                        clause[1], clause[k] = other, clause[1]
                        watches[nvars + other].append(ci)
                        break
                else:
                    kept.append(ci)
                    if lit_false(first):
                        kept.extend(ws[i:])
                        watches[nvars + falsified] = kept
                        return False
                    assign(first)
            watches[nvars + falsified] = kept
        return True

    if not propagate():
        return SolveResult(UNSAT, stats=stats())

    # decision stack entries: (trail length at decision, qhead, var, flipped)
    stack: list[list[int]] = []
    scan_from = 1

    while True:
        if max_decisions is not None and decisions > max_decisions:
            return SolveResult(UNKNOWN, stats=stats(), reason="decision budget exceeded")
        if max_seconds is not None and decisions % 64 == 0:
            if time.monotonic() - start > max_seconds:
                return SolveResult(UNKNOWN, stats=stats(), reason="time budget exceeded")
        var = scan_from
        while var <= nvars and val[var]:
            var += 1
        scan_from = var
        if var > nvars:
            assignment = tuple(val[v] == 1 for v in range(1, nvars + 1))
            assert check_assignment(cnf, assignment)
            return SolveResult(SAT, assignment=assignment, stats=stats())
        decisions += 1
        stack.append([len(trail), var, 0])
        assign(var)
        while not propagate():
            while stack and stack[-1][2]:
                mark, dvar, _ = stack.pop()
                for lit in trail[mark:]:
                    val[abs(lit)] = 0
                del trail[mark:]
                if dvar < scan_from:
                    scan_from = dvar
            if not stack:
                return SolveResult(UNSAT, stats=stats())
            mark, dvar, _ = stack[-1]
            for lit in trail[mark:]:
                val[abs(lit)] = 0
            del trail[mark:]
            qhead = mark
            stack[-1][2] = 1
            if dvar < scan_from:
                scan_from = dvar
            assign(-dvar)


def _pad_assignment(pairs: Mapping[int, bool], nvars: int) -> tuple[bool, ...]:
    return tuple(bool(pairs.get(v, False)) for v in range(1, nvars + 1))


def solve_pysat(
    cnf: CnfInstance, engine: str = DEFAULT_ENGINE, budget: SolveBudget | None = None
) -> SolveResult:
    """In-process solve via a pysat engine; fastest path for big instances.

    Time budgets are honored only for engines that support interruption;
    kissat and cadical run to completion, so callers needing hard timeouts
    must isolate the solve in a killable process.
    """
    try:
        from pysat.solvers import Solver
    except ImportError as exc:
        raise SolverSpawnError(f"pysat unavailable: {exc}") from None
    start = time.monotonic()
    max_seconds = budget.max_seconds if budget else None
    try:
        solver = Solver(name=engine, bootstrap_with=cnf.iter_clauses())
    except Exception as exc:
        raise SolverSpawnError(f"engine {engine!r} failed to start: {exc}") from None
    with solver:
        timer = None
        if max_seconds is not None and engine in _INTERRUPTIBLE:
            timer = threading.Timer(max_seconds, solver.interrupt)
            timer.start()
            outcome = solver.solve_limited(expect_interrupt=True)
        else:
            outcome = solver.solve()
        if timer is not None:
            timer.cancel()
        seconds = time.monotonic() - start
        if outcome is None:
            return SolveResult(UNKNOWN, stats={"seconds": seconds}, reason="time budget exceeded")
        if not outcome:
            return SolveResult(UNSAT, stats={"seconds": seconds})
        model = solver.get_model() or []
    assignment = _pad_assignment({abs(l): l > 0 for l in model}, cnf.num_vars)
    if not check_assignment(cnf, assignment):
        raise OutputParseError(f"engine {engine!r} returned a non-satisfying model")
    return SolveResult(SAT, assignment=assignment, stats={"seconds": seconds})


def parse_solver_output(text: str) -> SolveResult:
    """Decode SAT-competition conventions: `s` status line, `v` value lines."""
    status = None
    values: dict[int, bool] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("s ") or line == "s":
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = SAT
            elif word == "UNSATISFIABLE":
                status = UNSAT
            elif word:
                status = UNKNOWN
        elif line.startswith("v ") or line == "v":
            for token in line[2:].split():
                lit = int(token)
                if lit == 0:
                    break
                values[abs(lit)] = lit > 0
    if status is None:
        raise OutputParseError("no status line in solver output")
    if status == SAT:
        nvars = max(values) if values else 0
        return SolveResult(SAT, assignment=_pad_assignment(values, nvars))
    if status == UNSAT:
        return SolveResult(UNSAT)
    return SolveResult(UNKNOWN, reason="solver reported unknown")


def solve_external(
    cnf: CnfInstance, command: str, timeout: float | None = None
) -> SolveResult:
    """Run `command` on a DIMACS temp file and parse its verdict.

    The token {file} in the command is replaced by the instance path; when
    absent the path is appended.  Exit codes 10/20 stand in for a missing
    status line.
    """
    start = time.monotonic()
    argv = shlex.split(command)
    if not argv:
        raise SolverSpawnError("empty solver command")
    with tempfile.TemporaryDirectory(prefix="rbsat-") as tmp:
        path = str(Path(tmp) / "instance.cnf")
        write_dimacs_file(cnf, path)
        if any("{file}" in token for token in argv):
            argv = [token.replace("{file}", path) for token in argv]
        else:
            argv = argv + [path]
        try:
            proc = subprocess.run(
                argv, capture_output=True, text=True, timeout=timeout
            )
        except subprocess.TimeoutExpired:
            return SolveResult(
                UNKNOWN,
                stats={"seconds": time.monotonic() - start},
                reason=f"timeout after {timeout}s",
            )
        except (FileNotFoundError, PermissionError, NotADirectoryError) as exc:
            raise SolverSpawnError(f"cannot run {argv[0]!r}: {exc}") from None
    seconds = time.monotonic() - start
    try:
        result = parse_solver_output(proc.stdout)
    except OutputParseError:
        if proc.returncode == 10:
            raise OutputParseError(
                "solver exited 10 (SAT) without printing a model"
            ) from None
        if proc.returncode == 20:
            return SolveResult(UNSAT, stats={"seconds": seconds})
        raise
    if result.status == SAT:
        assignment = result.assignment
        if len(assignment) < cnf.num_vars:
            assignment = assignment + (False,) * (cnf.num_vars - len(assignment))
        if not check_assignment(cnf, assignment):
            raise OutputParseError("external model does not satisfy the instance")
        return SolveResult(SAT, assignment=assignment, stats={"seconds": seconds})
    return SolveResult(result.status, stats={"seconds": seconds}, reason=result.reason)


def solve(
    cnf: CnfInstance, spec: str = "builtin", budget: SolveBudget | None = None
) -> SolveResult:
    """Dispatch on a solver spec string.

    "builtin" runs the DPLL; "pysat" or "pysat:<engine>" runs in-process
    CDCL; anything else is an external command template.
    """
    if spec == "builtin":
        return solve_builtin(cnf, budget)
    if spec == "pysat":
        return solve_pysat(cnf, DEFAULT_ENGINE, budget)
    if spec.startswith("pysat:"):
        return solve_pysat(cnf, spec.split(":", 1)[1], budget)
    timeout = budget.max_seconds if budget else None
    return solve_external(cnf, spec, timeout=timeout)
