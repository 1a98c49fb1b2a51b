"""Grid construction and parallel execution of independence experiments.

A goal is one independence question: can the target identity fail while
the assumptions hold?  Goals run their sizes in ascending order, so the
first SAT is the minimal witness within the range; different goals run
concurrently.  Every task runs in its own killable process, which is the
only reliable timeout for solver backends that cannot be interrupted
in-process.  The coordinator is the single writer of the result file and
re-verifies every claimed model before recording it.
"""

from __future__ import annotations

import json
import multiprocessing as mp
import time
import warnings
from dataclasses import dataclass, field
from multiprocessing.connection import wait as conn_wait
from pathlib import Path
from typing import Iterable, Mapping

from .algebra import (
    FiniteBinar,
    binar_from_dict,
    binar_to_dict,
    check_identity,
    check_lattice,
    check_residuation,
)
from .encoder import EncodeOptions, SearchTask, decode_model, encode_search
from .solver import SAT, UNKNOWN, UNSAT, SolveBudget, solve
from .terms import DISTRIBUTIVITY_NAMES, builtin

SIZE_CEILING = 14
RESULTS_NAME = "results.jsonl"

RULES: tuple[tuple[frozenset[str], str], ...] = (
    (frozenset({"D4", "D5"}), "D3"),
    (frozenset({"D3", "D6"}), "D4"),
    (frozenset({"D1", "D4"}), "D6"),
    (frozenset({"D2", "D3"}), "D5"),
    (frozenset({"D5", "D1"}), "D2"),
    (frozenset({"D6", "D2"}), "D1"),
)


class ConfigError(ValueError):
    pass


def implication_closure(identities: Iterable[str]) -> frozenset[str]:
    """Least fixpoint of the six derivation rules (valid when LD is assumed)."""
    closed = set()
    for name in identities:
        if name not in DISTRIBUTIVITY_NAMES:
            raise ValueError(f"closure is over {DISTRIBUTIVITY_NAMES}, got {name!r}")
        closed.add(name)
    changed = True
    while changed:
        changed = False
        for premises, conclusion in RULES:
            if conclusion not in closed and premises <= closed:
                closed.add(conclusion)
                changed = True
    return frozenset(closed)


@dataclass(frozen=True)
class GridConfig:
    targets: tuple[str, ...] = DISTRIBUTIVITY_NAMES
    policy: str = "all-others"  # or "explicit"
    subsets: tuple[frozenset[str], ...] = ()
    ld: str = "omit"  # assume | omit | both
    min_size: int = 2
    max_size: int = 10
    workers: int = 1
    timeout: float | None = None
    solver: str = "pysat:kissat404"
    out_dir: str | Path = "results"

    def __post_init__(self):
        if not self.targets:
            raise ConfigError("no targets")
        for t in self.targets:
            if t not in DISTRIBUTIVITY_NAMES:
                raise ConfigError(f"target must be one of {DISTRIBUTIVITY_NAMES}: {t!r}")
        if self.policy not in ("all-others", "explicit"):
            raise ConfigError(f"unknown policy {self.policy!r}")
        if self.policy == "explicit" and not self.subsets:
            raise ConfigError("explicit policy needs assumption subsets")
        for sub in self.subsets:
            for name in sub:
                if name not in DISTRIBUTIVITY_NAMES:
                    raise ConfigError(f"assumption must be a distributivity name: {name!r}")
        if self.ld not in ("assume", "omit", "both"):
            raise ConfigError(f"ld mode must be assume, omit or both: {self.ld!r}")
        if not 1 <= self.min_size <= self.max_size <= SIZE_CEILING:
            raise ConfigError(
                f"need 1 <= min <= max <= {SIZE_CEILING}, got [{self.min_size},{self.max_size}]"
            )
        if self.workers < 1:
            raise ConfigError("worker count must be at least 1")


@dataclass(frozen=True)
class GridTask:
    """One solver invocation: a task plus its goal bookkeeping."""

    task: SearchTask
    ld: str  # "assume" | "omit"
    expect_unsat: bool
    goal: tuple

    def key(self) -> tuple:
        return self.task.key()


@dataclass(frozen=True)
class SearchResult:
    task: SearchTask
    ld: str
    expect_unsat: bool
    status: str
    model: FiniteBinar | None
    seconds: float
    solver: str
    reason: str | None = None

    def to_record(self) -> dict:
        record = {
            "task": {
                "size": self.task.size,
                "assume": sorted(self.task.assume),
                "refute": self.task.refute,
                "ld": self.ld,
                "expect_unsat": self.expect_unsat,
            },
            "status": self.status,
            "seconds": round(self.seconds, 3),
            "solver": self.solver,
        }
        if self.model is not None:
            record["model"] = binar_to_dict(self.model)
        if self.reason is not None:
            record["reason"] = self.reason
        return record

    @classmethod
    def from_record(cls, record: Mapping) -> "SearchResult":
        spec = record["task"]
        task = SearchTask(
            int(spec["size"]), frozenset(spec["assume"]), spec.get("refute")
        )
        model = record.get("model")
        return cls(
            task=task,
            ld=spec.get("ld", "omit"),
            expect_unsat=bool(spec.get("expect_unsat", False)),
            status=record["status"],
            model=None if model is None else binar_from_dict(model),
            seconds=float(record.get("seconds", 0.0)),
            solver=record.get("solver", "?"),
            reason=record.get("reason"),
        )


@dataclass
class GridOutcome:
    results: list[SearchResult] = field(default_factory=list)
    violations: list[SearchResult] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.errors


def build_grid(config: GridConfig) -> list[GridTask]:
    """Cross product of targets, assumption subsets, LD modes and sizes."""
    ld_modes = ("assume", "omit") if config.ld == "both" else (config.ld,)
    tasks: list[GridTask] = []
    for target in config.targets:
        if config.policy == "all-others":
            subsets = [frozenset(d for d in DISTRIBUTIVITY_NAMES if d != target)]
        else:
            subsets = list(config.subsets)
        for subset in subsets:
            if target in subset:
                raise ConfigError(f"target {target} inside assumption subset")
            for ld in ld_modes:
                assume = frozenset(subset) | ({"LD"} if ld == "assume" else frozenset())
                expect = ld == "assume" and target in implication_closure(subset)
                goal = (target, tuple(sorted(assume)), ld)
                for size in range(config.min_size, config.max_size + 1):
                    tasks.append(
                        GridTask(SearchTask(size, assume, target), ld, expect, goal)
                    )
    tasks.sort(key=lambda gt: (
        DISTRIBUTIVITY_NAMES.index(gt.goal[0]), gt.goal[1], gt.ld, gt.task.size
    ))
    return tasks


# --- persistence ---------------------------------------------------------------

def persist_result(result: SearchResult, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / RESULTS_NAME, "a", encoding="utf-8") as handle:
        handle.write(json.dumps(result.to_record(), sort_keys=True) + "\n")
        handle.flush()


def load_results(directory: str | Path) -> list[SearchResult]:
    """Parse the result file; a trailing partial line is tolerated."""
    path = Path(directory) / RESULTS_NAME
    if not path.exists():
        return []
    out: list[SearchResult] = []
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.readlines()
    for i, line in enumerate(lines):
        line = line.strip()
        if not line:
            continue
        try:
            out.append(SearchResult.from_record(json.loads(line)))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            if i == len(lines) - 1:
                warnings.warn(f"dropping partial trailing result line: {exc}")
                continue
            raise OSError(f"corrupt result line {i + 1} in {path}: {exc}") from None
    return out


# --- execution -----------------------------------------------------------------

def _solve_task(task: SearchTask, solver_spec: str, timeout, conn) -> None:
    """Worker body: encode, solve, decode; runs in a disposable process."""
    start = time.monotonic()
    try:
        cnf = encode_search(task, EncodeOptions(symmetry=True))
        budget = SolveBudget(max_seconds=timeout) if timeout else None
        result = solve(cnf, solver_spec, budget)
        payload = {
            "status": result.status,
            "seconds": time.monotonic() - start,
            "reason": result.reason,
        }
        if result.status == SAT:
            model = decode_model(result.assignment, cnf.varmap, task.size)
            payload["model"] = binar_to_dict(model)
        conn.send(payload)
    except Exception as exc:  # surfaced as a task failure, never a crash
        conn.send({
            "status": "ERROR",
            "seconds": time.monotonic() - start,
            "reason": f"{type(exc).__name__}: {exc}",
        })
    finally:
        conn.close()


def _verify_model(task: SearchTask, model: FiniteBinar) -> str | None:
    """None when the model truly answers the task, else a complaint."""
    if model.size != task.size:
        return f"size {model.size} != {task.size}"
    if not check_lattice(model).passed:
        return "lattice axioms fail"
    if not check_residuation(model).passed:
        return "residuation fails"
    for name in sorted(task.assume):
        if check_identity(model, builtin(name)) is not None:
            return f"assumed {name} fails"
    if task.refute is not None and check_identity(model, builtin(task.refute)) is None:
        return f"refuted {task.refute} still holds"
    return None


class _Goal:
    """Pending sizes of one goal, consumed in ascending order."""

    __slots__ = ("pending", "in_flight", "done")

    def __init__(self):
        self.pending: list[GridTask] = []
        self.in_flight = False
        self.done = False


def run_grid(tasks: Iterable[GridTask], config: GridConfig) -> GridOutcome:
    """Dispatch tasks to worker processes; single-writer, resumable."""
    outcome = GridOutcome()
    existing = {}
    try:
        for result in load_results(config.out_dir):
            existing[result.task.key()] = result
    except OSError as exc:
        outcome.errors.append(str(exc))
        return outcome

    goals: dict[tuple, _Goal] = {}
    order: list[tuple] = []
    for gt in tasks:
        if gt.goal not in goals:
            goals[gt.goal] = _Goal()
            order.append(gt.goal)
        goals[gt.goal].pending.append(gt)
    for goal in goals.values():
        goal.pending.sort(key=lambda gt: gt.task.size)

    def record(result: SearchResult) -> None:
        persist_result(result, config.out_dir)
        outcome.results.append(result)
        if result.expect_unsat and result.status == SAT:
            outcome.violations.append(result)

    def absorb(gt: GridTask, result: SearchResult) -> None:
        """Update goal state from a finished (or replayed) task."""
        state = goals[gt.goal]
        if result.status == SAT:
            state.done = True
            for rest in state.pending:
                cancelled = SearchResult(
                    task=rest.task, ld=rest.ld, expect_unsat=rest.expect_unsat,
                    status=UNKNOWN, model=None, seconds=0.0, solver=config.solver,
                    reason=f"cancelled: goal satisfied at size {gt.task.size}",
                )
                if rest.task.key() not in existing:
                    record(cancelled)
            state.pending.clear()

    # replay already-recorded tasks so resumption skips them
    for goal_key in order:
        state = goals[goal_key]
        fresh: list[GridTask] = []
        for gt in state.pending:
            prior = existing.get(gt.task.key())
            if prior is None:
                fresh.append(gt)
            else:
                outcome.results.append(prior)
                if prior.expect_unsat and prior.status == SAT:
                    outcome.violations.append(prior)
                if prior.status == SAT:
                    state.done = True
        state.pending = [] if state.done else fresh

    in_flight: dict = {}

    def dispatch() -> None:
        for goal_key in order:
            if len(in_flight) >= config.workers:
                return
            state = goals[goal_key]
            if state.done or state.in_flight or not state.pending:
                continue
            gt = state.pending.pop(0)
            parent, child = mp.Pipe(duplex=False)
            proc = mp.Process(
                target=_solve_task,
                args=(gt.task, config.solver, config.timeout, child),
            )
            proc.start()
            child.close()
            deadline = None
            if config.timeout is not None:
                deadline = time.monotonic() + config.timeout * 1.1 + 2.0
            state.in_flight = True
            in_flight[parent] = (gt, proc, deadline, time.monotonic())

    def settle(parent, payload) -> None:
        gt, proc, _, started = in_flight.pop(parent)
        goals[gt.goal].in_flight = False
        proc.join()
        parent.close()
        seconds = time.monotonic() - started
        if payload is None:
            status, model, reason = UNKNOWN, None, "worker died without reporting"
            outcome.errors.append(f"{gt.task.describe()}: worker crashed")
        elif payload["status"] == "ERROR":
            status, model, reason = UNKNOWN, None, payload["reason"]
            outcome.errors.append(f"{gt.task.describe()}: {payload['reason']}")
        else:
            status = payload["status"]
            reason = payload.get("reason")
            seconds = payload.get("seconds", seconds)
            model = None
            if status == SAT:
                model = binar_from_dict(payload["model"])
                complaint = _verify_model(gt.task, model)
                if complaint is not None:
                    outcome.errors.append(f"{gt.task.describe()}: {complaint}")
                    status, model, reason = UNKNOWN, None, f"model failed verification: {complaint}"
        result = SearchResult(
            task=gt.task, ld=gt.ld, expect_unsat=gt.expect_unsat, status=status,
            model=model, seconds=seconds, solver=config.solver, reason=reason,
        )
        record(result)
        absorb(gt, result)

    def expire() -> None:
        now = time.monotonic()
        for parent in list(in_flight):
            gt, proc, deadline, started = in_flight[parent]
            if deadline is not None and now > deadline:
                proc.terminate()
                proc.join()
                in_flight.pop(parent)
                goals[gt.goal].in_flight = False
                parent.close()
                result = SearchResult(
                    task=gt.task, ld=gt.ld, expect_unsat=gt.expect_unsat,
                    status=UNKNOWN, model=None, seconds=now - started,
                    solver=config.solver,
                    reason=f"timeout after {config.timeout}s",
                )
                record(result)
                absorb(gt, result)

    dispatch()
    while in_flight:
        step = 0.5
        now = time.monotonic()
        deadlines = [d for (_, _, d, _) in in_flight.values() if d is not None]
        if deadlines:
            step = max(0.05, min(step, min(deadlines) - now))
        ready = conn_wait(list(in_flight), timeout=step)
        for parent in ready:
            try:
                payload = parent.recv()
            except (EOFError, OSError):
                payload = None
            settle(parent, payload)
        expire()
        dispatch()
    return outcome
