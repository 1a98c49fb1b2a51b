"""Finite lattice-ordered algebras given by explicit operation tables.

A model lives on the carrier {0..n-1} and carries five total binary
operations: meet, join, mult, lres, rres.  Table orientation follows the
written expression: ``lres[x][z]`` is x\\z and ``rres[z][y]`` is z/y, i.e.
the first index is the left-hand symbol.  The partial order is never stored;
it is derived from the meet table and cross-checked against join.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping

from .terms import (
    Apply,
    Identity,
    LATTICE_IDENTITIES,
    OPS,
    Term,
    Variable,
    identity_variables,
)

Table = tuple[tuple[int, ...], ...]


class OrderInconsistent(ValueError):
    """Meet/join tables do not induce a single partial order."""

    def __init__(self, x: int, y: int, reason: str):
        self.pair = (x, y)
        super().__init__(f"order inconsistent at ({x},{y}): {reason}")


class NotResiduated(ValueError):
    """No residual value exists for some table cell."""

    def __init__(self, row: int, col: int, side: str):
        self.cell = (row, col)
        self.side = side
        super().__init__(f"no {side} residual at cell ({row},{col})")


class UnboundVariable(KeyError):
    pass


class SizeMismatch(ValueError):
    pass


class UnknownOp(KeyError):
    pass


def freeze_table(rows: Iterable[Iterable[int]]) -> Table:
    return tuple(tuple(int(v) for v in row) for row in rows)


@dataclass(frozen=True)
class FiniteBinar:
    """Carrier {0..size-1} with five total operation tables."""

    size: int
    meet: Table
    join: Table
    mult: Table
    lres: Table
    rres: Table

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("size must be positive")
        for op in OPS:
            table = freeze_table(getattr(self, op))
            if len(table) != self.size or any(len(row) != self.size for row in table):
                raise ValueError(f"{op} table is not {self.size}x{self.size}")
            for row in table:
                for v in row:
                    if not 0 <= v < self.size:
                        raise ValueError(f"{op} entry {v} outside 0..{self.size - 1}")
            object.__setattr__(self, op, table)

    def table(self, op: str) -> Table:
        if op not in OPS:
            raise UnknownOp(op)
        return getattr(self, op)

    def ops(self) -> dict[str, Table]:
        return {op: getattr(self, op) for op in OPS}


@dataclass(frozen=True)
class OrderRelation:
    """Boolean matrix of a partial order on {0..size-1}."""

    size: int
    leq: tuple[tuple[bool, ...], ...]

    def holds(self, x: int, y: int) -> bool:
        return self.leq[x][y]


@dataclass(frozen=True)
class Violation:
    """One failed instance of a named axiom."""

    axiom: str
    env: tuple[tuple[str, int], ...]
    lhs: int
    rhs: int


@dataclass(frozen=True)
class VerificationReport:
    violations: tuple[Violation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass(frozen=True)
class CounterAssignment:
    """Witness that an identity fails: the assignment and both side values."""

    identity: str
    env: tuple[tuple[str, int], ...]
    lhs: int
    rhs: int


# --- order -------------------------------------------------------------------

def order_from_tables(meet: Table, join: Table) -> OrderRelation:
    """Order with x<=y iff meet[x][y]=x; join[x][y]=y must agree."""
    n = len(meet)
    leq = tuple(tuple(meet[x][y] == x for y in range(n)) for x in range(n))
    for x in range(n):
        for y in range(n):
            if (join[x][y] == y) != leq[x][y]:
                raise OrderInconsistent(x, y, "meet and join disagree")
    for x in range(n):
        if not leq[x][x]:
            raise OrderInconsistent(x, x, "not reflexive")
    for x in range(n):
        for y in range(n):
            if x != y and leq[x][y] and leq[y][x]:
                raise OrderInconsistent(x, y, "not antisymmetric")
    for x in range(n):
        for y in range(n):
            if not leq[x][y]:
                continue
            for z in range(n):
                if leq[y][z] and not leq[x][z]:
                    raise OrderInconsistent(x, z, "not transitive")
    return OrderRelation(size=n, leq=leq)


def derive_order(b: FiniteBinar) -> OrderRelation:
    return order_from_tables(b.meet, b.join)


def covering_relation(order: OrderRelation) -> tuple[tuple[int, int], ...]:
    """Edges (x, y) with x strictly below y and nothing strictly between."""
    n = order.size
    leq = order.leq
    edges = []
    for x in range(n):
        for y in range(n):
            if x == y or not leq[x][y]:
                continue
            if any(z != x and z != y and leq[x][z] and leq[z][y] for z in range(n)):
                continue
            edges.append((x, y))
    return tuple(edges)


@lru_cache(maxsize=128)
def _join_table_of_order(order: OrderRelation) -> Table:
    """Least upper bounds recovered from a lattice order."""
    n = order.size
    leq = order.leq
    rows = []
    for x in range(n):
        row = []
        for y in range(n):
            ubs = [z for z in range(n) if leq[x][z] and leq[y][z]]
            least = [u for u in ubs if all(leq[u][w] for w in ubs)]
            if len(least) != 1:
                raise OrderInconsistent(x, y, "no least upper bound")
            row.append(least[0])
        rows.append(tuple(row))
    return tuple(rows)


# --- evaluation and identity checking ----------------------------------------

def eval_term(t: Term, env: Mapping[str, int], b: FiniteBinar) -> int:
    """Bottom-up table-lookup evaluation of a term."""
    if isinstance(t, Variable):
        try:
            value = env[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
        if not 0 <= value < b.size:
            raise ValueError(f"environment value {value} outside carrier")
        return value
    left = eval_term(t.left, env, b)
    right = eval_term(t.right, env, b)
    return b.table(t.op)[left][right]


def _compile_term(t: Term, slot: dict[str, int], tables: dict[str, Table]):
    """Closure evaluating t on a tuple of variable values (hot path)."""
    if isinstance(t, Variable):
        i = slot[t.name]
        return lambda tup: tup[i]
    left = _compile_term(t.left, slot, tables)
    right = _compile_term(t.right, slot, tables)
    table = tables[t.op]
    return lambda tup: table[left(tup)][right(tup)]


def check_identity(b: FiniteBinar, ident: Identity) -> CounterAssignment | None:
    """First violating assignment in lexicographic tuple order, or None."""
    names = identity_variables(ident)
    slot = {name: i for i, name in enumerate(names)}
    tables = b.ops()
    lhs = _compile_term(ident.lhs, slot, tables)
    rhs = _compile_term(ident.rhs, slot, tables)
    for tup in itertools.product(range(b.size), repeat=len(names)):
        lv = lhs(tup)
        rv = rhs(tup)
        if lv != rv:
            return CounterAssignment(
                identity=ident.name,
                env=tuple(zip(names, tup)),
                lhs=lv,
                rhs=rv,
            )
    return None


def _identity_violations(b: FiniteBinar, ident: Identity) -> list[Violation]:
    names = identity_variables(ident)
    slot = {name: i for i, name in enumerate(names)}
    tables = b.ops()
    lhs = _compile_term(ident.lhs, slot, tables)
    rhs = _compile_term(ident.rhs, slot, tables)
    out = []
    for tup in itertools.product(range(b.size), repeat=len(names)):
        lv = lhs(tup)
        rv = rhs(tup)
        if lv != rv:
            out.append(Violation(ident.name, tuple(zip(names, tup)), lv, rv))
    return out


def check_lattice(b: FiniteBinar) -> VerificationReport:
    """All eight lattice equations over all tuples."""
    violations: list[Violation] = []
    for ident in LATTICE_IDENTITIES:
        violations.extend(_identity_violations(b, ident))
    return VerificationReport(tuple(violations))


def check_residuation(b: FiniteBinar) -> VerificationReport:
    """Three-way residuation equivalence on every triple.

    For each (x, y, z) the conditions  x*y <= z,  y <= x\\z,  x <= z/y
    must agree; every disagreeing pair of conditions is reported, with lhs
    and rhs carrying the two truth values.
    """
    order = derive_order(b)
    leq = order.leq
    n = b.size
    mult, lres, rres = b.mult, b.lres, b.rres
    violations = []
    for x in range(n):
        for y in range(n):
            for z in range(n):
                prod_below = leq[mult[x][y]][z]
                lres_above = leq[y][lres[x][z]]
                rres_above = leq[x][rres[z][y]]
                env = (("x", x), ("y", y), ("z", z))
                if prod_below != lres_above:
                    violations.append(
                        Violation("residuation:mult-lres", env, int(prod_below), int(lres_above))
                    )
                if prod_below != rres_above:
                    violations.append(
                        Violation("residuation:mult-rres", env, int(prod_below), int(rres_above))
                    )
    return VerificationReport(tuple(violations))


def derive_residuals(order: OrderRelation, mult: Table) -> tuple[Table, Table]:
    """Residual tables forced by mult and the order, if they exist.

    lres[x][z] can only be the join g of S = {y : mult[x][y] <= z}, and the
    equivalence  x*y <= z  iff  y <= x\\z  holds exactly when S is the full
    down-set of g; symmetrically for rres.  Raises NotResiduated naming the
    failing cell.
    """
    n = order.size
    leq = order.leq
    join = _join_table_of_order(order)
    lres_rows = []
    for x in range(n):
        row = []
        for z in range(n):
            sat = [y for y in range(n) if leq[mult[x][y]][z]]
            if not sat:
                raise NotResiduated(x, z, "left")
            best = sat[0]
            for y in sat[1:]:
                best = join[best][y]
            # everything below the join must itself satisfy mult[x][y] <= z
            if any(leq[y][best] and not leq[mult[x][y]][z] for y in range(n)):
                raise NotResiduated(x, z, "left")
            row.append(best)
        lres_rows.append(tuple(row))
    rres_rows = []
    for z in range(n):
        row = []
        for y in range(n):
            sat = [x for x in range(n) if leq[mult[x][y]][z]]
            if not sat:
                raise NotResiduated(z, y, "right")
            best = sat[0]
            for x in sat[1:]:
                best = join[best][x]
            if any(leq[x][best] and not leq[mult[x][y]][z] for x in range(n)):
                raise NotResiduated(z, y, "right")
            row.append(best)
        rres_rows.append(tuple(row))
    return tuple(lres_rows), tuple(rres_rows)


# --- isomorphism ---------------------------------------------------------------

def _order_signature(tables: Mapping[str, Table], n: int) -> tuple[tuple[int, ...], ...]:
    """Per-element invariants of the derived order, used to prune mappings."""
    order = order_from_tables(tables["meet"], tables["join"])
    leq = order.leq
    covers = covering_relation(order)
    sig = []
    for x in range(n):
        below = sum(leq[y][x] for y in range(n))
        above = sum(leq[x][y] for y in range(n))
        cov_up = sum(1 for (a, _) in covers if a == x)
        cov_down = sum(1 for (_, b) in covers if b == x)
        sig.append((below, above, cov_down, cov_up))
    return tuple(sig)


def table_isomorphism(
    n: int, tables_a: Mapping[str, Table], tables_b: Mapping[str, Table]
) -> tuple[int, ...] | None:
    """A bijection on {0..n-1} commuting with every given operation, or None.

    Both operand dicts must list the same operation names and include meet
    and join (the order invariants drive the pruning).
    """
    if set(tables_a) != set(tables_b):
        raise ValueError("operation sets differ")
    sig_a = _order_signature(tables_a, n)
    sig_b = _order_signature(tables_b, n)
    if sorted(sig_a) != sorted(sig_b):
        return None
    names = sorted(tables_a)
    image = [-1] * n
    used = [False] * n

    def compatible(x: int, y: int) -> bool:
        for name in names:
            ta, tb = tables_a[name], tables_b[name]
            for u in range(n):
                pu = image[u]
                if pu < 0:
                    continue
                r = ta[x][u]
                if image[r] >= 0 and tb[y][pu] != image[r]:
                    return False
                r = ta[u][x]
                if image[r] >= 0 and tb[pu][y] != image[r]:
                    return False
        return True

    def complete() -> bool:
        for name in names:
            ta, tb = tables_a[name], tables_b[name]
            for u in range(n):
                for w in range(n):
                    if image[ta[u][w]] != tb[image[u]][image[w]]:
                        return False
        return True

    def extend(x: int) -> bool:
        if x == n:
            return complete()
        for y in range(n):
            if used[y] or sig_a[x] != sig_b[y]:
                continue
            image[x] = y
            used[y] = True
            if compatible(x, y) and extend(x + 1):
                return True
            image[x] = -1
            used[y] = False
        return False

    return tuple(image) if extend(0) else None


def are_isomorphic(a: FiniteBinar, b: FiniteBinar) -> tuple[int, ...] | None:
    """Permutation carrying a onto b across all five operations, or None."""
    if a.size != b.size:
        raise SizeMismatch(f"{a.size} != {b.size}")
    return table_isomorphism(a.size, a.ops(), b.ops())


# --- model files ------------------------------------------------------------

def binar_to_dict(b: FiniteBinar) -> dict:
    return {
        "size": b.size,
        "ops": {op: [list(row) for row in getattr(b, op)] for op in OPS},
    }


def binar_from_dict(data: Mapping) -> FiniteBinar:
    try:
        size = int(data["size"])
        ops = data["ops"]
        tables = {op: freeze_table(ops[op]) for op in OPS}
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed model object: {exc}") from None
    return FiniteBinar(size=size, **tables)


def load_model(path: str | Path) -> FiniteBinar:
    with open(path, "r", encoding="utf-8") as handle:
        return binar_from_dict(json.load(handle))


def save_model(b: FiniteBinar, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(binar_to_dict(b), handle, indent=1)
        handle.write("\n")
