"""CNF compilation of model-search tasks over one-hot operation tables.

Every cell of every operation table gets n boolean variables, one per
candidate value, under an exactly-one constraint.  The order is not a
separate relation: leq(x,y) abbreviates the meet variable for meet[x][y]=x.
Nested terms are flattened through shared auxiliary value groups; a group
is exact (one true variable, the term's value) because its defining clauses
force the true value upward and an at-most-one ring forbids extras.
"""

from __future__ import annotations

import itertools
from array import array
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .algebra import FiniteBinar, freeze_table
from .terms import (
    Apply,
    IDENTITY_NAMES,
    Identity,
    LATTICE_IDENTITIES,
    OPS,
    Term,
    Variable,
    builtin,
    identity_variables,
)

OP_INDEX = {op: i for i, op in enumerate(OPS)}
ENCODING_CEILING = 32


class SizeOverflow(ValueError):
    pass


class IllFormedAssignment(ValueError):
    """A cell decoded to zero or several values."""

    def __init__(self, cell: tuple):
        self.cell = cell
        super().__init__(f"cell {cell} has no unique value")


def _canonical_name(ident: Identity | str) -> str:
    name = ident if isinstance(ident, str) else ident.name
    if name not in IDENTITY_NAMES:
        raise ValueError(f"not one of {IDENTITY_NAMES}: {name!r}")
    return name


@dataclass(frozen=True)
class SearchTask:
    """Find a residuated binar of the given size satisfying every assumed
    identity and violating the refuted one (if any)."""

    size: int
    assume: frozenset[str] = frozenset()
    refute: str | None = None

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("size must be positive")
        names = frozenset(_canonical_name(a) for a in self.assume)
        object.__setattr__(self, "assume", names)
        if self.refute is not None:
            refute = _canonical_name(self.refute)
            object.__setattr__(self, "refute", refute)
            if refute in names:
                raise ValueError(f"cannot both assume and refute {refute}")

    @classmethod
    def make(
        cls,
        size: int,
        assume: Iterable[Identity | str] = (),
        refute: Identity | str | None = None,
    ) -> "SearchTask":
        return cls(size, frozenset(_canonical_name(a) for a in assume),
                   None if refute is None else _canonical_name(refute))

    def key(self) -> tuple:
        return (self.size, tuple(sorted(self.assume)), self.refute or "")

    def describe(self) -> str:
        assume = ",".join(sorted(self.assume)) or "-"
        return f"n={self.size} assume={assume} refute={self.refute or '-'}"


@dataclass
class VarMap:
    """Base variable layout plus the registry of auxiliary value groups."""

    n: int
    aux: dict[tuple, tuple[int, ...]] = field(default_factory=dict)

    @property
    def num_base(self) -> int:
        return 5 * self.n ** 3

    def var(self, op: str, row: int, col: int, value: int) -> int:
        n = self.n
        if not (0 <= row < n and 0 <= col < n and 0 <= value < n):
            raise ValueError(f"cell index out of range: {(op, row, col, value)}")
        return 1 + OP_INDEX[op] * n ** 3 + row * n ** 2 + col * n + value

    def leq(self, x: int, y: int) -> int:
        """Literal for x <= y, an abbreviation of meet[x][y] = x."""
        return self.var("meet", x, y, x)

    def base_items(self) -> Iterator[tuple[tuple[str, int, int, int], int]]:
        n = self.n
        for op in OPS:
            for row in range(n):
                for col in range(n):
                    for value in range(n):
                        yield (op, row, col, value), self.var(op, row, col, value)


class CnfInstance:
    """Clause store in a flat zero-terminated literal array.

    Duplicate literals within a clause are removed and tautologies are
    silently dropped, so downstream watched-literal handling never sees a
    clause watching one variable twice.
    """

    def __init__(self, num_vars: int = 0):
        self.num_vars = num_vars
        self.clause_count = 0
        self._lits = array("i")
        self.varmap: VarMap | None = None

    @classmethod
    def from_clauses(cls, num_vars: int, clauses: Iterable[Iterable[int]]) -> "CnfInstance":
        cnf = cls(num_vars)
        for clause in clauses:
            cnf.add_clause(clause)
        return cnf

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add one clause; returns False when dropped as a tautology."""
        seen: set[int] = set()
        out = []
        for lit in lits:
            if lit == 0:
                raise ValueError("literal 0 is reserved")
            if abs(lit) > self.num_vars:
                raise ValueError(f"literal {lit} beyond allocated variables")
            if -lit in seen:
                return False
            if lit not in seen:
                seen.add(lit)
                out.append(lit)
        if not out:
            raise ValueError("empty clause")
        self._lits.extend(out)
        self._lits.append(0)
        self.clause_count += 1
        return True

    def iter_clauses(self) -> Iterator[tuple[int, ...]]:
        start = 0
        lits = self._lits
        for i, lit in enumerate(lits):
            if lit == 0:
                yield tuple(lits[start:i])
                start = i + 1

    @property
    def clauses(self) -> list[tuple[int, ...]]:
        return list(self.iter_clauses())

    def literal_array(self) -> array:
        """The raw zero-terminated literal stream (shared, do not mutate)."""
        return self._lits


@dataclass(frozen=True)
class EncodeOptions:
    symmetry: bool = True


class _Group:
    """One-hot value group: lit(v) is the literal asserting value v."""

    __slots__ = ("key", "lits")

    def __init__(self, key: tuple, lits: tuple[int, ...]):
        self.key = key
        self.lits = lits

    def lit(self, v: int) -> int:
        return self.lits[v]


Source = "int | _Group"


class _Encoder:
    def __init__(self, task: SearchTask, opts: EncodeOptions):
        self.task = task
        self.opts = opts
        self.n = task.size
        self.varmap = VarMap(self.n)
        self.cnf = CnfInstance(num_vars=self.varmap.num_base)
        self.cnf.varmap = self.varmap
        self._false: int | None = None

    def build(self) -> CnfInstance:
        self._exactly_one_cells()
        for ident in LATTICE_IDENTITIES:
            self._assert_identity(ident)
        self._residuation()
        for name in sorted(self.task.assume):
            self._assert_identity(builtin(name))
        if self.task.refute is not None:
            self._refute(builtin(self.task.refute))
        if self.opts.symmetry:
            for clause in symmetry_clauses(self.n, self.varmap.leq):
                self.cnf.add_clause(clause)
        return self.cnf

    # -- building blocks

    def _exactly_one_cells(self) -> None:
        n, vm, add = self.n, self.varmap, self.cnf.add_clause
        for op in OPS:
            for row in range(n):
                for col in range(n):
                    cell = [vm.var(op, row, col, v) for v in range(n)]
                    add(cell)
                    for i in range(n):
                        for j in range(i + 1, n):
                            add((-cell[i], -cell[j]))

    def _false_lit(self) -> int:
        if self._false is None:
            self._false = self.cnf.new_var()
            self.cnf.add_clause((-self._false,))
        return self._false

    def _cell_group(self, op: str, a: int, b: int) -> _Group:
        vm = self.varmap
        return _Group(("cell", op, a, b),
                      tuple(vm.var(op, a, b, v) for v in range(self.n)))

    def _key(self, src) -> tuple:
        return ("const", src) if isinstance(src, int) else src.key

    def _flatten(self, t: Term, env: Mapping[str, int]):
        """Value source of a term: an int or an exact one-hot group."""
        if isinstance(t, Variable):
            return env[t.name]
        left = self._flatten(t.left, env)
        right = self._flatten(t.right, env)
        if isinstance(left, int) and isinstance(right, int):
            return self._cell_group(t.op, left, right)
        return self._aux(t.op, left, right)

    def _aux(self, op: str, left, right) -> _Group:
        key = ("aux", op, self._key(left), self._key(right))
        lits = self.varmap.aux.get(key)
        if lits is not None:
            return _Group(key, lits)
        n = self.n
        lits = tuple(self.cnf.new_var() for _ in range(n))
        self.varmap.aux[key] = lits
        group = _Group(key, lits)
        self._force_into(op, left, right, group)
        add = self.cnf.add_clause
        for i in range(n):
            for j in range(i + 1, n):
                add((-lits[i], -lits[j]))
        return group

    def _force_into(self, op: str, left, right, target: _Group) -> None:
        """Clauses: left=a and right=b and op[a][b]=v imply target=v."""
        n, vm, add = self.n, self.varmap, self.cnf.add_clause
        lvals = (left,) if isinstance(left, int) else range(n)
        rvals = (right,) if isinstance(right, int) else range(n)
        for a in lvals:
            pa = () if isinstance(left, int) else (-left.lit(a),)
            for b in rvals:
                pb = () if isinstance(right, int) else (-right.lit(b),)
                prefix = pa + pb
                for v in range(n):
                    add(prefix + (-vm.var(op, a, b, v), target.lit(v)))

    def _assert_identity(self, ident: Identity) -> None:
        """Force lhs = rhs on every tuple of carrier values."""
        names = identity_variables(ident)
        for tup in itertools.product(range(self.n), repeat=len(names)):
            env = dict(zip(names, tup))
            rhs = self._flatten(ident.rhs, env)
            if isinstance(rhs, int):
                self._assert_equals_const(ident.lhs, env, rhs)
            else:
                self._assert_into_group(ident.lhs, env, rhs)

    def _assert_into_group(self, t: Term, env: Mapping[str, int], target: _Group) -> None:
        if isinstance(t, Variable):
            self.cnf.add_clause((target.lit(env[t.name]),))
            return
        left = self._flatten(t.left, env)
        right = self._flatten(t.right, env)
        self._force_into(t.op, left, right, target)

    def _assert_equals_const(self, t: Term, env: Mapping[str, int], value: int) -> None:
        if isinstance(t, Variable):
            if env[t.name] != value:
                self.cnf.add_clause((self._false_lit(),))
            return
        n, vm, add = self.n, self.varmap, self.cnf.add_clause
        left = self._flatten(t.left, env)
        right = self._flatten(t.right, env)
        lvals = (left,) if isinstance(left, int) else range(n)
        rvals = (right,) if isinstance(right, int) else range(n)
        for a in lvals:
            pa = () if isinstance(left, int) else (-left.lit(a),)
            for b in rvals:
                pb = () if isinstance(right, int) else (-right.lit(b),)
                add(pa + pb + (vm.var(t.op, a, b, value),))

    def _residuation(self) -> None:
        """x*y <= z iff y <= x\\z iff x <= z/y, expanded per cell values."""
        n, vm, add = self.n, self.varmap, self.cnf.add_clause
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    for a in range(n):
                        ma = -vm.var("mult", x, y, a)
                        la = vm.leq(a, z)
                        for b in range(n):
                            rb = -vm.var("lres", x, z, b)
                            lb = vm.leq(y, b)
                            add((ma, rb, -la, lb))
                            add((ma, rb, la, -lb))
                        for c in range(n):
                            rc = -vm.var("rres", z, y, c)
                            lc = vm.leq(x, c)
                            add((ma, rc, -la, lc))
                            add((ma, rc, la, -lc))

    def _refute(self, ident: Identity) -> None:
        """Some tuple must witness lhs != rhs: one selector per tuple."""
        n, add = self.n, self.cnf.add_clause
        names = identity_variables(ident)
        selectors = []
        for tup in itertools.product(range(n), repeat=len(names)):
            env = dict(zip(names, tup))
            w = self.cnf.new_var()
            selectors.append(w)
            lhs = self._flatten(ident.lhs, env)
            rhs = self._flatten(ident.rhs, env)
            if isinstance(lhs, int) and isinstance(rhs, int):
                if lhs == rhs:
                    add((-w,))
            elif isinstance(lhs, int):
                add((-w, -rhs.lit(lhs)))
            elif isinstance(rhs, int):
                add((-w, -lhs.lit(rhs)))
            else:
                for v in range(n):
                    add((-w, -lhs.lit(v), -rhs.lit(v)))
        add(selectors)


def symmetry_clauses(
    n: int, leq: Callable[[int, int], int]
) -> list[tuple[int, ...]]:
    """Pin 0 as bottom and n-1 as top, and force the numeric labeling to be
    a linear extension of the order."""
    clauses: list[tuple[int, ...]] = []
    for y in range(1, n):
        clauses.append((leq(0, y),))
    for x in range(1, n - 1):
        clauses.append((leq(x, n - 1),))
    for x in range(n):
        for y in range(x):
            clauses.append((-leq(x, y),))
    return clauses


def encode_search(task: SearchTask, opts: EncodeOptions = EncodeOptions()) -> CnfInstance:
    if task.size > ENCODING_CEILING:
        raise SizeOverflow(f"size {task.size} beyond ceiling {ENCODING_CEILING}")
    return _Encoder(task, opts).build()


def _truth(assignment, var: int) -> bool:
    if isinstance(assignment, Mapping):
        return bool(assignment.get(var, False))
    return bool(assignment[var - 1])


def decode_model(assignment, varmap: VarMap, n: int) -> FiniteBinar:
    """Read the unique true value of each cell into operation tables."""
    tables = {}
    for op in OPS:
        rows = []
        for row in range(n):
            out = []
            for col in range(n):
                values = [v for v in range(n)
                          if _truth(assignment, varmap.var(op, row, col, v))]
                if len(values) != 1:
                    raise IllFormedAssignment((op, row, col))
                out.append(values[0])
            rows.append(out)
        tables[op] = freeze_table(rows)
    return FiniteBinar(n, **tables)


def write_dimacs(cnf: CnfInstance) -> bytes:
    """DIMACS text; varmap base cells are recorded as `c map` comments."""
    lines = []
    if cnf.varmap is not None:
        for (op, row, col, value), var in cnf.varmap.base_items():
            lines.append(f"c map {op} {row} {col} {value} {var}")
    lines.append(f"p cnf {cnf.num_vars} {cnf.clause_count}")
    for clause in cnf.iter_clauses():
        lines.append(" ".join(str(lit) for lit in clause) + " 0")
    return ("\n".join(lines) + "\n").encode("ascii")


def write_dimacs_file(cnf: CnfInstance, path) -> None:
    """Stream the instance to a file without building one giant buffer."""
    with open(path, "w", encoding="ascii") as handle:
        if cnf.varmap is not None:
            for (op, row, col, value), var in cnf.varmap.base_items():
                handle.write(f"c map {op} {row} {col} {value} {var}\n")
        handle.write(f"p cnf {cnf.num_vars} {cnf.clause_count}\n")
        chunk: list[str] = []
        for clause in cnf.iter_clauses():
            chunk.append(" ".join(str(lit) for lit in clause) + " 0\n")
            if len(chunk) >= 4096:
                handle.write("".join(chunk))
                chunk.clear()
        handle.write("".join(chunk))
