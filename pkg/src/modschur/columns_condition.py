"""Deciding the columns condition over Q and F_p.

A matrix satisfies the columns condition if its columns split into an
ordered partition P_1, ..., P_d such that each part's column sum lies in
the span of all columns in earlier parts (the span for P_1 being {0}).

For a single row the condition collapses to a subset-sum question: the span
of any nonzero scalar is the whole field, so after a zero-sum first part
the rest of the columns may go into one part.  Zero entries can always be
absorbed into P_1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatch, InputError, TooManyColumns
from .exact_algebra import QQ, Field, Matrix, rank, span_member, vector_sum

MAX_EXHAUSTIVE_COLUMNS = 10


@dataclass(frozen=True)
class ColumnPartition:
    """Ordered partition of column indices ``0..m-1``."""

    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        parts = tuple(tuple(sorted(p)) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if any(not p for p in parts):
            raise InputError("partition parts must be nonempty")
        flat = [c for p in parts for c in p]
        if len(flat) != len(set(flat)):
            raise InputError("partition parts overlap")
        if sorted(flat) != list(range(len(flat))):
            raise InputError("partition must cover columns 0..m-1")

    @property
    def d(self) -> int:
        return len(self.parts)

    @property
    def ncols(self) -> int:
        return sum(len(p) for p in self.parts)

    def tolist(self) -> list[list[int]]:
        return [list(p) for p in self.parts]


def verify_partition(A: Matrix, partition: ColumnPartition) -> bool:
    """Check the witness property directly with :func:`span_member`."""
    if partition.ncols != A.ncols:
        return False
    cols = A.columns()
    earlier: list[tuple] = []
    for part in partition.parts:
        s = vector_sum((cols[c] for c in part), A.nrows, A.field)
        if not span_member(s, earlier, A.field):
            return False
        earlier.extend(cols[c] for c in part)
    return True


def _subsets_in_order(items: Sequence[int]):
    """Nonempty subsets of ``items`` as sorted tuples, lexicographically."""
    items = sorted(items)

    def rec(start, prefix):
        for i in range(start, len(items)):
            cur = prefix + (items[i],)
            yield cur
            yield from rec(i + 1, cur)

    yield from rec(0, ())


def check_columns_condition(A: Matrix, max_columns: int = MAX_EXHAUSTIVE_COLUMNS
                            ) -> ColumnPartition | None:
    """Find a witness partition for the columns condition, or return None.

    Searches ordered set partitions depth first.  Candidate next parts are
    tried in lexicographic order of their sorted index tuples, which makes the
    witness deterministic.  Dead ends are memoized by the set of columns
    already used, since whether the rest can be completed depends only on it.
    """
    A.field.require_field()
    m = A.ncols
    if m > max_columns:
        if A.nrows == 1:
            return single_row_condition(A.rows[0], A.field)
        raise TooManyColumns(f"{m} columns exceeds exhaustive limit {max_columns}")

    field = A.field
    cols = A.columns()
    rank_cache: dict[int, int] = {}

    def mask_rank(mask: int) -> int:
        if mask not in rank_cache:
            rank_cache[mask] = rank([cols[c] for c in range(m) if mask >> c & 1], field)
        return rank_cache[mask]

    dead: set[int] = set()
    full = (1 << m) - 1

    def extend(used: int) -> list[tuple[int, ...]] | None:
        if used == full:
            return []
        if used in dead:
            return None
        base = [cols[c] for c in range(m) if used >> c & 1]
        r0 = mask_rank(used)
        remaining = [c for c in range(m) if not used >> c & 1]
        for part in _subsets_in_order(remaining):
            s = vector_sum((cols[c] for c in part), A.nrows, field)
            if r0 == 0:
                ok = not any(s)
            else:
                ok = rank(base + [s], field) == r0
            if not ok:
                continue
            mask = used
            for c in part:
                mask |= 1 << c
            rest = extend(mask)
            if rest is not None:
                return [part] + rest
        dead.add(used)
        return None

    parts = extend(0)
    if parts is None:
        return None
    witness = ColumnPartition(tuple(parts))
    if not verify_partition(A, witness):
        raise AssertionError("internal error: search produced an invalid witness")
    return witness


def single_row_condition(a: Sequence, field: Field = QQ) -> ColumnPartition | None:
    """Columns condition for a 1 x m matrix via zero-sum subsets.

    Holds iff every entry is zero or some nonempty subset of the nonzero
    entries sums to zero.  The witness puts that subset and all zero entries
    in P_1 and the remaining columns in P_2.
    """
    field.require_field()
    row = [field(x) for x in a]
    if not row:
        raise DimensionMismatch("empty row")
    zeros = [i for i, x in enumerate(row) if not x]
    nonzero = [i for i, x in enumerate(row) if x]
    if not nonzero:
        return ColumnPartition((tuple(range(len(row))),))
    for subset in _subsets_in_order(nonzero):
        total = field.zero
        for i in subset:
            total = total + row[i]
        if total:
            continue
        first = tuple(sorted(subset + tuple(zeros)))
        rest = tuple(i for i in nonzero if i not in subset)
        parts = (first, rest) if rest else (first,)
        witness = ColumnPartition(parts)
        if not verify_partition(Matrix([row], field), witness):
            raise AssertionError("internal error: invalid single-row witness")
        return witness
    return None


def brauer_matrix(k: int, field: Field = QQ) -> Matrix:
    """The (k-1) x (k+1) matrix whose kernel holds (x, x+c, ..., x+(k-1)c, c).

    Row i (1-based) has -1 in the first column, +1 in column i+1 and -i in
    the last column.
    """
    if k < 2:
        raise InputError("Brauer configurations need k >= 2")
    rows = []
    for i in range(1, k):
        row = [0] * (k + 1)
        row[0] = -1
        row[i] = 1
        row[k] = -i
        rows.append(row)
    return Matrix(rows, field)
