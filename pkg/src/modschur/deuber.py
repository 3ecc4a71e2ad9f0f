"""Witness objects built from the columns condition.

* ``s_set``: the sets t_j + F.t_{j+1} + ... + F.t_m and their union;
* ``is_F_independent``: no nontrivial F-combination of t vanishes;
* ``deuber_witness``: a matrix W with A'W = 0 whose column span lands in
  S(d, F; t) after lifting back to the columns of A;
* ``hj_line_search``: find a monochromatic combinatorial line in a coloured
  cube [k]^n, the finite kernel of the Hales-Jewett argument.

The Hales-Jewett recursion itself is not executed: the widths it needs grow
like towers, so only the line search is provided.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations, product
from typing import Sequence

from .columns_condition import ColumnPartition, verify_partition
from .errors import BudgetExceeded, DimensionMismatch, InputError, InvalidWitness
from .exact_algebra import Field, Matrix, rank, solve, vector_sum

S_SET_BUDGET = 10**6
INDEPENDENCE_BUDGET = 10**7
HJ_BUDGET = 10**6


@dataclass(frozen=True)
class SSetSpec:
    m: int
    F: frozenset
    t: tuple
    field: Field

    def __post_init__(self):
        object.__setattr__(self, "F", frozenset(self.field(f) for f in self.F))
        object.__setattr__(self, "t", tuple(self.field(x) for x in self.t))
        if self.m < 1 or self.m != len(self.t):
            raise DimensionMismatch(f"m={self.m} but t has length {len(self.t)}")


def _check_s_budget(spec: SSetSpec, budget: int):
    f = len(spec.F)
    generated = sum(f ** (spec.m - j) for j in range(1, spec.m + 1))
    if generated > budget:
        raise BudgetExceeded(f"S-set expansion would generate {generated} > {budget} elements")


def s_set(spec: SSetSpec, budget: int = S_SET_BUDGET) -> frozenset:
    """Union over j of t_j + F.t_{j+1} + ... + F.t_m, deduplicated."""
    _check_s_budget(spec, budget)
    zero = spec.field.zero
    out = set()
    tails = {zero}  # all sums F.t_{j+1} + ... + F.t_m
    for j in range(spec.m - 1, -1, -1):
        out.update(spec.t[j] + s for s in tails)
        tails = {f * spec.t[j] + s for f in spec.F for s in tails}
    return frozenset(out)


def s_set_witnesses(spec: SSetSpec, budget: int = S_SET_BUDGET) -> dict:
    """Map each element of S(m,F;t) to one ``(j, f)`` producing it.

    ``j`` is 0-based and ``f`` holds the coefficients of t_{j+1}, ..., t_m.
    Elements are expanded straight from the definition, in lexicographic
    order of (j, f) over a sorted copy of F.
    """
    _check_s_budget(spec, budget)
    coeffs = sorted(spec.F, key=_sort_key)
    out = {}
    for j in range(spec.m):
        for f in product(coeffs, repeat=spec.m - j - 1):
            x = spec.t[j]
            for fi, ti in zip(f, spec.t[j + 1:]):
                x = x + fi * ti
            out.setdefault(x, (j, f))
    return out


def _sort_key(x):
    return getattr(x, "value", x)


def is_F_independent(t: Sequence, F, field: Field, budget: int = INDEPENDENCE_BUDGET) -> bool:
    """True iff sum f_i t_i = 0 with every f_i in F forces all f_i = 0.

    Tracks the reachable (partial sum, some-coefficient-nonzero) pairs one
    coordinate at a time, which decides the same question as running over
    all of F^I while visiting at most 2|field| states per step over F_p.
    """
    t = [field(x) for x in t]
    F = {field(f) for f in F}
    states = {(field.zero, False)}
    work = 0
    for ti in t:
        work += len(states) * len(F)
        if work > budget:
            raise BudgetExceeded(f"independence check exceeded {budget} steps")
        states = {(s + f * ti, nz or bool(f)) for s, nz in states for f in F}
    return (field.zero, True) not in states


@dataclass(frozen=True)
class DeuberWitness:
    """Result of :func:`deuber_witness`.

    ``W`` is q x d over ``field``; ``reduced`` is the k x q matrix A'.
    ``column_map[c]`` is the row of W (equivalently column of A') whose
    value the original column ``c`` takes in a lifted solution.
    ``blocks`` lists the row ranges of W belonging to each merged part.
    """

    d: int
    F: frozenset
    W: Matrix
    reduced: Matrix
    column_map: tuple[int, ...]
    blocks: tuple[tuple[int, int], ...]
    partition: ColumnPartition
    field: Field
    k: int
    alpha_entry_count: int = dc_field(default=0)

    @property
    def q(self) -> int:
        return self.W.nrows

    def point(self, t: Sequence) -> tuple:
        """x = W t, a solution of A'x = 0."""
        return self.W.apply(t)

    def lift(self, x: Sequence) -> tuple:
        """Expand a solution of A'x = 0 to one of Ax = 0."""
        return tuple(x[i] for i in self.column_map)

    def solution(self, t: Sequence) -> tuple:
        return self.lift(self.point(t))

    @property
    def size_bound(self) -> int:
        return (self.k + 1) * self.d ** 2

    def F_with_unit(self) -> frozenset:
        return self.F | {self.field.zero, self.field.one}


def _merge_parts(A: Matrix, partition: ColumnPartition) -> list[tuple[int, ...]]:
    """Merge parts that do not raise the dimension of the running span.

    A part that adds nothing is glued onto the next part that does.  Parts
    after the last dimension increase are glued together into one final
    part, whose sum still lies in the full span of everything before it.
    """
    cols = A.columns()
    dims = [0]
    seen: list[tuple] = []
    for part in partition.parts:
        seen.extend(cols[c] for c in part)
        dims.append(rank(seen, A.field))
    merged: list[tuple[int, ...]] = []
    pending: list[int] = []
    for j, part in enumerate(partition.parts, start=1):
        pending.extend(part)
        if dims[j] > dims[j - 1]:
            merged.append(tuple(sorted(pending)))
            pending = []
    if pending:
        merged.append(tuple(sorted(pending)))
    return merged


def deuber_witness(A: Matrix, partition: ColumnPartition) -> DeuberWitness:
    """Build W, F and the column map from a verified columns-condition witness."""
    A.field.require_field()
    if not verify_partition(A, partition):
        raise InvalidWitness("partition does not witness the columns condition")
    field = A.field
    k = A.nrows
    cols = A.columns()
    parts = _merge_parts(A, partition)

    reduced_cols: list[tuple] = []
    column_map = [0] * A.ncols
    blocks = []
    for part in parts:
        start = len(reduced_cols)
        basis: list[int] = []
        for c in part:
            if rank([cols[b] for b in basis] + [cols[c]], field) > len(basis):
                basis.append(c)
        residual = [c for c in part if c not in basis]
        for c in basis:
            column_map[c] = len(reduced_cols)
            reduced_cols.append(cols[c])
        for c in residual:
            column_map[c] = len(reduced_cols)
        # An empty residual still gets its (zero) column.
        reduced_cols.append(vector_sum((cols[c] for c in residual), k, field))
        blocks.append((start, len(reduced_cols)))

    d = len(parts)
    q = len(reduced_cols)
    W = [[field.zero] * d for _ in range(q)]
    F = set()
    alpha_entries = 0
    for j, (lo, hi) in enumerate(blocks):
        for i in range(lo, hi):
            W[i][j] = field.one
        rhs = vector_sum(reduced_cols[lo:hi], k, field)
        if lo == 0:
            if any(rhs):
                raise InvalidWitness("first part does not sum to zero")
            continue
        earlier = Matrix(list(zip(*reduced_cols[:lo])), field)
        alpha = solve(earlier, [-x for x in rhs])
        if alpha is None:
            raise InvalidWitness(f"part {j + 1} sum is outside the span of earlier parts")
        for i, a in enumerate(alpha):
            W[i][j] = a
        F.update(alpha)
        alpha_entries += len(alpha)

    Wm = Matrix(W, field)
    Ar = Matrix(list(zip(*reduced_cols)), field)
    witness = DeuberWitness(
        d=d, F=frozenset(F), W=Wm, reduced=Ar, column_map=tuple(column_map),
        blocks=tuple(blocks), partition=ColumnPartition(tuple(parts)), field=field,
        k=k, alpha_entry_count=alpha_entries,
    )
    _verify_witness(A, witness)
    return witness


def _verify_witness(A: Matrix, w: DeuberWitness):
    if not (w.reduced @ w.W).is_zero():
        raise AssertionError("internal error: A'W != 0")
    for j in range(w.d):
        e = [w.field.zero] * w.d
        e[j] = w.field.one
        if any(A.apply(w.solution(e))):
            raise AssertionError("internal error: lifted column of W is not in ker A")
    if len(w.F) > w.size_bound:
        raise AssertionError(f"internal error: |F|={len(w.F)} exceeds (k+1)d^2={w.size_bound}")


def check_witness_at(A: Matrix, w: DeuberWitness, t: Sequence, F=None) -> bool:
    """Whether the lifted solution for ``t`` solves Ax = 0 with every
    coordinate in S(d, F; t).  ``F`` defaults to the witness's F with 0 and 1
    added."""
    x = w.solution(t)
    if any(A.apply(x)):
        return False
    members = s_set(SSetSpec(w.d, F if F is not None else w.F_with_unit(), tuple(t), w.field))
    return all(xi in members for xi in x)


@dataclass(frozen=True)
class HJLine:
    W: tuple[int, ...]
    z: tuple[int, ...]
    colour: int
    words: tuple[tuple[int, ...], ...]


def word_index(word: Sequence[int], k: int) -> int:
    idx = 0
    for letter in word:
        idx = idx * k + letter
    return idx


def hj_line_search(k: int, n: int, colouring: Sequence[int],
                   budget: int = HJ_BUDGET) -> HJLine | None:
    """First monochromatic combinatorial line in [k]^n, or None.

    Words use letters ``0..k-1``; ``colouring[i]`` colours the i-th word in
    lexicographic order.  Variable sets W are tried by size, then
    lexicographically; templates by lexicographic order of their fixed
    coordinates.  ``z`` has zeros on W.
    """
    if k < 1 or n < 1:
        raise InputError("need k >= 1 and n >= 1")
    if k ** n > budget:
        raise BudgetExceeded(f"{k}^{n} words exceeds budget {budget}")
    if len(colouring) != k ** n:
        raise DimensionMismatch(f"colouring has {len(colouring)} entries, expected {k ** n}")
    for size in range(1, n + 1):
        for W in combinations(range(n), size):
            fixed = [i for i in range(n) if i not in W]
            for values in product(range(k), repeat=len(fixed)):
                z = [0] * n
                for i, v in zip(fixed, values):
                    z[i] = v
                words = []
                for a in range(k):
                    w = list(z)
                    for i in W:
                        w[i] = a
                    words.append(tuple(w))
                colours = {colouring[word_index(w, k)] for w in words}
                if len(colours) == 1:
                    return HJLine(W=W, z=tuple(z), colour=colours.pop(), words=tuple(words))
    return None
