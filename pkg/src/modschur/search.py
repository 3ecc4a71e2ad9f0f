"""Exact colouring search for Rado, Schur and modular Schur numbers.

A :class:`ConstraintSystem` pairs an integer matrix with a ground set,
either ``Interval(N)`` = {1..N} with integer arithmetic or
``ModularStar(M)`` = {1..M-1} with arithmetic mod M.  The searcher decides
whether some r-colouring of the ground set leaves every solution of Ax = 0
non-monochromatic.

Solutions with repeated coordinates count (1 + 1 = 2 is a Schur triple),
and 0 is never in the ground set.

Colour symmetry is broken by only allowing element i a colour at most one
above the largest colour used before it.  Any valid colouring can be
relabelled into that form by numbering colours in order of first use, so
this removes duplicates without losing existence.
"""

from __future__ import annotations

import enum
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded, InputError, SearchTimeout

ENUMERATION_BUDGET = 10**8


@dataclass(frozen=True)
class Ground:
    """A finite ground set of residues or positive integers."""

    kind: str
    size: int

    KINDS = ("interval", "modstar", "zmod")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InputError(f"unknown ground kind {self.kind!r}")
        minimum = 2 if self.kind == "modstar" else 1
        if self.size < minimum:
            raise InputError(f"{self.kind} ground needs size >= {minimum}, got {self.size}")

    @property
    def modulus(self) -> int | None:
        return None if self.kind == "interval" else self.size

    @property
    def first(self) -> int:
        return 0 if self.kind == "zmod" else 1

    def elements(self) -> range:
        if self.kind == "interval":
            return range(1, self.size + 1)
        if self.kind == "modstar":
            return range(1, self.size)
        return range(self.size)

    def __len__(self):
        return len(self.elements())

    @property
    def header(self) -> str:
        return f"ground={self.kind}:{self.size}"

    @classmethod
    def parse(cls, header: str) -> "Ground":
        text = header.strip()
        if not text.startswith("ground="):
            raise InputError(f"expected 'ground=<kind>:<size>', got {text!r}")
        kind, _, size = text[len("ground="):].partition(":")
        try:
            return cls(kind, int(size))
        except ValueError:
            raise InputError(f"bad ground size in {text!r}") from None


def Interval(N: int) -> Ground:
    return Ground("interval", N)


def ModularStar(M: int) -> Ground:
    return Ground("modstar", M)


def ZMod(N: int) -> Ground:
    return Ground("zmod", N)


@dataclass(frozen=True)
class ConstraintSystem:
    A: tuple[tuple[int, ...], ...]
    domain: Ground

    def __post_init__(self):
        A = tuple(tuple(int(x) for x in row) for row in self.A)
        object.__setattr__(self, "A", A)
        if not A or not A[0]:
            raise InputError("constraint matrix must be nonempty")
        if any(len(r) != len(A[0]) for r in A):
            raise InputError("ragged constraint matrix")
        if self.domain.kind == "zmod":
            raise InputError("constraint systems live on interval or modstar grounds")
        for j in range(len(A[0])):
            if all(self._reduce(r[j]) == 0 for r in A):
                raise InputError(f"column {j} is identically zero")

    def _reduce(self, v: int) -> int:
        M = self.domain.modulus
        return v if M is None else v % M

    @property
    def m(self) -> int:
        return len(self.A[0])

    def is_solution(self, x: Sequence[int]) -> bool:
        return all(self._reduce(sum(a * xi for a, xi in zip(row, x))) == 0 for row in self.A)

    def describe(self) -> str:
        return f"A={[list(r) for r in self.A]} {self.domain.header}"


def _solve_last(sys: ConstraintSystem):
    """A row whose last coefficient determines the last coordinate, if any."""
    M = sys.domain.modulus
    for row in sys.A:
        a = row[-1]
        if M is None and a != 0:
            return row, None
        if M is not None and math.gcd(a, M) == 1:
            return row, pow(a, -1, M)
    return None


def enumerate_solutions(sys: ConstraintSystem, budget: int = ENUMERATION_BUDGET
                        ) -> Iterator[tuple[int, ...]]:
    """Yield every x in ground^m with Ax = 0, in lexicographic order."""
    ground = sys.domain.elements()
    lo, hi = ground.start, ground.stop - 1
    n = len(ground)
    m = sys.m
    M = sys.domain.modulus
    pivot = _solve_last(sys)
    free = m - 1 if pivot is not None else m
    if n ** free > budget:
        raise BudgetExceeded(f"{n}^{free} candidate tuples exceeds budget {budget}")
    if pivot is None:
        for x in itertools.product(ground, repeat=m):
            if sys.is_solution(x):
                yield x
        return
    row, inv = pivot
    a_last = row[-1]
    for prefix in itertools.product(ground, repeat=m - 1):
        partial = sum(a * xi for a, xi in zip(row, prefix))
        if M is None:
            q, rem = divmod(-partial, a_last)
            if rem:
                continue
            last = q
        else:
            last = (-partial * inv) % M
        if last < lo or last > hi:
            continue
        x = prefix + (last,)
        if sys.is_solution(x):
            yield x


@dataclass(frozen=True)
class Colouring:
    """Colour indices ``colours[i]`` for the i-th ground element (ascending)."""

    ground: Ground
    colours: tuple[int, ...]
    r: int

    def __post_init__(self):
        object.__setattr__(self, "colours", tuple(int(c) for c in self.colours))
        if len(self.colours) != len(self.ground):
            raise InputError(
                f"colouring has {len(self.colours)} entries for {len(self.ground)} elements")
        if self.r < 1 or any(c < 0 or c >= self.r for c in self.colours):
            raise InputError(f"colours must lie in 0..{self.r - 1}")

    def colour_of(self, element: int) -> int:
        return self.colours[element - self.ground.first]

    def classes(self) -> list[list[int]]:
        out = [[] for _ in range(self.r)]
        for e, c in zip(self.ground.elements(), self.colours):
            out[c].append(e)
        return out

    def restrict(self, n: int) -> "Colouring":
        """The colouring of the first ``n`` elements, on an interval ground."""
        return Colouring(Interval(n), self.colours[:n], self.r)

    @property
    def certificate(self) -> str:
        return ",".join(str(c) for c in self.colours)

    def to_text(self) -> str:
        return f"{self.ground.header}\n{self.certificate}\n"

    @classmethod
    def from_text(cls, text: str, ground: Ground | None = None, r: int | None = None
                  ) -> "Colouring":
        """Parse a colouring file: a ``ground=`` header then one line of colours.

        ``ground`` supplies the ground set when the header is absent.
        Colours may be separated by commas or whitespace.
        """
        lines = [ln.strip() for ln in text.splitlines()
                 if ln.strip() and not ln.strip().startswith("#")]
        if lines and lines[0].startswith("ground="):
            parsed = Ground.parse(lines[0])
            if ground is not None and parsed != ground:
                raise InputError(f"colouring header {parsed.header} does not match {ground.header}")
            ground = parsed
            lines = lines[1:]
        if ground is None:
            raise InputError("colouring file needs a 'ground=<kind>:<size>' header line")
        colours = parse_index_list(" ".join(lines))
        if r is None:
            r = max(colours, default=0) + 1
        return cls(ground, tuple(colours), r)


def parse_index_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise InputError(f"bad colour index: {exc}") from None


def monochromatic_solutions(sys: ConstraintSystem, colouring: Colouring) -> list[tuple]:
    """Solutions (from :func:`enumerate_solutions`) whose entries share a colour."""
    if colouring.ground != sys.domain:
        raise InputError("colouring and system have different ground sets")
    return [x for x in enumerate_solutions(sys)
            if len({colouring.colour_of(e) for e in x}) == 1]


def verify_by_classes(sys: ConstraintSystem, colouring: Colouring) -> list[tuple]:
    """Independent certificate check: scan class^m for each colour class.

    Does not share code with the solution enumerator, so it can be used to
    audit it.
    """
    if colouring.ground != sys.domain:
        raise InputError("colouring and system have different ground sets")
    bad = []
    for cls in colouring.classes():
        for x in itertools.product(cls, repeat=sys.m):
            if sys.is_solution(x):
                bad.append(x)
    return sorted(bad)


class Status(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    TIMEOUT = "timeout"


@dataclass
class SearchStats:
    nodes: int = 0
    propagations: int = 0
    wall_time: float = 0.0

    def asdict(self) -> dict:
        return {"nodes": self.nodes, "propagations": self.propagations,
                "wall_time": round(self.wall_time, 6)}


@dataclass
class SearchOutcome:
    status: Status
    colouring: Colouring | None = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def is_sat(self) -> bool:
        return self.status is Status.SAT


def _supports(sys: ConstraintSystem) -> set[frozenset]:
    return {frozenset(x) for x in enumerate_solutions(sys)}


def valid_colouring_exists(sys: ConstraintSystem, r: int, budget: int | None = None,
                           timeout: float | None = None) -> SearchOutcome:
    """Backtracking search for an r-colouring with no monochromatic solution.

    Elements are coloured in ascending order.  When element e is reached,
    every solution whose largest entry is e has all its other entries
    coloured, so e may not take the colour of any such solution whose other
    entries already share one colour.  ``budget`` caps search nodes and
    ``timeout`` caps seconds; hitting either gives status TIMEOUT.
    """
    if r < 1:
        raise InputError("need at least one colour")
    start = time.monotonic()
    stats = SearchStats()
    elements = list(sys.domain.elements())
    n = len(elements)
    first = elements[0]

    # partners[i]: bitmasks (over element positions) of the rest of each
    # solution support whose largest element is position i.
    partners: list[list[int]] = [[] for _ in range(n)]
    for s in _supports(sys):
        pos = sorted(e - first for e in s)
        top = pos[-1]
        if len(pos) == 1:
            stats.wall_time = time.monotonic() - start
            return SearchOutcome(Status.UNSAT, None, stats)
        mask = 0
        for p in pos[:-1]:
            mask |= 1 << p
        partners[top].append(mask)
    for lst in partners:
        lst.sort()
    lowest = [[(p & -p).bit_length() - 1 for p in lst] for lst in partners]

    colour = [0] * n
    class_mask = [0] * r
    deadline = None if timeout is None else start + timeout
    node_cap = budget

    class _Stop(Exception):
        pass

    def rec(i: int, max_used: int) -> bool:
        if i == n:
            return True
        stats.nodes += 1
        if node_cap is not None and stats.nodes > node_cap:
            raise _Stop
        if deadline is not None and stats.nodes & 1023 == 0 and time.monotonic() > deadline:
            raise _Stop
        forbidden = 0
        for p, low in zip(partners[i], lowest[i]):
            c = colour[low]
            if class_mask[c] & p == p:
                forbidden |= 1 << c
        stats.propagations += len(partners[i])
        bit = 1 << i
        for c in range(min(max_used + 2, r)):
            if forbidden >> c & 1:
                continue
            colour[i] = c
            class_mask[c] |= bit
            if rec(i + 1, max(max_used, c)):
                return True
            class_mask[c] &= ~bit
        return False

    try:
        found = rec(0, -1)
    except _Stop:
        stats.wall_time = time.monotonic() - start
        return SearchOutcome(Status.TIMEOUT, None, stats)
    stats.wall_time = time.monotonic() - start
    if not found:
        return SearchOutcome(Status.UNSAT, None, stats)
    result = Colouring(sys.domain, tuple(colour), r)
    if monochromatic_solutions(sys, result):
        raise AssertionError("internal error: search returned an invalid certificate")
    return SearchOutcome(Status.SAT, result, stats)


def _remaining(deadline: float | None) -> float | None:
    if deadline is None:
        return None
    return max(0.0, deadline - time.monotonic())


@dataclass
class NumberResult:
    """Outcome of a Rado / Schur number computation.

    ``certificate`` colours the largest admissible ground set (None when the
    value is 0); ``witness_stats`` and ``refutation_stats`` are the search
    statistics for that ground set and for the refuted one just above it.
    """

    value: int
    certificate: Colouring | None
    witness_stats: SearchStats | None
    refutation_stats: SearchStats | None
    search_range: tuple[int, int] = (1, 0)
    decided: dict = field(default_factory=dict)


def _run(sys, r, budget, deadline, what):
    outcome = valid_colouring_exists(sys, r, budget=budget, timeout=_remaining(deadline))
    if outcome.status is Status.TIMEOUT:
        raise SearchTimeout(f"search timed out on {what}", outcome)
    return outcome


def rado_number(A: Sequence[Sequence[int]], r: int, budget: int | None = None,
                timeout: float | None = None, max_n: int | None = None) -> NumberResult:
    """Largest N such that some r-colouring of [N] has no monochromatic Ax = 0.

    Grows N from 1 until the first N with no valid colouring; validity is
    inherited by initial segments, so the answer is one less.  ``max_n``
    guards against systems with no finite value.
    """
    A = tuple(tuple(row) for row in A)
    deadline = None if timeout is None else time.monotonic() + timeout
    last_sat: SearchOutcome | None = None
    decided = {}
    N = 1
    while True:
        if max_n is not None and N > max_n:
            raise BudgetExceeded(f"no refutation found for N <= {max_n}")
        sys = ConstraintSystem(A, Interval(N))
        outcome = _run(sys, r, budget, deadline, f"[{N}]")
        decided[N] = outcome.status.value
        if not outcome.is_sat:
            return NumberResult(
                value=N - 1,
                certificate=last_sat.colouring if last_sat else None,
                witness_stats=last_sat.stats if last_sat else None,
                refutation_stats=outcome.stats,
                search_range=(1, N),
                decided=decided,
            )
        last_sat = outcome
        N += 1


def schur_matrix(a: int = 1) -> tuple[tuple[int, ...], ...]:
    """The single row (a, 1, -1): a*x + y = z."""
    return ((a, 1, -1),)


def modular_schur_number(a: int, r: int, max_n: int | None = None,
                         require_coprime: bool = False, budget: int | None = None,
                         timeout: float | None = None) -> NumberResult:
    """Largest N with an r-colouring of [N] free of a*x + y = z (mod N+1).

    Every such colouring is also free of integer solutions, so N never
    exceeds the Schur-type value f_a(r), which is computed first and used as
    the search cap unless ``max_n`` is given.  Each N is decided on its own,
    from the cap downward.  With ``require_coprime`` only N with
    gcd(a, N+1) = 1 are considered.  Returns value 0 if no N qualifies.
    """
    if a < 1:
        raise InputError("a must be a positive integer")
    deadline = None if timeout is None else time.monotonic() + timeout
    if max_n is None:
        cap = rado_number(schur_matrix(a), r, budget=budget, timeout=_remaining(deadline)).value
    else:
        cap = max_n
    decided = {}
    prev_stats = None
    for N in range(cap, 0, -1):
        if require_coprime and math.gcd(a, N + 1) != 1:
            continue
        if a % (N + 1) == 0:
            # Every x gives the monochromatic solution (x, x, x).
            decided[N] = Status.UNSAT.value
            continue
        sys = ConstraintSystem(schur_matrix(a), ModularStar(N + 1))
        outcome = _run(sys, r, budget, deadline, f"Z/{N + 1}Z")
        decided[N] = outcome.status.value
        if outcome.is_sat:
            return NumberResult(N, outcome.colouring, outcome.stats, prev_stats,
                                search_range=(1, cap), decided=decided)
        prev_stats = outcome.stats
    return NumberResult(0, None, None, prev_stats, search_range=(1, cap), decided=decided)


def cnf_var(element: int, colour: int, r: int, first: int = 1) -> int:
    """DIMACS variable for "element has colour" (elements 1-based)."""
    return (element - first) * r + colour + 1


def export_cnf(sys: ConstraintSystem, r: int, budget: int = ENUMERATION_BUDGET) -> str:
    """DIMACS CNF that is satisfiable iff a valid r-colouring exists.

    Clauses, in order: at-least-one colour per element, pairwise at-most-one
    per element, then for each distinct solution support and colour a
    clause forbidding that support from being monochromatic.
    """
    if r < 1:
        raise InputError("need at least one colour")
    elements = list(sys.domain.elements())
    first = elements[0]
    clauses: list[list[int]] = []
    for e in elements:
        clauses.append([cnf_var(e, c, r, first) for c in range(r)])
    for e in elements:
        for c1, c2 in itertools.combinations(range(r), 2):
            clauses.append([-cnf_var(e, c1, r, first), -cnf_var(e, c2, r, first)])
    supports = sorted({tuple(sorted(set(x))) for x in enumerate_solutions(sys, budget)})
    for s in supports:
        for c in range(r):
            clauses.append([-cnf_var(e, c, r, first) for e in s])
    nvars = len(elements) * r
    lines = [
        "c modschur colouring instance",
        f"c system {sys.describe()} r={r}",
        f"c variable (e-{first})*{r}+c+1 means element e has colour c",
        f"p cnf {nvars} {len(clauses)}",
    ]
    lines += [" ".join(map(str, cl)) + " 0" for cl in clauses]
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    nvars = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"bad DIMACS header {line!r}")
            nvars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if nvars is None:
        raise InputError("missing 'p cnf' header")
    if current:
        clauses.append(current)
    return nvars, clauses


def decode_model(sys: ConstraintSystem, r: int, model: Iterable[int]) -> Colouring:
    """Turn a satisfying assignment (true literals) into a colouring."""
    true = {lit for lit in model if lit > 0}
    elements = list(sys.domain.elements())
    first = elements[0]
    colours = []
    for e in elements:
        cs = [c for c in range(r) if cnf_var(e, c, r, first) in true]
        if not cs:
            raise InputError(f"model gives element {e} no colour")
        colours.append(cs[0])
    return Colouring(sys.domain, tuple(colours), r)
