"""Exact scalars and small dense matrices over Q and Z/mZ.

Rationals are ``fractions.Fraction``; residues are :class:`Mod`.  A
:class:`Field` value tags which of the two a matrix lives over.  Row
reduction and span tests require a genuine field, so ``Field(m)`` with
composite ``m`` is usable for ring arithmetic only.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import CompositeModulus, DimensionMismatch, FieldMismatch, InputError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


class Mod:
    """A residue ``value mod modulus`` kept reduced into ``[0, modulus)``."""

    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: int):
        if modulus < 2:
            raise InputError(f"modulus must be >= 2, got {modulus}")
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "value", value % modulus)

    def __setattr__(self, name, value):
        raise AttributeError("Mod is immutable")

    def _coerce(self, other) -> int | None:
        if isinstance(other, Mod):
            if other.modulus != self.modulus:
                raise FieldMismatch(
                    f"cannot combine residues mod {self.modulus} and mod {other.modulus}")
            return other.value
        if isinstance(other, int):
            return other
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Mod(self.value + o, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Mod(self.value - o, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Mod(o - self.value, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Mod(self.value * o, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return Mod(-self.value, self.modulus)

    def inverse(self) -> "Mod":
        try:
            return Mod(pow(self.value, -1, self.modulus), self.modulus)
        except ValueError:
            raise ZeroDivisionError(f"{self.value} is not invertible mod {self.modulus}") from None

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * Mod(o, self.modulus).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Mod(o, self.modulus) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, Mod):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"Mod({self.value}, {self.modulus})"

    def __str__(self):
        return str(self.value)


Scalar = Union[Fraction, Mod]


class Field:
    """Q when ``modulus`` is None, otherwise the residues mod ``modulus``.

    Calling a field coerces ints (and, for residues, Fractions whose
    denominator is a unit) into it.
    """

    __slots__ = ("modulus",)

    def __init__(self, modulus: int | None = None):
        if modulus is not None and modulus < 2:
            raise InputError(f"modulus must be >= 2, got {modulus}")
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    @classmethod
    def parse(cls, text: str) -> "Field":
        text = text.strip()
        if text in ("Q", "QQ"):
            return QQ
        m = re.fullmatch(r"F_?(\d+)", text)
        if not m:
            raise InputError(f"unknown field {text!r}; expected 'Q' or 'F<p>'")
        return cls(int(m.group(1)))

    @property
    def is_rational(self) -> bool:
        return self.modulus is None

    @property
    def is_field(self) -> bool:
        return self.modulus is None or is_prime(self.modulus)

    def require_field(self):
        if not self.is_field:
            raise CompositeModulus(f"modulus {self.modulus} is not prime")

    def __call__(self, value) -> Scalar:
        if self.modulus is None:
            if isinstance(value, Mod):
                raise FieldMismatch("cannot lift a residue to Q")
            return Fraction(value)
        if isinstance(value, Mod):
            if value.modulus != self.modulus:
                raise FieldMismatch(f"residue mod {value.modulus} is not in {self}")
            return value
        if isinstance(value, Fraction):
            return Mod(value.numerator, self.modulus) / value.denominator
        return Mod(int(value), self.modulus)

    @property
    def zero(self) -> Scalar:
        return self(0)

    @property
    def one(self) -> Scalar:
        return self(1)

    def contains(self, x) -> bool:
        if self.modulus is None:
            return isinstance(x, Fraction)
        return isinstance(x, Mod) and x.modulus == self.modulus

    def elements(self):
        """All elements of a finite field/ring, in residue order."""
        if self.modulus is None:
            raise InputError("Q is infinite")
        return [Mod(i, self.modulus) for i in range(self.modulus)]

    def __eq__(self, other):
        return isinstance(other, Field) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("Field", self.modulus))

    def __str__(self):
        return "Q" if self.modulus is None else f"F{self.modulus}"

    def __repr__(self):
        return f"Field({self.modulus})"


QQ = Field()


def GF(p: int) -> Field:
    field = Field(p)
    field.require_field()
    return field


class Matrix:
    """Dense, immutable n x m matrix with entries in one :class:`Field`."""

    __slots__ = ("field", "rows")

    def __init__(self, rows: Iterable[Iterable], field: Field = QQ):
        rows = tuple(tuple(field(x) for x in row) for row in rows)
        if not rows or not rows[0]:
            raise DimensionMismatch("matrix needs at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionMismatch("ragged matrix rows")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> "Matrix":
        return Matrix(self.columns(), self.field)

    def over(self, field: Field) -> "Matrix":
        """The same integer/rational entries read in another field."""
        if self.field.is_rational:
            return Matrix(self.rows, field)
        if field == self.field:
            return self
        return Matrix([[int(x) for x in r] for r in self.rows], field)

    def apply(self, vector: Sequence) -> tuple:
        if len(vector) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(vector)} for {self.ncols} columns")
        vec = [self.field(x) for x in vector]
        return tuple(_dot(row, vec, self.field) for row in self.rows)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if other.nrows != self.ncols:
                raise DimensionMismatch(f"{self.shape} @ {other.shape}")
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} @ {other.field}")
            cols = [self.apply(c) for c in other.columns()]
            return Matrix(zip(*cols), self.field)
        return self.apply(other)

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.field == other.field and self.rows == other.rows

    def __hash__(self):
        return hash((self.field, self.rows))

    def __repr__(self):
        return f"Matrix({[[str(x) for x in r] for r in self.rows]}, {self.field})"

    def tolist(self) -> list[list]:
        """Entries as ints (residues) or ints/str fractions for JSON."""
        return [[_plain(x) for x in r] for r in self.rows]

    def to_text(self) -> str:
        lines = [f"{self.nrows} {self.ncols} {self.field}"]
        lines += [" ".join(str(x) for x in r) for r in self.rows]
        return "\n".join(lines) + "\n"


def _plain(x):
    if isinstance(x, Mod):
        return x.value
    if x.denominator == 1:
        return x.numerator
    return str(x)


def _dot(a, b, field: Field):
    acc = field.zero
    for x, y in zip(a, b):
        if x and y:
            acc = acc + x * y
    return acc


def _rref_rows(rows: list[list], ncols: int, field: Field):
    """In-place Gauss-Jordan on a list of row lists. Returns pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = field.one / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def rref(M: Matrix) -> tuple[int, list[int], Matrix]:
    """Reduced row-echelon form of ``M``.

    Returns ``(rank, pivot_columns, reduced)``; ``reduced`` keeps the shape of
    ``M`` with zero rows at the bottom.
    """
    M.field.require_field()
    rows = [list(r) for r in M.rows]
    pivots = _rref_rows(rows, M.ncols, M.field)
    return len(pivots), pivots, Matrix(rows, M.field)


def rank(vectors: Sequence[Sequence], field: Field) -> int:
    """Rank of a (possibly empty) list of equal-length vectors."""
    field.require_field()
    vectors = [[field(x) for x in v] for v in vectors]
    if not vectors:
        return 0
    width = len(vectors[0])
    if any(len(v) != width for v in vectors):
        raise DimensionMismatch("vectors of different lengths")
    return len(_rref_rows(vectors, width, field))


def solve(M: Matrix, b: Sequence) -> tuple | None:
    """One solution of ``M x = b``, or None if inconsistent.

    Free variables are set to zero, so the answer is deterministic.
    """
    M.field.require_field()
    if len(b) != M.nrows:
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {M.nrows} rows")
    field = M.field
    aug = [list(r) + [field(x)] for r, x in zip(M.rows, b)]
    pivots = _rref_rows(aug, M.ncols + 1, field)
    if pivots and pivots[-1] == M.ncols:
        return None
    x = [field.zero] * M.ncols
    for i, c in enumerate(pivots):
        x[c] = aug[i][-1]
    return tuple(x)


def span_member(v: Sequence, basis: Sequence[Sequence], field: Field) -> bool:
    """Whether ``v`` is a linear combination of ``basis`` over ``field``.

    The empty basis spans only the zero vector.
    """
    field.require_field()
    v = [field(x) for x in v]
    if any(len(b) != len(v) for b in basis):
        raise DimensionMismatch("basis vectors and v must have the same length")
    if not basis:
        return not any(v)
    if not v:
        return True
    # Columns of the system are the basis vectors.
    return solve(Matrix(list(zip(*basis)), field), v) is not None


def vector_sum(vectors: Iterable[Sequence], length: int, field: Field) -> tuple:
    acc = [field.zero] * length
    for v in vectors:
        acc = [a + field(x) for a, x in zip(acc, v)]
    return tuple(acc)


_COMMENT = re.compile(r"#.*")


def parse_matrix(text: str, field: Field | None = None) -> Matrix:
    """Parse the ``n m field`` text format.

    ``field`` overrides the header's field tag when given; entries are read
    as integers (reduced mod p for ``F<p>``).
    """
    tokens = []
    for line in text.splitlines():
        line = _COMMENT.sub("", line).strip()
        if line:
            tokens.append(line.split())
    if not tokens:
        raise InputError("empty matrix file")
    header = tokens[0]
    if len(header) != 3:
        raise InputError(f"matrix header must be 'n m field', got {' '.join(header)!r}")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise InputError(f"bad matrix dimensions {header[:2]}") from None
    header_field = Field.parse(header[2])
    body = tokens[1:]
    if len(body) != n or any(len(r) != m for r in body):
        raise DimensionMismatch(f"expected {n} rows of {m} integers")
    try:
        ints = [[int(x) for x in r] for r in body]
    except ValueError as exc:
        raise InputError(f"non-integer matrix entry: {exc}") from None
    return Matrix(ints, field or header_field)


def integer_rows(M: Matrix) -> list[list[int]]:
    """Entries of a matrix over Q as ints; raises if any entry is fractional."""
    out = []
    for r in M.rows:
        row = []
        for x in r:
            if isinstance(x, Mod):
                row.append(x.value)
            elif x.denominator != 1:
                raise InputError(f"non-integer entry {x}")
            else:
                row.append(x.numerator)
        out.append(row)
    return out
