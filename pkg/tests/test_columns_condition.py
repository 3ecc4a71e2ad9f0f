import random
from itertools import combinations, combinations_with_replacement, product

import pytest

from modschur.columns_condition import (
    ColumnPartition, brauer_matrix, check_columns_condition, single_row_condition,
    verify_partition,
)
from modschur.errors import CompositeModulus, InputError, InvalidWitness, TooManyColumns
from modschur.exact_algebra import GF, QQ, Field, Matrix, span_member


def ordered_partitions(items):
    """Every ordered set partition of ``items``."""
    items = list(items)
    if not items:
        yield []
        return
    for size in range(1, len(items) + 1):
        for first in combinations(items, size):
            rest = [x for x in items if x not in first]
            for tail in ordered_partitions(rest):
                yield [first] + tail


def brute_force_cc(A):
    """Oracle: try every ordered partition, checking spans directly."""
    cols = A.columns()
    for parts in ordered_partitions(range(A.ncols)):
        earlier = []
        ok = True
        for part in parts:
            s = tuple(sum((cols[c][i] for c in part), A.field.zero) for i in range(A.nrows))
            if not span_member(s, earlier, A.field):
                ok = False
                break
            earlier += [cols[c] for c in part]
        if ok:
            return True
    return False


def zero_sum_subset_exists(row, p=None):
    """Oracle for one row: some nonempty subset of the nonzero entries sums to 0."""
    norm = (lambda x: x % p) if p else (lambda x: x)
    nz = [x for x in row if norm(x)]
    if not nz:
        return True
    for size in range(1, len(nz) + 1):
        for sub in combinations(nz, size):
            if norm(sum(sub)) == 0:
                return True
    return False


# -- golden examples ---------------------------------------------------------------

def test_schur_row_over_q():
    w = check_columns_condition(Matrix([[1, 1, -1]]))
    assert w.tolist() == [[0, 2], [1]]


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_schur_row_over_prime_fields(p):
    A = Matrix([[1, 1, -1]], GF(p))
    w = check_columns_condition(A)
    assert w is not None and verify_partition(A, w)


def test_one_p_minus_p():
    p = 7
    assert check_columns_condition(Matrix([[1, p, -p]], GF(p))) is None
    assert check_columns_condition(Matrix([[1, p, -p]])).tolist() == [[1, 2], [0]]


@pytest.mark.parametrize("k", [2, 3, 4, 5])
@pytest.mark.parametrize("field", [QQ, GF(5)])
def test_brauer_satisfies(k, field):
    A = brauer_matrix(k, field)
    w = check_columns_condition(A)
    assert w is not None and verify_partition(A, w)


def test_composite_modulus_rejected():
    with pytest.raises(CompositeModulus):
        check_columns_condition(Matrix([[1, 1, -1]], Field(6)))


def test_too_many_columns():
    A = Matrix([[1] * 11, [0] * 10 + [1]])
    with pytest.raises(TooManyColumns):
        check_columns_condition(A)


def test_single_row_shortcut_beyond_column_limit():
    A = Matrix([[1] * 11 + [-1]])
    w = check_columns_condition(A)
    assert w is not None and verify_partition(A, w)


# -- single-row criterion -------------------------------------------------------

def test_single_row_examples():
    assert single_row_condition([3, 1, -1], GF(7)).tolist() == [[1, 2], [0]]
    assert single_row_condition([0, 0, 0]).tolist() == [[0, 1, 2]]
    assert single_row_condition([1, 2, 3], GF(7)) is None
    assert single_row_condition([1, 2, 3]) is None


def test_single_row_1_2_3_against_subset_oracle():
    subsets = [s for k in range(1, 4) for s in combinations([1, 2, 3], k)]
    assert len(subsets) == 7
    assert all(sum(s) % 7 for s in subsets)


def test_single_row_witness_places_zeros_first():
    w = single_row_condition([0, 2, 5, -2, 0])
    assert w.tolist() == [[0, 1, 3, 4], [2]]


def _agree(row, field, p=None):
    A = Matrix([row], field)
    full = check_columns_condition(A)
    short = single_row_condition(row, field)
    assert (full is None) == (short is None) == (not zero_sum_subset_exists(row, p))
    for w in (full, short):
        if w is not None:
            assert verify_partition(A, w)


@pytest.mark.parametrize("field,p", [(QQ, None), (GF(5), 5)])
def test_single_row_agreement_small(field, p):
    for m in range(1, 5):
        for row in product(range(-3, 4), repeat=m):
            _agree(list(row), field, p)


@pytest.mark.parametrize("field,p", [(QQ, None), (GF(5), 5)])
def test_single_row_agreement_multisets(field, p):
    # Existence is invariant under permuting columns, so sorted rows cover
    # every case; a random permutation of each also checks the witness.
    rng = random.Random(5)
    for m in (5, 6):
        for row in combinations_with_replacement(range(-3, 4), m):
            row = list(row)
            _agree(row, field, p)
            rng.shuffle(row)
            _agree(row, field, p)


# -- multi-row against the brute-force oracle ------------------------------------

@pytest.mark.parametrize("field", [QQ, GF(3), GF(5)])
def test_multi_row_against_ordered_partitions(field):
    rng = random.Random(3)
    seen = set()
    for _ in range(120):
        n, m = rng.randint(1, 3), rng.randint(2, 5)
        A = Matrix([[rng.randint(-2, 2) for _ in range(m)] for _ in range(n)], field)
        w = check_columns_condition(A)
        assert (w is not None) == brute_force_cc(A)
        if w is not None:
            assert verify_partition(A, w)
        seen.add(w is not None)
    assert seen == {True, False}


def test_reduction_mod_p_consistent():
    rng = random.Random(9)
    for p in (2, 3, 5, 7):
        for _ in range(60):
            rows = [[rng.randint(-20, 20) for _ in range(4)] for _ in range(2)]
            reduced = [[x % p for x in r] for r in rows]
            a = check_columns_condition(Matrix(rows, GF(p)))
            b = check_columns_condition(Matrix(reduced, GF(p)))
            assert a == b


def test_witness_is_deterministic():
    A = brauer_matrix(4)
    assert check_columns_condition(A) == check_columns_condition(A)


# -- partitions -------------------------------------------------------------------

@pytest.mark.parametrize("parts", [((0,), (0, 1)), ((0,), ()), ((0, 2),)])
def test_partition_validation(parts):
    with pytest.raises(InputError):
        ColumnPartition(parts)


def test_verify_partition_rejects_bad_order():
    A = Matrix([[1, 1, -1]])
    assert not verify_partition(A, ColumnPartition(((1,), (0, 2))))
    assert verify_partition(A, ColumnPartition(((0, 2), (1,))))


# -- Brauer matrices -----------------------------------------------------------------

def test_brauer_rows():
    assert brauer_matrix(2).tolist() == [[-1, 1, -1]]
    assert brauer_matrix(3).tolist()[1] == [-1, 0, 1, -2]
    assert brauer_matrix(3).shape == (2, 4)


@pytest.mark.parametrize("k", range(2, 9))
def test_brauer_kills_progressions(k):
    rng = random.Random(k)
    A = brauer_matrix(k)
    for _ in range(20):
        x, c = rng.randint(-100, 100), rng.randint(-100, 100)
        v = [x + i * c for i in range(k)] + [c]
        assert not any(A.apply(v))


def test_brauer_needs_k_at_least_2():
    with pytest.raises(InputError):
        brauer_matrix(1)


def test_invalid_witness_error_is_input_error():
    assert issubclass(InvalidWitness, InputError)
