import random
from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from modschur.columns_condition import (
    ColumnPartition, brauer_matrix, check_columns_condition,
)
from modschur.deuber import (
    SSetSpec, check_witness_at, deuber_witness, hj_line_search, is_F_independent, s_set,
    s_set_witnesses, word_index,
)
from modschur.errors import BudgetExceeded, DimensionMismatch, InputError, InvalidWitness
from modschur.exact_algebra import GF, QQ, Matrix


def brute_s_set(m, F, t, p):
    out = set()
    for j in range(m):
        for f in product(F, repeat=m - j - 1):
            out.add((t[j] + sum(a * b for a, b in zip(f, t[j + 1:]))) % p)
    return out


def brute_independent(t, F, p):
    for f in product(F, repeat=len(t)):
        if any(x % p for x in f) and sum(a * b for a, b in zip(f, t)) % p == 0:
            return False
    return True


# -- S(m, F; t) ----------------------------------------------------------------

def test_s_set_single_coordinate():
    assert {x.value for x in s_set(SSetSpec(1, {0, 1, 2}, (5,), GF(11)))} == {5}


def test_s_set_two_coordinates():
    S = s_set(SSetSpec(2, {0, 1}, (1, 2), GF(7)))
    assert {x.value for x in S} == {1, 2, 3}


def test_s_set_contains_every_coordinate_when_zero_in_F():
    t = (3, 8, 1, 9)
    S = s_set(SSetSpec(4, {0, 4}, t, GF(13)))
    assert all(GF(13)(x) in S for x in t)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_s_set_against_direct_expansion(p):
    rng = random.Random(p)
    for _ in range(40):
        m = rng.randint(1, 4)
        F = set(rng.sample(range(p), rng.randint(1, 3)))
        t = tuple(rng.randrange(p) for _ in range(m))
        S = s_set(SSetSpec(m, F, t, GF(p)))
        assert {x.value for x in S} == brute_s_set(m, F, t, p)
        assert len(S) <= m * len(F) ** (m - 1)


def test_s_set_witnesses_reverify():
    sspec = SSetSpec(3, {0, 2, 5}, (4, 1, 6), GF(11))
    wit = s_set_witnesses(sspec)
    assert set(wit) == s_set(sspec)
    for x, (j, f) in wit.items():
        total = sspec.t[j]
        for fi, ti in zip(f, sspec.t[j + 1:]):
            total = total + fi * ti
        assert total == x


def test_s_set_over_q():
    S = s_set(SSetSpec(2, {Fraction(1, 2)}, (1, 4), QQ))
    assert S == {Fraction(3), Fraction(4)}


def test_s_set_budget_and_shape_errors():
    with pytest.raises(BudgetExceeded):
        s_set(SSetSpec(8, set(range(10)), tuple(range(8)), GF(11)))
    with pytest.raises(DimensionMismatch):
        SSetSpec(3, {0}, (1, 2), GF(5))


# -- F-independence ------------------------------------------------------------

def test_independence_examples():
    assert is_F_independent((1,), {0, 1}, GF(5))
    assert not is_F_independent((1, 1), {0, 1}, GF(2))
    assert not is_F_independent((1, 3), {0, 1, 2}, GF(7))


def test_independence_without_zero_in_F():
    # 0 not in F: independence means no combination vanishes at all
    assert not is_F_independent((1, 6), {1}, GF(7))
    assert is_F_independent((1, 2), {1}, GF(7))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_independence_against_product_oracle(p):
    rng = random.Random(100 + p)
    for _ in range(150):
        t = [rng.randrange(p) for _ in range(rng.randint(1, 4))]
        F = set(rng.sample(range(p), rng.randint(1, min(p, 3))))
        assert is_F_independent(t, F, GF(p)) == brute_independent(t, F, p)


def test_random_t_is_usually_independent():
    p, F, size = 1009, {0, 1, 2}, 3
    rng = random.Random(0)
    hits = sum(is_F_independent([rng.randrange(p) for _ in range(size)], F, GF(p))
               for _ in range(1000))
    assert hits / 1000 >= 1 - len(F) ** size / p


def test_independence_budget():
    with pytest.raises(BudgetExceeded):
        is_F_independent(list(range(1, 40)), set(range(50)), GF(10007), budget=1000)


# -- witness matrices ------------------------------------------------------------

def _random_rationals(rng, d):
    return tuple(Fraction(rng.randint(-50, 50), rng.randint(1, 20)) for _ in range(d))


def test_schur_witness_chain():
    A = Matrix([[1, 1, -1]])
    w = deuber_witness(A, ColumnPartition(((0, 2), (1,))))
    assert w.d == 2
    assert len(w.F) <= w.size_bound
    rng = random.Random(0)
    for _ in range(100):
        t = _random_rationals(rng, w.d)
        x = w.point(t)
        assert not any(w.reduced.apply(x))
        assert check_witness_at(A, w, t)


def test_brauer_witness_exhaustive_f7():
    A = brauer_matrix(3, GF(7))
    w = deuber_witness(A, check_columns_condition(A))
    assert len(w.F) <= (A.nrows + 1) * w.d ** 2
    for t in product(range(7), repeat=w.d):
        assert not any(A.apply(w.solution(t)))
        assert check_witness_at(A, w, t)


def test_witness_shape_and_column_map():
    A = brauer_matrix(4)
    w = deuber_witness(A, check_columns_condition(A))
    assert w.W.shape == (w.q, w.d)
    assert w.reduced.shape == (A.nrows, w.q)
    assert len(w.column_map) == A.ncols
    assert all(0 <= i < w.q for i in w.column_map)
    assert (w.reduced @ w.W).is_zero()


def test_trailing_dimension_neutral_parts_are_kept():
    # (1 1 -1) with parts {0,2} then {1}: the second part adds no new
    # dimension, so d may exceed the number of rows.
    A = Matrix([[1, 1, -1]])
    w = deuber_witness(A, ColumnPartition(((0, 2), (1,))))
    assert w.d == A.nrows + 1
    # with d = 1 every coordinate would equal t, and (t, t, t) solves x + y = z only at t = 0
    assert any(A.apply((Fraction(1),) * 3))


def test_invalid_partition_rejected():
    A = Matrix([[1, 1, -1]])
    with pytest.raises(InvalidWitness):
        deuber_witness(A, ColumnPartition(((1,), (0, 2))))


def _random_cc_matrices(rng, field, count):
    out = []
    while len(out) < count:
        n, m = rng.randint(1, 3), rng.randint(2, 5)
        if field.is_rational:
            A = Matrix([[rng.randint(-3, 3) for _ in range(m)] for _ in range(n)], field)
        else:
            A = Matrix([[rng.randrange(field.modulus) for _ in range(m)] for _ in range(n)],
                       field)
        part = check_columns_condition(A)
        if part is not None:
            out.append((A, part))
    return out


@pytest.mark.parametrize("field", [QQ, GF(5), GF(7)])
def test_witness_chain_on_random_systems(field):
    rng = random.Random(21)
    for A, part in _random_cc_matrices(rng, field, 40):
        w = deuber_witness(A, part)
        assert len(w.F) <= (A.nrows + 1) * w.d ** 2
        assert w.d <= A.nrows + 1
        for _ in range(10):
            if field.is_rational:
                t = _random_rationals(rng, w.d)
            else:
                t = tuple(rng.randrange(field.modulus) for _ in range(w.d))
            assert check_witness_at(A, w, t)


# -- Hales-Jewett lines ------------------------------------------------------------

def brute_lines(k, n):
    """Every combinatorial line of [k]^n as a tuple of word indices."""
    out = []
    for size in range(1, n + 1):
        for W in combinations(range(n), size):
            fixed = [i for i in range(n) if i not in W]
            for vals in product(range(k), repeat=len(fixed)):
                words = []
                for a in range(k):
                    w = [a] * n
                    for i, v in zip(fixed, vals):
                        w[i] = v
                    words.append(word_index(w, k))
                out.append(words)
    return out


def _check_line(line, k, colouring):
    assert line.W
    assert len(line.words) == k
    assert {colouring[word_index(w, k)] for w in line.words} == {line.colour}
    for a, w in enumerate(line.words):
        assert all(w[i] == a for i in line.W)
        assert all(w[i] == line.z[i] for i in range(len(w)) if i not in line.W)


def test_constant_colouring_uses_first_coordinate():
    line = hj_line_search(2, 2, [0, 0, 0, 0])
    assert line.W == (0,)
    _check_line(line, 2, [0, 0, 0, 0])


def test_every_two_colouring_of_2x2_has_a_line():
    for colouring in product(range(2), repeat=4):
        line = hj_line_search(2, 2, colouring)
        assert line is not None
        _check_line(line, 2, colouring)


def test_bichromatic_single_coordinate_has_no_line():
    assert hj_line_search(2, 1, [0, 1]) is None


@pytest.mark.parametrize("k,n,r", [(2, 3, 2), (3, 2, 2), (3, 2, 3)])
def test_line_search_against_oracle(k, n, r):
    lines = brute_lines(k, n)
    rng = random.Random(k * 10 + n + r)
    for _ in range(300):
        colouring = [rng.randrange(r) for _ in range(k ** n)]
        expected = any(len({colouring[i] for i in ln}) == 1 for ln in lines)
        line = hj_line_search(k, n, colouring)
        assert (line is not None) == expected
        if line is not None:
            _check_line(line, k, colouring)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 3), st.integers(1, 3), st.data())
def test_returned_lines_are_monochromatic(k, n, data):
    colouring = data.draw(st.lists(st.integers(0, 2), min_size=k ** n, max_size=k ** n))
    line = hj_line_search(k, n, colouring)
    if line is not None:
        _check_line(line, k, colouring)


def test_line_search_errors():
    with pytest.raises(BudgetExceeded):
        hj_line_search(10, 7, [0])
    with pytest.raises(DimensionMismatch):
        hj_line_search(2, 2, [0, 1])
    with pytest.raises(InputError):
        hj_line_search(0, 2, [])
