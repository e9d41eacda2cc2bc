"""Group algebra F[Z_2^k]: convolution equivalence, transform laws, marker polys."""

import random
from itertools import combinations

import numpy as np
import pytest

from conftest import GF8, gf2_rank
from qmonomial.fields import gf
from qmonomial.groupalg import (
    GroupAlgebraElem,
    GroupAlgebraError,
    MarkerPoly,
    ga_add,
    ga_mul,
    ga_mul_naive,
    ga_mul_wht,
    mp_add,
    mp_mul,
    wht_int,
)


def rand_elem(rng, k, field):
    return GroupAlgebraElem.from_ints(
        k, field, [rng.randrange(field.order) for _ in range(1 << k)])


def test_add_identities():
    k = 3
    x = GroupAlgebraElem.from_ints(k, GF8, [1, 2, 3, 4, 5, 6, 7, 0])
    zero = GroupAlgebraElem.zero(k, GF8)
    assert ga_add(x, zero) == x
    assert ga_add(x, x) == zero
    rng = random.Random(0)
    y = rand_elem(rng, k, GF8)
    s = ga_add(x, y)
    for i in range(8):
        assert int(s.coeffs[i]) == GF8.add(int(x.coeffs[i]), int(y.coeffs[i]))


def test_mul_identity_element():
    rng = random.Random(1)
    for k in (1, 3, 5):
        one = GroupAlgebraElem.one(k, GF8)
        y = rand_elem(rng, k, GF8)
        assert ga_mul_naive(one, y) == y
        assert ga_mul_wht(one, y, force=True) == y


def test_basis_group_law():
    k = 4
    for i in range(16):
        for j in range(16):
            vi = GroupAlgebraElem.basis(k, GF8, i)
            vj = GroupAlgebraElem.basis(k, GF8, j)
            assert ga_mul_naive(vi, vj) == GroupAlgebraElem.basis(k, GF8, i ^ j)


@pytest.mark.parametrize("k", range(1, 5))
def test_vector_plus_origin_squares_to_zero(k):
    for idx in range(1 << k):
        v = GroupAlgebraElem.vector_plus_origin(k, GF8, idx)
        assert ga_mul_naive(v, v).is_zero()
        assert ga_mul_wht(v, v, force=True).is_zero()


def test_wht_equals_naive_random():
    for k in range(1, 11):
        for d in (1, 3, 8):
            field = gf(d)
            rng = random.Random(100 * k + d)
            for _ in range(10):
                x = rand_elem(rng, k, field)
                y = rand_elem(rng, k, field)
                assert ga_mul_wht(x, y, force=True) == ga_mul_naive(x, y)


def test_dispatcher_small_k_uses_naive_but_agrees():
    rng = random.Random(9)
    for k in (1, 2, 3, 4):
        x = rand_elem(rng, k, GF8)
        y = rand_elem(rng, k, GF8)
        assert ga_mul(x, y) == ga_mul_naive(x, y)


def test_mismatch_errors():
    x = GroupAlgebraElem.zero(2, GF8)
    y = GroupAlgebraElem.zero(3, GF8)
    with pytest.raises(GroupAlgebraError):
        ga_add(x, y)
    z = GroupAlgebraElem.zero(2, gf(4))
    with pytest.raises(GroupAlgebraError):
        ga_mul_naive(x, z)


def test_wht_int_examples():
    assert list(wht_int([1, 0])) == [1, 1]
    a, b = 7, -3
    assert list(wht_int([a, b])) == [a + b, a - b]


def test_wht_int_double_application_scales():
    rng = random.Random(3)
    for k in range(1, 8):
        v = [rng.randrange(-50, 50) for _ in range(1 << k)]
        twice = wht_int(wht_int(v))
        assert list(twice) == [x << k for x in v]


@pytest.mark.parametrize("k", range(1, 5))
def test_wht_int_matches_matrix(k):
    n = 1 << k
    idx = np.arange(n)
    h = 1 - 2 * (np.bitwise_count(np.bitwise_and.outer(idx, idx)) & 1).astype(np.int64)
    rng = random.Random(k)
    v = np.array([rng.randrange(-9, 9) for _ in range(n)], dtype=np.int64)
    assert np.array_equal(wht_int(v), h @ v)


def test_wht_int_guards():
    with pytest.raises(GroupAlgebraError):
        wht_int([1, 2, 3])
    with pytest.raises(GroupAlgebraError):
        wht_int([1 << 62, 0])


def test_column_sums_small():
    for k in range(1, 7):
        n = 1 << k
        sums = wht_int([1] * n)
        assert sums[0] == n
        assert all(s == 0 for s in sums[1:])


@pytest.mark.parametrize("k", [1, 2, 3])
def test_span_law(k):
    field = gf(4)
    universe = list(range(1 << k))
    for size in range(0, min(5, 1 << k) + 1):
        for vs in combinations(universe, size):
            prod = GroupAlgebraElem.one(k, field)
            for v in vs:
                prod = ga_mul_naive(prod, GroupAlgebraElem.vector_plus_origin(k, field, v))
            independent = gf2_rank(vs) == len(vs)
            if not independent:
                assert prod.is_zero()
            else:
                span = {0}
                for v in vs:
                    span |= {s ^ v for s in span}
                assert prod.support() == span
                assert all(int(prod.coeffs[i]) == 1 for i in span)


def test_mul_commutative_associative_distributive():
    rng = random.Random(21)
    for k in range(1, 7):
        for _ in range(6):
            x, y, z = (rand_elem(rng, k, GF8) for _ in range(3))
            assert ga_mul_naive(x, y) == ga_mul_naive(y, x)
            assert ga_mul_naive(ga_mul_naive(x, y), z) == ga_mul_naive(x, ga_mul_naive(y, z))
            lhs = ga_mul_naive(x, ga_add(y, z))
            rhs = ga_add(ga_mul_naive(x, y), ga_mul_naive(x, z))
            assert lhs == rhs


def test_marker_poly_truncation_example():
    k = 2
    w = MarkerPoly.marker(1, k, GF8)
    prod = mp_mul(w, w)
    assert prod.is_zero()


def test_marker_poly_identity():
    k = 2
    rng = random.Random(4)
    parts = tuple(rand_elem(rng, k, GF8) for _ in range(3))
    p = MarkerPoly(2, parts)
    assert mp_mul(p, MarkerPoly.one(2, k, GF8)) == p
    assert mp_add(p, MarkerPoly.zero(2, k, GF8)) == p


def test_marker_poly_product_cap2():
    k = 2
    rng = random.Random(5)
    a = rand_elem(rng, k, GF8)
    b = rand_elem(rng, k, GF8)
    one = GroupAlgebraElem.one(k, GF8)
    p = MarkerPoly(2, (one, a, GroupAlgebraElem.zero(k, GF8)))
    q = MarkerPoly(2, (one, b, GroupAlgebraElem.zero(k, GF8)))
    prod = mp_mul(p, q)
    assert prod.coefficient(0) == one
    assert prod.coefficient(1) == ga_add(a, b)
    assert prod.coefficient(2) == ga_mul_naive(a, b)


def test_marker_poly_cap_mismatch():
    k = 1
    with pytest.raises(GroupAlgebraError):
        mp_add(MarkerPoly.one(1, k, GF8), MarkerPoly.one(2, k, GF8))


def test_marker_poly_mul_matches_bruteforce_convolution():
    k = 2
    rng = random.Random(6)
    for cap in (0, 1, 3):
        pa = tuple(rand_elem(rng, k, GF8) for _ in range(cap + 1))
        pb = tuple(rand_elem(rng, k, GF8) for _ in range(cap + 1))
        p, q = MarkerPoly(cap, pa), MarkerPoly(cap, pb)
        got = mp_mul(p, q)
        for e in range(cap + 1):
            want = GroupAlgebraElem.zero(k, GF8)
            for i in range(e + 1):
                want = ga_add(want, ga_mul_naive(pa[i], pb[e - i]))
            assert got.coefficient(e) == want
