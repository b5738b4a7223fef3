"""Field contexts: construction, arithmetic laws, Frobenius, embeddings."""

import pytest
from hypothesis import given, settings, strategies as st

from frobtwist.fields import (BudgetError, embedding, make_field,
                              subfield_degree)


F7 = make_field(7, 1)
F8 = make_field(2, 3)
F81 = make_field(3, 4)


def test_make_field_basics():
    assert F7.order == 7
    assert F8.order == 8
    assert F81.order == 81
    assert F81.p == 3 and F81.N == 4


def test_make_field_rejects_bad_input():
    with pytest.raises(ValueError):
        make_field(6, 1)
    with pytest.raises(ValueError):
        make_field(7, 0)


def test_from_int_to_int_roundtrip():
    for ctx in (F7, F8, F81):
        for v in range(ctx.order):
            assert ctx.to_int(ctx.from_int(v)) == v


def test_prime_field_matches_residue_arithmetic():
    for a in range(7):
        for b in range(7):
            ea, eb = F7.from_int(a), F7.from_int(b)
            assert F7.to_int(F7.add(ea, eb)) == (a + b) % 7
            assert F7.to_int(F7.mul(ea, eb)) == (a * b) % 7


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 80), st.integers(0, 80), st.integers(0, 80))
def test_ring_laws_f81(a, b, c):
    ea, eb, ec = (F81.from_int(v) for v in (a, b, c))
    assert F81.add(ea, eb) == F81.add(eb, ea)
    assert F81.mul(ea, eb) == F81.mul(eb, ea)
    assert F81.mul(ea, F81.add(eb, ec)) == \
        F81.add(F81.mul(ea, eb), F81.mul(ea, ec))
    assert F81.mul(F81.mul(ea, eb), ec) == F81.mul(ea, F81.mul(eb, ec))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 80))
def test_inverse_f81(a):
    ea = F81.from_int(a)
    assert F81.mul(ea, F81.inv(ea)) == F81.one


def test_inv_of_zero_rejected():
    with pytest.raises(ZeroDivisionError):
        F8.inv(F8.zero)


def test_pow_agrees_with_repeated_mul():
    x = F8.gen()
    acc = F8.one
    for e in range(10):
        assert F8.pow(x, e) == acc
        acc = F8.mul(acc, x)


def test_frobenius_is_pth_power_and_additive():
    for v in range(81):
        a = F81.from_int(v)
        assert F81.frobenius(a, 1) == F81.pow(a, 3)
    for va in range(0, 81, 7):
        for vb in range(0, 81, 11):
            a, b = F81.from_int(va), F81.from_int(vb)
            lhs = F81.frobenius(F81.add(a, b), 1)
            rhs = F81.add(F81.frobenius(a, 1), F81.frobenius(b, 1))
            assert lhs == rhs


def test_frobenius_order_is_field_degree():
    # frob^N = identity, frob^e != identity for 0 < e < N
    for a in (F81.gen(), F81.from_int(46)):
        assert F81.frobenius(a, 4) == a
    moved = any(F81.frobenius(F81.from_int(v), 2) != F81.from_int(v)
                for v in range(81))
    assert moved


def test_multiplicative_order_divides_group_order():
    x = F8.gen()
    assert F8.pow(x, 7) == F8.one


def test_embedding_is_a_hom():
    big = make_field(3, 8)
    emb = embedding(F81, big)
    for va in range(0, 81, 5):
        for vb in range(0, 81, 13):
            a, b = F81.from_int(va), F81.from_int(vb)
            assert emb(F81.add(a, b)) == big.add(emb(a), emb(b))
            assert emb(F81.mul(a, b)) == big.mul(emb(a), emb(b))
    assert emb(F81.one) == big.one


def test_embedding_needs_divisible_degree():
    with pytest.raises(ValueError):
        embedding(F81, make_field(3, 6))
    with pytest.raises(ValueError):
        embedding(F7, F8)


def test_subfield_degree():
    big = make_field(2, 6)
    emb = embedding(F8, big)
    x = emb(F8.gen())
    assert subfield_degree(big, x) == 3
    assert subfield_degree(big, big.one) == 1


def test_fixed_field_sizes():
    big = make_field(2, 6)
    # Frobenius^2 fixes exactly F_4 inside F_64
    fixed = big.fixed_field(2)
    assert len(fixed) == 4


def test_elements_budget():
    with pytest.raises(BudgetError):
        make_field(2, 21).elements(budget=100)
