"""Gaussian rational arithmetic stays exact under all operations."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from frobtwist.gaussian import GaussianRational, ONE, ZERO


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=9)
gaussians = st.builds(GaussianRational, rationals, rationals)


def test_construction_coerces():
    g = GaussianRational("2/3", 1)
    assert g.re == Fraction(2, 3) and g.im == 1
    assert GaussianRational(5) == GaussianRational(Fraction(5), Fraction(0))


def test_immutable():
    g = GaussianRational(1, 2)
    with pytest.raises(AttributeError):
        g.re = Fraction(9)


def test_i_squared_is_minus_one():
    i = GaussianRational(0, 1)
    assert i * i == GaussianRational(-1)


@settings(max_examples=60, deadline=None)
@given(gaussians, gaussians)
def test_commutativity(a, b):
    assert a + b == b + a
    assert a * b == b * a


@settings(max_examples=60, deadline=None)
@given(gaussians, gaussians, gaussians)
def test_distributivity(a, b, c):
    assert a * (b + c) == a * b + a * c


@settings(max_examples=40, deadline=None)
@given(gaussians)
def test_conjugate_norm(a):
    assert a * a.conjugate() == GaussianRational(a.norm())
    assert a.conjugate().conjugate() == a


@settings(max_examples=40, deadline=None)
@given(gaussians)
def test_division_inverts(a):
    if a == ZERO:
        return
    assert a / a == ONE
    assert (ONE / a) * a == ONE


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        GaussianRational(1) / ZERO


def test_quad_serialization_roundtrip():
    g = GaussianRational(Fraction(-3, 7), Fraction(11, 2))
    assert GaussianRational.from_quad(g.to_quad()) == g
