from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpmemory.series import TruncatedSeries

fractions = st.fractions(min_value=-10, max_value=10, max_denominator=50)


@settings(max_examples=60, deadline=None)
@given(tail=st.lists(fractions, min_size=1, max_size=5))
def test_reciprocal_exact(tail):
    s = TruncatedSeries([Fraction(1)] + tail)
    prod = s * s.reciprocal()
    assert list(prod.coeffs) == [1] + [0] * len(tail)


@settings(max_examples=60, deadline=None)
@given(tail=st.lists(fractions, min_size=1, max_size=5))
def test_sqrt_squares_back(tail):
    s = TruncatedSeries([Fraction(1)] + tail)
    r = s.sqrt()
    assert r * r == s


def test_sqrt_known_expansion():
    # sqrt(1 + w) = 1 + w/2 - w^2/8 + w^3/16
    r = TruncatedSeries([Fraction(1), Fraction(1), 0, 0]).sqrt()
    assert list(r.coeffs) == [1, Fraction(1, 2), Fraction(-1, 8), Fraction(1, 16)]


def test_float_path():
    s = TruncatedSeries([1.0, 0.3, -0.2])
    r = s.sqrt()
    back = r * r
    assert [float(c) for c in back.coeffs] == pytest.approx([1.0, 0.3, -0.2], abs=1e-15)


def test_arithmetic():
    a = TruncatedSeries([1, 2, 3])
    b = TruncatedSeries([0, 1, 1])
    assert (a + b).coeffs == (a - (-b)).coeffs
    assert list((a * b).coeffs) == [0, 1, 3]
