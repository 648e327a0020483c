import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from octorail.exact import ExactCoeff, ExactMatrix, ONE, ZERO, solve_exact

SQRT2 = math.sqrt(2)

small_fractions = st.builds(Fraction, st.integers(-50, 50),
                            st.integers(1, 10))
coeffs = st.builds(ExactCoeff, small_fractions, small_fractions)


def test_basic_arithmetic():
    a = ExactCoeff(1, Fraction(1, 2))  # 1 + sqrt2/2
    b = ExactCoeff(0, 1)               # sqrt2
    assert float(a) == pytest.approx(1 + SQRT2 / 2)
    assert a * b == ExactCoeff(1, 1)   # sqrt2 + 1
    assert (a + a) - a == a
    assert a != b


def test_division_and_inverse():
    a = ExactCoeff(3, -2)
    inv = ONE / a
    assert a * inv == ONE
    with pytest.raises(ZeroDivisionError):
        _ = ONE / ZERO


def test_is_rational():
    assert ExactCoeff(5).is_rational()
    assert not ExactCoeff(0, 1).is_rational()


@given(coeffs, coeffs)
def test_float_homomorphism(a, b):
    assert float(a + b) == pytest.approx(float(a) + float(b), abs=1e-9)
    assert float(a * b) == pytest.approx(float(a) * float(b), abs=1e-9)


@given(coeffs)
def test_additive_inverse(a):
    assert a - a == ZERO
    assert a + (-a) == ZERO


@given(coeffs)
def test_multiplicative_inverse(a):
    if a != ZERO:
        assert a * (ONE / a) == ONE


def test_half_power_roundtrip():
    e = ExactCoeff.from_half_power(-1, 3)  # -1/(2*sqrt2)
    assert float(e) == pytest.approx(-1 / (2 * SQRT2))
    assert e.as_half_power() == (-1, 3)


def test_matrix_identity_and_product():
    i3 = ExactMatrix.identity(3)
    assert i3 @ i3 == i3
    m = ExactMatrix([[ONE, ExactCoeff(0, 1)], [ZERO, ONE]])
    assert (m @ m).rows[0][1] == ExactCoeff(0, 2)


def test_solve_exact_roundtrip():
    m = ExactMatrix([[ExactCoeff(1, 1), ONE],
                     [ExactCoeff(0, 1), ExactCoeff(2)]])
    rhs = ExactMatrix([[ONE], [ExactCoeff(0, 3)]])
    x = solve_exact(m, rhs)
    assert m @ x == rhs
