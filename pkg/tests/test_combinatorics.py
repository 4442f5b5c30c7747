from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlpoisson import OutOfRange, StirlingTable, bell_coefficients, bell_polynomial, stirling2

BELL_NUMBERS = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975]


def test_stirling_examples():
    assert stirling2(3, 2) == 3
    assert stirling2(4, 2) == 7
    assert stirling2(0, 0) == 1
    for n in (1, 5, 17, 64):
        assert stirling2(n, n) == 1
        assert stirling2(n, 0) == 0


def test_stirling_recurrence_spot():
    assert stirling2(4, 2) == 2 * stirling2(3, 2) + stirling2(3, 1)
    assert stirling2(64, 32) == 32 * stirling2(63, 32) + stirling2(63, 31)


@settings(deadline=None, max_examples=100)
@given(st.integers(min_value=2, max_value=64), st.data())
def test_stirling_recurrence_property(n, data):
    k = data.draw(st.integers(min_value=1, max_value=n - 1))
    assert stirling2(n, k) == k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def test_stirling_exact_beyond_machine_ints():
    # entries outgrow 64-bit integers near n = 26; exactness must survive that
    v = stirling2(40, 20)
    assert isinstance(v, int)
    assert v > 2**64
    assert v == 20 * stirling2(39, 20) + stirling2(39, 19)


def test_stirling_range_errors():
    with pytest.raises(OutOfRange):
        stirling2(65, 1)
    with pytest.raises(OutOfRange):
        stirling2(3, 4)
    with pytest.raises(OutOfRange):
        stirling2(-1, 0)
    with pytest.raises(OutOfRange):
        stirling2(2.0, 1)


def test_table_invariants():
    table = StirlingTable.build(12)
    assert table.value(0, 0) == 1
    for n in range(1, 13):
        assert table.value(n, 0) == 0
        assert table.value(n, n) == 1
        for k in range(1, n):
            assert table.value(n, k) == k * table.value(n - 1, k) + table.value(n - 1, k - 1)


def test_bell_polynomial_examples():
    assert bell_polynomial(1, 3.7) == pytest.approx(3.7)
    assert bell_polynomial(2, 3) == 12       # x^2 + x at 3
    assert bell_polynomial(3, 1) == 5
    assert bell_polynomial(0, 123.0) == 1


def test_bell_numbers():
    for n, b in enumerate(BELL_NUMBERS):
        assert bell_polynomial(n, 1) == b


def test_bell_fourth_coefficients():
    # B_4(x) = x + 7x^2 + 6x^3 + x^4
    assert bell_coefficients(4) == (0, 1, 7, 6, 1)
    assert bell_polynomial(4, 2) == 94


@pytest.mark.parametrize("x", [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(5)])
def test_bell_recursion_exact(x):
    # B_{n+1}(x) = x (B_n'(x) + B_n(x)), checked with zero tolerance in
    # rational arithmetic; B_n' comes from the exact coefficient polynomial
    for n in range(13):
        coeffs = bell_coefficients(n)
        deriv = sum(k * coeffs[k] * x ** (k - 1) for k in range(1, n + 1))
        assert bell_polynomial(n + 1, x) == x * (deriv + bell_polynomial(n, x))


def test_bell_range_errors():
    with pytest.raises(OutOfRange):
        bell_polynomial(65, 1.0)
    with pytest.raises(OutOfRange):
        bell_coefficients(-1)
