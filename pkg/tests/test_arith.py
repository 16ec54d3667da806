from fractions import Fraction

from hypothesis import given, strategies as st

from klab.arith import first_primes, floor_sum, frac_str, orbit_phase_sum, parse_frac, van_der_corput


def test_first_primes():
    assert first_primes(6) == (2, 3, 5, 7, 11, 13)


def test_van_der_corput_prefix():
    got = [van_der_corput(n) for n in range(1, 8)]
    assert got == [Fraction(1, 2), Fraction(1, 4), Fraction(3, 4), Fraction(1, 8), Fraction(5, 8), Fraction(3, 8), Fraction(7, 8)]


@given(st.integers(1, 10**6))
def test_van_der_corput_in_unit_interval(n):
    v = van_der_corput(n)
    assert 0 < v < 1 and v.denominator & (v.denominator - 1) == 0


@given(st.integers(0, 60), st.integers(1, 40), st.integers(-100, 100), st.integers(-100, 100))
def test_floor_sum_brute_force(n, m, a, b):
    assert floor_sum(n, m, a, b) == sum((a * i + b) // m for i in range(n))


@given(st.integers(1, 200), st.data())
def test_orbit_phase_sum_brute_force(order, data):
    start = data.draw(st.integers(0, order - 1))
    stop = data.draw(st.integers(start + 1, order + 5))
    stride = data.draw(st.integers(0, order - 1))
    expect = sum(Fraction((stride * j) % order, order) for j in range(start, stop))
    assert orbit_phase_sum(order, start, stop, stride) == expect


@given(st.fractions())
def test_frac_roundtrip(x):
    assert parse_frac(frac_str(x)) == x
