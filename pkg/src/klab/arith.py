"""Exact integer and rational helpers."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=None)
def first_primes(count: int) -> tuple[int, ...]:
    """The first ``count`` primes."""
    out: list[int] = []
    cand = 2
    while len(out) < count:
        if all(cand % p for p in out if p * p <= cand):
            out.append(cand)
        cand += 1
    return tuple(out)


def van_der_corput(n: int, base: int = 2) -> Fraction:
    """The n-th van der Corput point in ``base`` as an exact fraction (n >= 0)."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    num, den = 0, 1
    while n:
        n, digit = divmod(n, base)
        num = num * base + digit
        den *= base
    return Fraction(num, den)


def floor_sum(n: int, m: int, a: int, b: int) -> int:
    """Sum of ``floor((a*i + b)/m)`` for ``0 <= i < n`` (m > 0), in O(log) steps."""
    if n <= 0:
        return 0
    total = 0
    while True:
        if a >= m or a < 0:
            q, a = divmod(a, m)
            total += q * n * (n - 1) // 2
        if b >= m or b < 0:
            q, b = divmod(b, m)
            total += q * n
        y_max = a * n + b
        if y_max < m:
            return total
        n, b = divmod(y_max, m)
        m, a = a, m


def orbit_phase_sum(order: int, start: int, stop: int, stride: int) -> Fraction:
    """Exact sum of ``(stride*j mod order)/order`` over ``start <= j < stop``."""
    count = stop - start
    if count <= 0:
        return Fraction(0)
    s = stride % order
    sum_j = (start + stop - 1) * count // 2
    floors = floor_sum(count, order, s, s * start)
    return Fraction(s * sum_j - order * floors, order)


def frac_str(x: Fraction | int) -> str:
    """Serialize a rational as ``"num/den"``."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(text: str) -> Fraction:
    return Fraction(text)
