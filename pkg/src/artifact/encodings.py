"""Bijective encodings between naturals, tuples, rationals and dyadic set-reals.

Tuples use the Cantor pairing <m1, m2> = m2 + (m1 + m2)(m1 + m2 + 1)/2,
extended to n-tuples by nesting on the right: <m1, ..., mn> = <m1, <m2, ..., mn>>.
Rationals are coded by triples (s, p, d) meaning (-1)^s * p / (1 + d).
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from fractions import Fraction
from math import isqrt


def _pair2(a: int, b: int) -> int:
    s = a + b
    return b + s * (s + 1) // 2


def _unpair2(n: int) -> tuple[int, int]:
    w = (isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


def pair(t: Iterable[int]) -> int:
    """Code a nonempty tuple of naturals as one natural."""
    items = list(t)
    if not items:
        raise ValueError("cannot pair an empty tuple")
    if any(m < 0 for m in items):
        raise ValueError("tuple components must be natural numbers")
    code = items[-1]
    for m in reversed(items[:-1]):
        code = _pair2(m, code)
    return code


def unpair(n: int, arity: int) -> tuple[int, ...]:
    """Inverse of pair for a fixed arity."""
    if arity < 1:
        raise ValueError("arity must be at least 1")
    if n < 0:
        raise ValueError("code must be a natural number")
    out = []
    for _ in range(arity - 1):
        head, n = _unpair2(n)
        out.append(head)
    out.append(n)
    return tuple(out)


def rat_decode(n: int) -> Fraction:
    sign, num, den = unpair(n, 3)
    q = Fraction(num, 1 + den)
    return -q if sign % 2 else q


def rat_encode(q: Fraction | int) -> int:
    """Canonical code of a rational: sign bit, |numerator|, denominator - 1."""
    q = Fraction(q)
    sign = 1 if q < 0 else 0
    return pair((sign, abs(q.numerator), q.denominator - 1))


def dyadic_value(member: Callable[[int], bool], terms: int) -> Fraction:
    """Partial sum of x[A] = sum over j in A of 2^-(j+1), for j < terms."""
    total = 0
    for j in range(terms):
        if member(j):
            total += 1 << (terms - 1 - j)
    return Fraction(total, 1 << terms) if terms else Fraction(0)


def tail_bits(y: Fraction, count: int) -> list[int]:
    """First `count` binary digits of y in (0, 1], infinite-tail expansion.

    Digit m (1-based) is set iff the remainder strictly exceeds 2^-m, so a
    dyadic y never ends in zeros: 1/2 becomes 0.0111...
    """
    if not 0 < y <= 1:
        raise ValueError("expansion needs 0 < y <= 1")
    bits = []
    rem = Fraction(y)
    for m in range(1, count + 1):
        step = Fraction(1, 1 << m)
        if rem > step:
            bits.append(1)
            rem -= step
        else:
            bits.append(0)
    return bits


def dyadic_bits(x: Fraction | int, n: int) -> set[int]:
    """A_n[x] = {m in A[x] : m <= n + 2} where x = 4 * sum over A[x] of 2^-m."""
    x = Fraction(x)
    if not 0 < x <= 4:
        raise ValueError(f"dyadic_bits needs 0 < x <= 4, got {x}")
    if n < 0:
        raise ValueError("n must be a natural number")
    bits = tail_bits(x / 4, n + 2)
    return {m for m, b in enumerate(bits, start=1) if b}


def x_of_set(members: Iterable[int]) -> Fraction:
    """x[A] for a finite set A."""
    return sum((Fraction(1, 1 << (j + 1)) for j in set(members)), Fraction(0))
