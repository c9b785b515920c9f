"""Computable reals as (approximation sequence, modulus) pairs.

A ComputableReal x is a rational sequence r together with a modulus xi such
that |x - r_m| < 2^-M for every m >= xi(M).  Everything here is exact
rational arithmetic; the only "real numbers" are certified enclosures.
"""

from __future__ import annotations

import threading
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import floor

import gmpy2

# ---------------------------------------------------------------- intervals


def _floor_dyadic(q: Fraction, bits: int) -> Fraction:
    return Fraction(floor(q * (1 << bits)), 1 << bits)


def _ceil_dyadic(q: Fraction, bits: int) -> Fraction:
    return Fraction(-floor(-q * (1 << bits)), 1 << bits)


@dataclass(frozen=True)
class Interval:
    """Closed rational interval [lo, hi] used for certified enclosures."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, q) -> Interval:
        q = Fraction(q)
        return cls(q, q)

    @classmethod
    def around(cls, center, radius) -> Interval:
        center, radius = Fraction(center), Fraction(radius)
        return cls(center - radius, center + radius)

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def rad(self) -> Fraction:
        return (self.hi - self.lo) / 2

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, q) -> bool:
        return self.lo <= q <= self.hi

    def magnitude(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def rounded(self, bits: int) -> Interval:
        """Outward rounding to dyadic endpoints with `bits` fractional bits."""
        return Interval(_floor_dyadic(self.lo, bits), _ceil_dyadic(self.hi, bits))

    def _coerce(self, other) -> Interval:
        return other if isinstance(other, Interval) else Interval.point(other)

    def __add__(self, other) -> Interval:
        o = self._coerce(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> Interval:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Interval:
        return self._coerce(other) - self

    def __mul__(self, other) -> Interval:
        o = self._coerce(other)
        cands = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(cands), max(cands))

    __rmul__ = __mul__

    def __truediv__(self, other) -> Interval:
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return self * Interval(1 / o.hi, 1 / o.lo)

    def __pow__(self, k: int) -> Interval:
        if k == 0:
            return Interval.point(1)
        if k % 2 == 1 or self.lo >= 0:
            return Interval(*sorted((self.lo**k, self.hi**k)))
        if self.hi <= 0:
            return Interval(self.hi**k, self.lo**k)
        return Interval(Fraction(0), max(self.lo**k, self.hi**k))


# ---------------------------------------------------------------- constants


def _arctan_inv_fixed(x: int, scale: int) -> tuple[int, int]:
    """floor-ish arctan(1/x) * 2^scale and a bound on the error in units."""
    x2 = x * x
    power = (1 << scale) // x
    total = power
    k = 1
    terms = 1
    while power:
        power //= x2
        term = power // (2 * k + 1)
        total += -term if k % 2 else term
        k += 1
        terms += 1
    return total, 3 * terms + 2


@lru_cache(maxsize=64)
def pi_interval(bits: int) -> Interval:
    """Machin enclosure of pi with width at most 2^-bits."""
    scale = bits + 24 + 2 * max(bits, 1).bit_length()
    while True:
        a5, e5 = _arctan_inv_fixed(5, scale)
        a239, e239 = _arctan_inv_fixed(239, scale)
        v = 16 * a5 - 4 * a239
        err = 16 * e5 + 4 * e239
        if 2 * err <= 1 << (scale - bits):
            return Interval(Fraction(v - err, 1 << scale), Fraction(v + err, 1 << scale))
        scale += 8


def pi_approx(M: int) -> Fraction:
    return pi_interval(M + 1).mid


def e_approx(M: int) -> Fraction:
    # tail after 1/K! is below 2/(K+1)!
    limit = 1 << (M + 1)
    k, fact = 0, 1
    while fact * (k + 1) <= limit:
        k += 1
        fact *= k
    total = Fraction(0)
    term = Fraction(1)
    for j in range(k + 1):
        if j:
            term /= j
        total += term
    return total


# ------------------------------------------------------- certified sin, cos


def _taylor_sin_cos(c: Fraction, bits: int) -> tuple[Interval, Interval]:
    """sin and cos of a rational with |c| <= 4 by Taylor series."""
    eps = Fraction(1, 1 << (bits + 2))
    s = Fraction(0)
    co = Fraction(0)
    term = Fraction(1)  # c^n / n!
    n = 0
    while True:
        if n % 4 == 0:
            co += term
        elif n % 4 == 1:
            s += term
        elif n % 4 == 2:
            co -= term
        else:
            s -= term
        n += 1
        term = term * c / n
        if abs(term) < eps and n > 2:
            break
    # remaining terms alternate in each series with decreasing size once n > |c|
    rem = abs(term)
    return Interval.around(s, rem), Interval.around(co, rem)


def sin_cos(x, bits: int) -> tuple[Interval, Interval]:
    """Enclosures of sin(x) and cos(x) of width about 2^-bits.

    x may be a rational or an Interval; interval inputs widen the result by
    their radius (both functions are 1-Lipschitz).
    """
    if isinstance(x, Interval):
        center, spread = x.mid, x.rad
    else:
        center, spread = Fraction(x), Fraction(0)
    k = 0
    if abs(center) > 3:
        k = round(center / (2 * pi_approx(8)))
    work = bits + 8
    shift = Fraction(0)
    if k:
        tau = 2 * pi_interval(work + abs(k).bit_length() + 2)
        reduced = center - k * tau
        c = _floor_dyadic(reduced.mid, work + 4)
        shift = abs(reduced.mid - c) + reduced.rad
    else:
        c = _floor_dyadic(center, work + 4)
        shift = abs(center - c)
    s, co = _taylor_sin_cos(c, work)
    extra = shift + spread
    s = Interval(max(s.lo - extra, Fraction(-1)), min(s.hi + extra, Fraction(1)))
    co = Interval(max(co.lo - extra, Fraction(-1)), min(co.hi + extra, Fraction(1)))
    return s.rounded(work), co.rounded(work)


def sin_over(x, bits: int) -> Interval:
    """Enclosure of sin(x)/x, continuous at 0, for rational or interval x."""
    if isinstance(x, Interval):
        center, spread = x.mid, x.rad
    else:
        center, spread = Fraction(x), Fraction(0)
    if abs(center) + spread <= 1:
        # series sum (-1)^j x^(2j)/(2j+1)!; derivative of sin(x)/x is bounded by 1/2
        eps = Fraction(1, 1 << (bits + 2))
        total = Fraction(0)
        term = Fraction(1)
        j = 0
        while abs(term) >= eps:
            total += term
            j += 1
            term = -term * center * center / ((2 * j) * (2 * j + 1))
        return Interval.around(total, abs(term) + spread / 2).rounded(bits + 4)
    s, _ = sin_cos(x, bits + 4)
    if isinstance(x, Interval):
        return (s / x).rounded(bits + 4)
    return (s / Interval.point(center)).rounded(bits + 4)


# ------------------------------------------------------------ descriptions


def _as_fraction(v) -> Fraction:
    # Fraction(Fraction) pays for abc instance checks; skip it on hot paths
    return v if type(v) is Fraction else Fraction(v)


@dataclass(frozen=True, eq=False)
class EffectiveSequence:
    """A pure total map from N^arity to exact rationals."""

    arity: int
    query: Callable[..., Fraction]
    provenance: str = "composite"
    _cache: dict | None = field(default=None, repr=False)

    def __call__(self, *index: int) -> Fraction:
        if len(index) != self.arity:
            raise ValueError(f"expected {self.arity} indices, got {len(index)}")
        cache = self._cache
        if cache is None:
            return _as_fraction(self.query(*index))
        # single dict operations are atomic; a race only recomputes a pure value
        value = cache.get(index)
        if value is None:
            value = cache[index] = _as_fraction(self.query(*index))
        return value

    def memoized(self) -> EffectiveSequence:
        return EffectiveSequence(self.arity, self.query, self.provenance, {})


@dataclass(frozen=True)
class Modulus:
    query: Callable[..., int]

    def __call__(self, *args: int) -> int:
        return int(self.query(*args))


IDENTITY = Modulus(lambda M: M)


@dataclass(frozen=True)
class ComputableReal:
    approximations: EffectiveSequence
    modulus: Modulus = IDENTITY
    name: str = ""

    def approx(self, M: int) -> Fraction:
        return self.approximations(self.modulus(M))

    def enclosure(self, M: int) -> Interval:
        return Interval.around(self.approx(M), Fraction(1, 1 << M))


@dataclass(frozen=True)
class ComputableRealSeq:
    """An arity-k family of computable reals sharing one description."""

    arity: int
    approximations: EffectiveSequence  # arity k + 1
    modulus: Modulus  # (index..., M) -> approximation index

    def approx(self, index: tuple[int, ...], M: int) -> Fraction:
        return self.approximations(*index, self.modulus(*index, M))

    def at(self, *index: int) -> ComputableReal:
        return ComputableReal(
            EffectiveSequence(1, lambda j: self.approximations(*index, j), "composite"),
            Modulus(lambda M: self.modulus(*index, M)),
        )


def approx(x: ComputableReal, M: int) -> Fraction:
    return x.approx(M)


def from_approximator(fn: Callable[[int], Fraction], name: str = "", provenance: str = "composite") -> ComputableReal:
    """Wrap fn with |x - fn(M)| < 2^-M under the identity modulus."""
    return ComputableReal(EffectiveSequence(1, fn, provenance).memoized(), IDENTITY, name)


def constant(q) -> ComputableReal:
    q = Fraction(q)
    return ComputableReal(EffectiveSequence(1, lambda m: q, "closed-form"), IDENTITY, str(q))


def seq_from_approximator(arity: int, fn: Callable[..., Fraction], provenance: str = "composite") -> ComputableRealSeq:
    """fn(index..., M) is within 2^-M of the index-th real."""
    return ComputableRealSeq(
        arity,
        EffectiveSequence(arity + 1, fn, provenance).memoized(),
        Modulus(lambda *args: args[-1]),
    )


BUILTINS: dict[str, ComputableReal] = {
    "pi": from_approximator(pi_approx, "pi", "named builtin"),
    "e": from_approximator(e_approx, "e", "named builtin"),
    "zero": ComputableReal(EffectiveSequence(1, lambda m: Fraction(0), "named builtin"), IDENTITY, "zero"),
    "one": ComputableReal(EffectiveSequence(1, lambda m: Fraction(1), "named builtin"), IDENTITY, "one"),
}


def builtin(name: str) -> ComputableReal:
    try:
        return BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin constant {name!r}; known: {sorted(BUILTINS)}") from None


# ------------------------------------------------------------- operations


def linear_combine(alpha, x: ComputableReal, beta, y: ComputableReal) -> ComputableReal:
    """alpha*x + beta*y with the modulus shifted by the size of the weights."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    weight = abs(alpha) + abs(beta)
    shift = (-((-weight.numerator) // weight.denominator)).bit_length() if weight else 0

    def query(k: int) -> Fraction:
        return alpha * x.approximations(k) + beta * y.approximations(k)

    def modulus(M: int) -> int:
        return max(x.modulus(M + shift), y.modulus(M + shift))

    return ComputableReal(EffectiveSequence(1, query, "composite"), Modulus(modulus))


def _root_floor(v: Fraction, n: int, bits: int) -> Fraction:
    scaled = (v.numerator << (n * bits)) // v.denominator
    r, _ = gmpy2.iroot(gmpy2.mpz(scaled), n)
    return Fraction(int(r), 1 << bits)


def _root_ceil(v: Fraction, n: int, bits: int) -> Fraction:
    lo = _root_floor(v, n, bits)
    if lo**n == v:
        return lo
    return lo + Fraction(1, 1 << bits)


def exact_root(v: Fraction, n: int) -> Fraction | None:
    """v^(1/n) when it is rational, else None (v >= 0)."""
    rn, okn = gmpy2.iroot(gmpy2.mpz(v.numerator), n)
    rd, okd = gmpy2.iroot(gmpy2.mpz(v.denominator), n)
    if okn and okd:
        return Fraction(int(rn), int(rd))
    return None


def nth_root_abs(x: ComputableReal, n: int) -> ComputableReal:
    """|x|^(1/n) with outward-rounded root extraction."""
    if n < 1:
        raise ValueError("root order must be positive")
    if n == 1:
        return from_approximator(lambda M: abs(x.approx(M)))

    def query(M: int) -> Fraction:
        bits = M + 3
        cap = n * (M + 3) + 2
        p = M + 4
        while True:
            q = abs(x.approx(p))
            e = Fraction(1, 1 << p)
            lo = _root_floor(max(Fraction(0), q - e), n, bits)
            hi = _root_ceil(q + e, n, bits)
            if hi - lo <= Fraction(1, 1 << (M + 1)) or p >= cap:
                break
            p = min(2 * p, cap)
        exact = exact_root(q, n)
        return exact if exact is not None else _root_floor(q, n, bits)

    return from_approximator(query)


class _RunningExtreme:
    """Prefix max (or min) of term(m), memoized so queries stay linear."""

    def __init__(self, term: Callable[[int], Fraction], pick: Callable):
        self.term = term
        self.pick = pick
        self.values: list[Fraction] = []
        self.lock = threading.Lock()

    def __call__(self, n: int) -> Fraction:
        with self.lock:
            while len(self.values) <= n:
                m = len(self.values)
                t = self.term(m)
                self.values.append(t if m == 0 else self.pick(self.values[-1], t))
            return self.values[n]


def monotone_envelopes(x: ComputableReal, upper_target: ComputableReal) -> tuple[EffectiveSequence, EffectiveSequence]:
    """(lower, upper) envelopes.

    lower_n = max{r(m) - 2^-m : m <= n} increases to x, and some lower_n > 0
    iff x > 0.  upper_n = min{r(m) + 2^-m : m <= n} - s_n, where s_n is the
    running lower bound of the target, decreases to x - target, and some
    upper_n < 0 iff x < target.
    """
    lower = _RunningExtreme(lambda m: x.approx(m) - Fraction(1, 1 << m), max)
    upper_x = _RunningExtreme(lambda m: x.approx(m) + Fraction(1, 1 << m), min)
    target_lower = _RunningExtreme(lambda m: upper_target.approx(m) - Fraction(1, 1 << m), max)
    return (
        EffectiveSequence(1, lower, "composite"),
        EffectiveSequence(1, lambda n: upper_x(n) - target_lower(n), "composite"),
    )


@dataclass(frozen=True)
class Halted:
    step: int
    witness: Fraction


@dataclass(frozen=True)
class Exhausted:
    fuel: int


def semidecide_positive(x: ComputableReal, fuel: int) -> Halted | Exhausted:
    """Search n < fuel with lower envelope > 0; a hit certifies x > 0."""
    best = None
    for n in range(fuel):
        cand = x.approx(n) - Fraction(1, 1 << n)
        best = cand if best is None else max(best, cand)
        if best > 0:
            return Halted(n, best)
    return Exhausted(fuel)


def consistency_violations(x: ComputableReal, bound: int) -> list[tuple[int, int]]:
    """Pairs (M, M') <= bound breaking |r(xi(M)) - r(xi(M'))| < 2^-M + 2^-M'."""
    vals = [x.approx(M) for M in range(bound + 1)]
    bad = []
    for M in range(bound + 1):
        for N in range(M + 1, bound + 1):
            if abs(vals[M] - vals[N]) >= Fraction(1, 1 << M) + Fraction(1, 1 << N):
                bad.append((M, N))
    return bad
