"""Taylor and Weierstrass descriptions of bandlimited entire functions.

A TaylorSignal is f(z) = sum a_n z^n / n! given by a computable coefficient
sequence (a_n) and a caller-asserted type bound L with |a_n|^(1/n) <= L.
A WeierstrassSignal is a double sequence of rational polynomials p_{m1,m2}
with |f(z) - p_{m1,m2}(z)| < 2^-M on |z| <= m2 once m1 >= xi(M, m2).
"""

from __future__ import annotations

import threading
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, isqrt

import gmpy2

from .exact_real import (
    ComputableReal,
    ComputableRealSeq,
    EffectiveSequence,
    Interval,
    Modulus,
    linear_combine,
    nth_root_abs,
    pi_interval,
    seq_from_approximator,
    sin_over,
)
from .toy_machine import psi
from .zw_hierarchy import ZWDescription, fuel_estimate, infsup_to_limsup, limsup_shift_desc

# ------------------------------------------------------------ complex points


@dataclass(frozen=True)
class ComplexRational:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    def __add__(self, o: ComplexRational) -> ComplexRational:
        return ComplexRational(self.re + o.re, self.im + o.im)

    def __sub__(self, o: ComplexRational) -> ComplexRational:
        return ComplexRational(self.re - o.re, self.im - o.im)

    def __mul__(self, o: ComplexRational) -> ComplexRational:
        return ComplexRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def ceil_abs(self) -> int:
        """Smallest natural J with |z| <= J."""
        a = self.abs2()
        j = isqrt(a.numerator // a.denominator)
        while j * j < a:
            j += 1
        return j

    def __str__(self) -> str:
        return f"{self.re}+{self.im}i" if self.im >= 0 else f"{self.re}{self.im}i"


def as_complex(z) -> ComplexRational:
    if isinstance(z, ComplexRational):
        return z
    return ComplexRational(Fraction(z))


@dataclass(frozen=True)
class ComplexEnclosure:
    """The closed disk of the given radius around center."""

    center: ComplexRational
    radius: Fraction

    def contains(self, w) -> bool:
        return (as_complex(w) - self.center).abs2() <= self.radius * self.radius


# ---------------------------------------------------------------- polynomials


@dataclass(frozen=True)
class RationalPolynomial:
    """sum coefficients[n] z^n with real rational coefficients."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coefficients]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coefficients", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, n: int) -> Fraction:
        return self.coefficients[n] if n < len(self.coefficients) else Fraction(0)

    def __call__(self, z) -> ComplexRational:
        """Exact value at a Gaussian rational, by integer Horner."""
        z = as_complex(z)
        cs = self.coefficients
        if not cs:
            return ComplexRational(Fraction(0))
        q = z.re.denominator * z.im.denominator // _gcd(z.re.denominator, z.im.denominator)
        a, b = int(z.re * q), int(z.im * q)
        den = 1
        for c in cs:
            den = den * c.denominator // _gcd(den, c.denominator)
        ints = [int(c * den) for c in cs]
        k = len(ints) - 1
        re, im = ints[k], 0
        qpow = 1
        for n in range(k - 1, -1, -1):
            qpow *= q
            re, im = re * a - im * b + ints[n] * qpow, re * b + im * a
        scale = den * qpow
        return ComplexRational(Fraction(re, scale), Fraction(im, scale))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# ------------------------------------------------------------------ signals


@dataclass(frozen=True, eq=False)
class TaylorSignal:
    """Coefficients a_n of f(z) = sum a_n z^n / n! plus a type bound L.

    certificate, when present, is the exact bandwidth known from the
    construction; it is never computed from the coefficients.
    """

    coefficients: ComputableRealSeq
    L: int
    name: str = ""
    certificate: Fraction | None = None

    def __post_init__(self):
        if self.coefficients.arity != 1:
            raise ValueError("coefficient sequence must have arity 1")
        if self.L < 0:
            raise ValueError("type bound must be a natural number")

    def coefficient(self, n: int, M: int) -> Fraction:
        return self.coefficients.approx((n,), M)


def type_bound_violations(f: TaylorSignal, count: int = 16, bits: int = 8) -> list[int]:
    """Indices n <= count with |approx(a_n, bits)| > L^n + 2^-bits."""
    slack = Fraction(1, 1 << bits)
    return [n for n in range(count + 1) if abs(f.coefficient(n, bits)) > f.L**n + slack]


def _exact_seq(fn: Callable[[int], Fraction], provenance: str = "closed-form") -> ComputableRealSeq:
    return ComputableRealSeq(1, EffectiveSequence(2, lambda n, k: fn(n), provenance), Modulus(lambda n, M: 0))


def _ceil_fraction(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def exp_scaled(c) -> TaylorSignal:
    """e^{cz}: a_n = c^n exactly."""
    c = Fraction(c)
    return TaylorSignal(_exact_seq(lambda n: c**n), max(_ceil_fraction(abs(c)), 0), f"exp({c}z)", abs(c))


def exp_signal() -> TaylorSignal:
    return exp_scaled(1)


def zero_signal() -> TaylorSignal:
    return TaylorSignal(_exact_seq(lambda n: Fraction(0)), 0, "zero", Fraction(0))


def one_signal() -> TaylorSignal:
    return TaylorSignal(_exact_seq(lambda n: Fraction(1 if n == 0 else 0)), 0, "one", Fraction(0))


def polynomial_signal(power_coefficients) -> TaylorSignal:
    """f(z) = sum c_n z^n, so a_n = n! c_n."""
    cs = [Fraction(c) for c in power_coefficients]
    derivs = [factorial(n) * c for n, c in enumerate(cs)]
    L = 0
    for n, a in enumerate(derivs):
        if n and a:
            while Fraction(L) ** n < abs(a):
                L += 1
    return TaylorSignal(
        _exact_seq(lambda n: derivs[n] if n < len(derivs) else Fraction(0)), L, "polynomial", Fraction(0)
    )


@lru_cache(maxsize=4096)
def _sinc_coefficient(n: int, M: int) -> Fraction:
    """Within 2^-M of the n-th derivative at 0 of sin(pi z)/(pi z)."""
    if n % 2:
        return Fraction(0)
    # pi^n moves by at most n 4^(n-1) per unit of pi, so 2n + M + 8 bits of pi suffice
    enc = pi_interval(M + 2 * n + 8)
    shift = M + 4
    lo_num, lo_den = gmpy2.mpz(enc.lo.numerator) ** n << shift, gmpy2.mpz(enc.lo.denominator) ** n * (n + 1)
    hi_num, hi_den = gmpy2.mpz(enc.hi.numerator) ** n << shift, gmpy2.mpz(enc.hi.denominator) ** n * (n + 1)
    lo = int(lo_num // lo_den)
    hi = int(-((-hi_num) // hi_den))
    mid = Fraction(lo + hi, 1 << (shift + 1))
    return mid if (n // 2) % 2 == 0 else -mid


def sinc_signal() -> TaylorSignal:
    """sin(pi z)/(pi z): a_{2k} = (-1)^k pi^{2k}/(2k+1), odd terms vanish."""
    seq = ComputableRealSeq(
        1, EffectiveSequence(2, _sinc_coefficient, "named builtin"), Modulus(lambda n, M: M)
    )
    return TaylorSignal(seq, 4, "sinc")


def builtin_signal(name: str) -> TaylorSignal:
    """exp, sinc, zero, one, or exp:c for e^{cz}."""
    if name.startswith("exp:"):
        return exp_scaled(Fraction(name[4:]))
    table = {"exp": exp_signal, "sinc": sinc_signal, "zero": zero_signal, "one": one_signal}
    try:
        return table[name]()
    except KeyError:
        raise KeyError(f"unknown signal {name!r}; known: {sorted(table)} or exp:c") from None


# ------------------------------------------------------- forward conversion


def conversion_parameters(L: int, M: int, J: int) -> tuple[int, int]:
    """(K, N): polynomial degree and coefficient precision."""
    return max(8 * L * J, M + 2), 2 * J + M + 2


@dataclass(frozen=True, eq=False)
class WeierstrassSignal:
    polys: Callable[[int, int], RationalPolynomial]
    modulus: Callable[[int, int], int]  # (M, m2) -> m1
    name: str = ""

    def polynomial(self, M: int, J: int) -> RationalPolynomial:
        """A polynomial within 2^-M of f on |z| <= J."""
        return self.polys(self.modulus(M, J), J)

    def evaluate(self, z, M: int) -> ComplexEnclosure:
        z = as_complex(z)
        return ComplexEnclosure(self.polynomial(M, z.ceil_abs())(z), Fraction(1, 1 << M))


def _taylor_polynomial(f: TaylorSignal, M: int, J: int) -> RationalPolynomial:
    K, N = conversion_parameters(f.L, M, J)
    return RationalPolynomial(tuple(f.coefficient(n, N) / factorial(n) for n in range(K + 1)))


def taylor_to_weierstrass(f: TaylorSignal) -> WeierstrassSignal:
    """p_{M,J}(z) = sum_{n <= K} r_{n,N} z^n / n!; error below 2^-(M+1) on |z| <= J."""
    cache: dict[tuple[int, int], RationalPolynomial] = {}
    lock = threading.Lock()

    def polys(M: int, J: int) -> RationalPolynomial:
        with lock:
            if (M, J) in cache:
                return cache[(M, J)]
        p = _taylor_polynomial(f, M, J)
        with lock:
            cache[(M, J)] = p
        return p

    return WeierstrassSignal(polys, lambda M, J: M, f.name)


def eval_taylor(f: TaylorSignal, z, M: int) -> ComplexEnclosure:
    """Enclosure of f(z) of radius 2^-(M+2), using J = ceil(|z|)."""
    z = as_complex(z)
    p = _taylor_polynomial(f, M + 1, z.ceil_abs())
    return ComplexEnclosure(p(z), Fraction(1, 1 << (M + 2)))


# ------------------------------------------------------ backward conversion


def log2_factorial_ceil(n: int) -> int:
    return (factorial(n) - 1).bit_length()


def weierstrass_to_taylor(w: WeierstrassSignal, L: int) -> TaylorSignal:
    """a_n ~ n! times the degree-n coefficient of a polynomial good on |z| <= 1.

    By Cauchy's estimate on the unit circle, the degree-n coefficient of a
    polynomial within 2^-m of f there is within 2^-m of a_n / n!.
    """

    def query(n: int, m: int) -> Fraction:
        return factorial(n) * w.polys(w.modulus(m, 1), 1).coefficient(n)

    seq = ComputableRealSeq(
        1,
        EffectiveSequence(2, query, "composite").memoized(),
        Modulus(lambda n, M: M + log2_factorial_ceil(n)),
    )
    return TaylorSignal(seq, L, w.name)


# ------------------------------------------------------------- bandwidth


def bandwidth_upper_desc(f: TaylorSignal) -> ZWDescription:
    """inf-sup description of limsup |a_m|^(1/m).

    The shifted sequence b'_m = |a_{m+1}|^(1/(m+1)) skips m = 0, where the
    root is undefined; dropping one term leaves the limsup unchanged.
    """
    roots: dict[int, ComputableReal] = {}
    lock = threading.Lock()

    def root(m: int) -> ComputableReal:
        with lock:
            if m not in roots:
                roots[m] = nth_root_abs(f.coefficients.at(m + 1), m + 1)
            return roots[m]

    b = seq_from_approximator(1, lambda m, M: root(m).approx(M))
    return limsup_shift_desc(b)


def bandwidth_estimate(f: TaylorSignal, T: int, M: int) -> Fraction:
    """min_{m1 <= T} max_{m2 <= T} of M-bit approximants of the description."""
    return fuel_estimate(bandwidth_upper_desc(f), T, M)


# ------------------------------------------------------- elementary signals


@dataclass(frozen=True)
class ElementarySignal:
    """sum over k in -L..L of c_k sinc(t - k)."""

    coefficients: dict[int, ComputableReal] = field(default_factory=dict)


def eval_elementary(f: ElementarySignal, t, M: int) -> Interval:
    t = Fraction(t)
    if t.denominator == 1:
        c = f.coefficients.get(int(t))
        return c.enclosure(M + 1) if c is not None else Interval.point(0)
    terms = max(len(f.coefficients), 1)
    guard = M + terms.bit_length() + 4
    total = Interval.point(0)
    for k, c in sorted(f.coefficients.items()):
        x = pi_interval(guard + 8) * (t - k)
        s = sin_over(x, guard + 4)
        total = total + c.enclosure(guard + 2) * s
    return total


# ---------------------------------------------------------- gadget families


def mix_with_sinc(f: TaylorSignal, lam) -> TaylorSignal:
    """(1 - lam) f + lam sinc, coefficientwise."""
    lam = Fraction(lam)
    if not 0 <= lam <= 1:
        raise ValueError("mixing weight must lie in [0, 1]")
    s = sinc_signal()

    @lru_cache(maxsize=None)
    def combined(n: int) -> ComputableReal:
        return linear_combine(1 - lam, f.coefficients.at(n), lam, s.coefficients.at(n))

    seq = ComputableRealSeq(
        1,
        EffectiveSequence(2, lambda n, k: combined(n).approximations(k), "composite"),
        Modulus(lambda n, M: combined(n).modulus(M)),
    )
    return TaylorSignal(seq, max(f.L, 4), f"mix({f.name},{lam})")


def taylor_from_pi2(r, bound) -> TaylorSignal:
    """Signal with bw = inf_{m1} sup_{m2} r for r with entries in [0, bound].

    a_m = (r'_m)^m with r' the limsup conversion of r, clamped to [0, bound];
    the clamp is monotone and continuous so it keeps the limsup in range.
    """
    bound = Fraction(bound)
    rp = infsup_to_limsup(r)

    def coefficient(m: int) -> Fraction:
        v = min(max(rp(m), Fraction(0)), bound)
        return v**m

    return TaylorSignal(_exact_seq(coefficient, "composite"), _ceil_fraction(bound), "pi2")


@dataclass(frozen=True, eq=False)
class TruncationFamily:
    """g_m = degree-k truncation of f when m = enum(k), else f.

    The double sequence is r(n, m, k) = approximant of a_n at precision k,
    replaced by 0 when n exceeds the truncation degree visible at stage k:
    kh if m = enum(kh) for some kh <= k, else k.
    """

    f: TaylorSignal
    enum: Callable[[int], int]

    def visible_degree(self, m: int, k: int) -> int:
        for kh in range(k + 1):
            if self.enum(kh) == m:
                return kh
        return k

    def approximant(self, n: int, m: int, k: int) -> Fraction:
        if n > self.visible_degree(m, k):
            return Fraction(0)
        return self.f.coefficient(n, k)

    @staticmethod
    def decision_stage(M: int, n: int, m: int) -> int:
        """Stage after which the truncation decision for a_n is final."""
        return n

    def double_sequence(self) -> ComputableRealSeq:
        return ComputableRealSeq(
            2,
            EffectiveSequence(3, self.approximant, "composite").memoized(),
            Modulus(lambda n, m, M: max(n, M)),
        )

    def signal(self, m: int) -> TaylorSignal:
        seq = ComputableRealSeq(
            1,
            EffectiveSequence(2, lambda n, k: self.approximant(n, m, k), "composite").memoized(),
            Modulus(lambda n, M: max(n, M)),
        )
        return TaylorSignal(seq, self.f.L, f"{self.f.name}|trunc@{m}")

    def truncation_degree(self, m: int, search: int) -> int | None:
        """kh with enum(kh) = m among kh <= search, else None."""
        for kh in range(search + 1):
            if self.enum(kh) == m:
                return kh
        return None


def adversarial_truncation_family(f: TaylorSignal, enum: Callable[[int], int]) -> TruncationFamily:
    return TruncationFamily(f, enum)


@dataclass(frozen=True, eq=False)
class AnToPmFamily:
    """f_m = sum_{n < 2^h} 2^-h z^n when program n halts on m after h steps, else 0."""

    program: int

    def h(self, m: int, k: int) -> int:
        if psi(self.program, m, k):
            lo, hi = 0, k
            while lo < hi:  # least l with psi = 1, psi being monotone in l
                mid = (lo + hi) // 2
                if psi(self.program, m, mid):
                    hi = mid
                else:
                    lo = mid + 1
            return lo
        return k

    def r(self, m1: int, m2: int, m3: int) -> Fraction:
        h = self.h(m2, m3)
        return Fraction(1, 1 << h) if m1 <= (1 << h) - 1 else Fraction(0)

    def a(self) -> ComputableRealSeq:
        """a_{m1,m2} as the effective limit of r in m3 with modulus M + 1."""
        return ComputableRealSeq(2, EffectiveSequence(3, self.r, "program-backed"), Modulus(lambda m1, m2, M: M + 1))

    def signal(self, m: int, L: int) -> TaylorSignal:
        """f_m with coefficients a'_n = n! a_{n,m}; L must bound (n!)^(1/n) on the support."""

        def query(n: int, k: int) -> Fraction:
            return factorial(n) * self.r(n, m, k)

        seq = ComputableRealSeq(
            1,
            EffectiveSequence(2, query, "program-backed"),
            Modulus(lambda n, M: M + 1 + log2_factorial_ceil(n)),
        )
        return TaylorSignal(seq, L, f"an_to_pm({self.program})@{m}", Fraction(0))

    def certified_signal(self, m: int, halting_time: int | None) -> TaylorSignal:
        """f_m with the type bound 2^h taken from a known halting time."""
        L = 0 if halting_time is None else 1 << halting_time
        return self.signal(m, L)


def an_to_pm_family(n: int) -> AnToPmFamily:
    return AnToPmFamily(n)
