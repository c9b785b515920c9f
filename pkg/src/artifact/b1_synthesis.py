"""B^1 signals with exact triangular spectra and prescribed bandwidth.

For a nondecreasing positive generator r, the k-truncation is
    f_k(t) = sum over m = 1..k with r_m < r_{m+1} of m^-2 phi_m(t),
    phi_m(t) = e^{i c_m t} (w_m / 2) u(w_m t / 2),
with w_m = r_{m+1} - r_m, c_m = (r_m + r_{m+1}) / 2 and
u(t) = (sin(t/2) / (pi t))^2.  The spectrum of phi_m is the triangle
on [r_m, r_{m+1}] with peak 1 at c_m, so the spectrum of f_k is a sum of
triangles with peaks m^-2 and rational breakpoints.

When the prefix r_1..r_{k+1} has no strict increase the truncation would
be zero; a seed triangle on [r_1 / 2, r_1] with weight 1 is used instead so
the support sup is r_{k+1} for every admissible generator.  Masses are
normalized: a triangle's integral over its half width, so each term
counts as its weight.
"""

from __future__ import annotations

import csv
import io
import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .encodings import rat_decode, unpair
from .exact_real import EffectiveSequence, Interval, pi_interval, sin_cos, sin_over
from .signals import ComplexEnclosure, ComplexRational

PI_LOWER = pi_interval(64).lo
PI_SQUARED_OVER_SIX_UPPER = (pi_interval(64).hi ** 2) / 6
U_SUP_BOUND = Fraction(1, 39)  # 1/(4 pi^2) < 1/39


@dataclass(frozen=True)
class Triangle:
    lo: Fraction
    hi: Fraction
    weight: Fraction  # peak height
    index: int  # m, or 0 for the seed

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def half_width(self) -> Fraction:
        return (self.hi - self.lo) / 2

    def value(self, w: Fraction) -> Fraction:
        if w <= self.lo or w >= self.hi:
            return Fraction(0)
        return self.weight * (1 - abs(w - self.mid) / self.half_width)

    def integral(self) -> Fraction:
        return self.weight * self.half_width

    def max_on(self, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
        """(argmax, max) of the triangle over the closed interval [a, b]."""
        if a > b:
            return a, Fraction(0)
        w = min(max(self.mid, a), b)
        return w, self.value(w)


@dataclass(frozen=True)
class PiecewiseLinearSpectrum:
    breakpoints: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        ws = [w for w, _ in self.breakpoints]
        if any(a >= b for a, b in zip(ws, ws[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(v < 0 for _, v in self.breakpoints):
            raise ValueError("spectrum values must be nonnegative")

    @classmethod
    def from_triangles(cls, triangles: list[Triangle]) -> PiecewiseLinearSpectrum:
        points: dict[Fraction, Fraction] = {}
        for t in triangles:
            for w in (t.lo, t.mid, t.hi):
                points.setdefault(w, Fraction(0))
        for w in points:
            points[w] = sum((t.value(w) for t in triangles), Fraction(0))
        return cls(tuple(sorted(points.items())))

    def value(self, w) -> Fraction:
        w = Fraction(w)
        bp = self.breakpoints
        if not bp or w < bp[0][0] or w > bp[-1][0]:
            return Fraction(0)
        if w == bp[-1][0]:
            return bp[-1][1]
        lo, hi = 0, len(bp) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if bp[mid][0] <= w:
                lo = mid
            else:
                hi = mid
        (w0, v0), (w1, v1) = bp[lo], bp[hi]
        return v0 + (v1 - v0) * (w - w0) / (w1 - w0)

    @property
    def support_sup(self) -> Fraction:
        nonzero = [w for w, v in self.breakpoints if v > 0]
        if not nonzero:
            return Fraction(0)
        # the segment after the last positive breakpoint reaches zero at the next one
        i = max(i for i, (w, v) in enumerate(self.breakpoints) if v > 0)
        return self.breakpoints[min(i + 1, len(self.breakpoints) - 1)][0]

    def integral(self) -> Fraction:
        bp = self.breakpoints
        return sum(((w1 - w0) * (v0 + v1) / 2 for (w0, v0), (w1, v1) in zip(bp, bp[1:])), Fraction(0))

    def max_on(self, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
        """(argmax, max) over the closed interval [a, b]; piecewise linear so
        the maximum sits at an endpoint or a breakpoint inside."""
        cands = [a, b] + [w for w, _ in self.breakpoints if a < w < b]
        best = max(cands, key=lambda w: (self.value(w), -w))
        return best, self.value(best)

    def to_json(self) -> list[list[str]]:
        return [[str(w), str(v)] for w, v in self.breakpoints]

    def to_csv(self, digits: int = 12) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["omega", "value", "omega_exact", "value_exact", "radius"])
        radius = Fraction(1, 2 * 10**digits)
        for w, v in self.breakpoints:
            writer.writerow([_decimal(w, digits), _decimal(v, digits), str(w), str(v), str(radius)])
        return out.getvalue()


def _ceil_dyadic(q: Fraction, bits: int) -> Fraction:
    return Fraction(-((-q.numerator << bits) // q.denominator), 1 << bits)


def _decimal(q: Fraction, digits: int) -> str:
    """q rounded half-up to `digits` places (error at most 10^-digits / 2)."""
    scaled = q * 10**digits
    n = (scaled.numerator * 2 + scaled.denominator) // (2 * scaled.denominator)
    sign = "-" if n < 0 else ""
    n = abs(n)
    whole, frac = divmod(n, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}" if digits else f"{sign}{whole}"


def basel_tail_upper(k: int) -> Fraction:
    """Rational upper bound on pi^2/6 - sum_{m <= k} m^-2."""
    return PI_SQUARED_OVER_SIX_UPPER - sum((Fraction(1, m * m) for m in range(1, k + 1)), Fraction(0))


@dataclass(frozen=True, eq=False)
class B1Signal:
    generator: EffectiveSequence
    k: int
    triangles: tuple[Triangle, ...]
    spectrum: PiecewiseLinearSpectrum
    tail_bound: Fraction
    seeded: bool = False

    @property
    def support_sup(self) -> Fraction:
        return self.spectrum.support_sup

    def term_masses(self) -> list[tuple[int, Fraction]]:
        """Normalized L1 mass of each term: integral of its triangle over the half width."""
        return [(t.index, t.integral() / t.half_width) for t in self.triangles]

    def mass(self) -> Fraction:
        return sum((v for _, v in self.term_masses()), Fraction(0))

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "seeded": self.seeded,
            "support_sup": str(self.support_sup),
            "mass": str(self.mass()),
            "tail_bound": str(self.tail_bound),
            "triangles": [
                {"m": t.index, "lo": str(t.lo), "hi": str(t.hi), "peak": str(t.weight)} for t in self.triangles
            ],
            "breakpoints": self.spectrum.to_json(),
        }


def _prefix(r: EffectiveSequence, k: int, positive: bool) -> list[Fraction]:
    vals = [r(m) for m in range(k + 2)]
    for m, v in enumerate(vals):
        if v < 0 or (positive and v <= 0):
            raise ValueError(f"generator must be {'positive' if positive else 'nonnegative'}: r_{m} = {v}")
        if m and v < vals[m - 1]:
            raise ValueError(f"generator must be nondecreasing: r_{m} = {v} < r_{m - 1} = {vals[m - 1]}")
    return vals


def _build(r: EffectiveSequence, k: int, vals: list[Fraction]) -> B1Signal:
    tris = [
        Triangle(vals[m], vals[m + 1], Fraction(1, m * m), m) for m in range(1, k + 1) if vals[m] < vals[m + 1]
    ]
    seeded = False
    tail = basel_tail_upper(k)
    if not tris and vals[1] > 0:
        tris = [Triangle(vals[1] / 2, vals[1], Fraction(1), 0)]
        seeded = True
        tail += 1
    return B1Signal(r, k, tuple(tris), PiecewiseLinearSpectrum.from_triangles(tris), tail, seeded)


def synthesize(r: EffectiveSequence, k: int) -> B1Signal:
    """k-truncation for a positive nondecreasing generator (checked on r_0..r_{k+1})."""
    if k < 0:
        raise ValueError("truncation must be a natural number")
    return _build(r, k, _prefix(r, k, positive=True))


def spectrum_max_outside(f: B1Signal, sigma) -> Fraction:
    """max of the spectrum over the closed interval [sigma, pi]."""
    sigma = Fraction(sigma)
    if not 0 < sigma < PI_LOWER:
        raise ValueError("sigma must lie in (0, pi)")
    return f.spectrum.max_on(sigma, PI_LOWER)[1]


# ------------------------------------------------------------ time domain


def u_enclosure(t, bits: int) -> Interval:
    """u(t) = (sin(t/2)/(pi t))^2 = (1/(4 pi^2)) (sin(t/2)/(t/2))^2, continuous at 0."""
    s = sin_over(Fraction(t) / 2, bits + 4)
    p = pi_interval(bits + 8)
    return (s * s) / (4 * p * p)


def eval_time(f: B1Signal, t, M: int, untruncated: bool = False, bound=None) -> ComplexEnclosure:
    """Enclosure of f_k(t); with untruncated=True the radius also covers the
    rest of the series, using `bound` (default pi) as a bound on r."""
    t = Fraction(t)
    bits = M + len(f.triangles).bit_length() + 8
    re = Interval.point(0)
    im = Interval.point(0)
    for tri in f.triangles:
        hw = tri.half_width
        amp = u_enclosure(hw * t, bits) * (tri.weight * hw)
        s, c = sin_cos(tri.mid * t, bits)
        re = re + amp * c
        im = im + amp * s
    # dyadic center and radius keep emitted numbers short
    cre, cim = _ceil_dyadic(re.mid, M + 8), _ceil_dyadic(im.mid, M + 8)
    radius = _ceil_dyadic(re.rad + im.rad + (cre - re.mid) + (cim - im.mid), M + 8)
    if untruncated:
        bound = Fraction(bound) if bound is not None else pi_interval(16).hi
        radius += _ceil_dyadic(f.tail_bound * bound / 2 * U_SUP_BOUND, M + 8)
    return ComplexEnclosure(ComplexRational(cre, cim), radius)


# ------------------------------------------------------------ semi-decision


@dataclass(frozen=True)
class Witness:
    k: int
    omega: Fraction
    value: Fraction


@dataclass(frozen=True)
class Halted:
    witness: Witness


@dataclass(frozen=True)
class Exhausted:
    fuel: int


def _generator_values(r: EffectiveSequence):
    cache: list[Fraction] = []

    def get(m: int) -> Fraction:
        while len(cache) <= m:
            cache.append(r(len(cache)))
        return cache[m]

    return get


def semidecide_bw_gt(r: EffectiveSequence, sigma, fuel: int) -> Halted | Exhausted:
    """Search truncation levels k < fuel for a positive spectrum value in [sigma, pi].

    Level k adds only the triangle on [r_k, r_{k+1}] (or keeps the seed), so
    each level is checked by looking at the newest triangle.
    """
    sigma = Fraction(sigma)
    if not 0 < sigma < PI_LOWER:
        raise ValueError("sigma must lie in (0, pi)")
    get = _generator_values(r)
    strict_seen = False
    for k in range(fuel):
        if k >= 1 and get(k) < get(k + 1):
            strict_seen = True
            tri = Triangle(get(k), get(k + 1), Fraction(1, k * k), k)
        elif not strict_seen and get(1) > 0:
            tri = Triangle(get(1) / 2, get(1), Fraction(1), 0)
        else:
            continue
        w, v = tri.max_on(sigma, PI_LOWER)
        if v > 0:
            value = synthesize_nonnegative(r, k).spectrum.value(w)
            return Halted(Witness(k, w, value))
    return Exhausted(fuel)


def verify_witness(r: EffectiveSequence, sigma, witness: Witness) -> bool:
    f = synthesize_nonnegative(r, witness.k)
    sigma = Fraction(sigma)
    return (
        sigma <= witness.omega <= PI_LOWER
        and f.spectrum.value(witness.omega) == witness.value > 0
        and spectrum_max_outside(f, sigma) > 0
    )


def synthesize_nonnegative(r: EffectiveSequence, k: int) -> B1Signal:
    """Like synthesize but admits zeros (the zero generator gives the zero signal)."""
    return _build(r, k, _prefix(r, k, positive=False))


# ------------------------------------------------------- Sigma_1 conversions


def prefix_max(r: EffectiveSequence) -> EffectiveSequence:
    """r'_m = max({r_k : k <= m} u {0})."""
    values: list[Fraction] = []
    lock = threading.Lock()

    def query(m: int) -> Fraction:
        with lock:
            while len(values) <= m:
                v = max(r(len(values)), Fraction(0))
                values.append(v if not values else max(values[-1], v))
            return values[m]

    return EffectiveSequence(1, query, "composite")


@dataclass(frozen=True, eq=False)
class Sigma1Signal:
    generator: EffectiveSequence

    def truncation(self, k: int) -> B1Signal:
        return synthesize_nonnegative(self.generator, k)


def sigma1_to_signal(r: EffectiveSequence) -> Sigma1Signal:
    return Sigma1Signal(prefix_max(r))


@dataclass
class LowerEnumeration:
    """Dovetailed search for rationals q in (0, pi) with q < bw.

    Step m decodes (c, s) = unpair(m) and accepts q = rat_decode(c) when the
    semi-decision for q halts within s levels.  value(L) is the largest
    accepted q over m <= L, or 0.
    """

    generator: EffectiveSequence
    halting: dict[Fraction, tuple[int, int | None]] = field(default_factory=dict)
    running: list[Fraction] = field(default_factory=list)

    def _halts_within(self, q: Fraction, s: int) -> bool:
        searched, level = self.halting.get(q, (0, None))
        if level is not None:
            return level < s
        if s <= searched:
            return False
        # searching ahead (doubling) keeps repeated queries for one q linear overall
        budget = max(s, 2 * searched)
        res = semidecide_bw_gt(self.generator, q, budget)
        if isinstance(res, Halted):
            self.halting[q] = (budget, res.witness.k)
            return res.witness.k < s
        self.halting[q] = (budget, None)
        return False

    def value(self, L: int) -> Fraction:
        while len(self.running) <= L:
            m = len(self.running)
            c, s = unpair(m, 2)
            q = rat_decode(c)
            best = self.running[-1] if self.running else Fraction(0)
            if 0 < q < PI_LOWER and q > best and self._halts_within(q, s):
                best = q
            self.running.append(best)
        return self.running[L]


def bw_lower_enumeration(r: EffectiveSequence, fuel: int) -> Fraction:
    return LowerEnumeration(r).value(fuel)


def spectrum_document(f: B1Signal) -> str:
    return json.dumps(f.to_json(), indent=1, sort_keys=True) + "\n"
