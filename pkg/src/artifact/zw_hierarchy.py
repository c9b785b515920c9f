"""Zheng-Weihrauch descriptions and the transforms between them.

An order-2 upper description denotes inf_{m1} sup_{m2} x_{m1,m2}; order 1
denotes inf_{m1} x_{m1}.  The limsup conversion has two entry points: the
adaptive-cutoff algorithm for 0/1 rows that are nondecreasing in the column
(the shape produced by the runtime predicate), and a general conversion
that runs one cutoff machine per rational threshold.
"""

from __future__ import annotations

import threading
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction

from .encodings import rat_decode, unpair
from .exact_real import ComputableRealSeq, EffectiveSequence, Modulus


@dataclass(frozen=True)
class ZWDescription:
    order: int
    direction: str  # "upper" or "lower"
    body: ComputableRealSeq

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be at least 1")
        if self.direction not in ("upper", "lower"):
            raise ValueError("direction must be 'upper' or 'lower'")
        if self.body.arity != self.order:
            raise ValueError("body arity must equal the order")


@lru_cache(maxsize=None)
def _dyadic(w: int) -> Fraction:
    return Fraction(1, 1 << w)


@lru_cache(maxsize=1 << 16)
def _unpair2(m: int) -> tuple[int, int]:
    return unpair(m, 2)


def upper_zw_flatten(d: ZWDescription) -> EffectiveSequence:
    """Rational sequence with the same alternating value as d.

    With (w1, w2) = unpair(m1): g'(m) = (w1, m2, ..., mn), the body is read
    at g'(m) to precision w2, and 2^-w2 is added so every entry sits above
    the real it approximates.
    """
    if d.direction != "upper":
        raise ValueError("flattening needs an upper description")
    body = d.body

    def query(*m: int) -> Fraction:
        w1, w2 = _unpair2(m[0])
        index = (w1,) + tuple(m[1:])
        return body.approximations(*index, body.modulus(*index, w2)) + _dyadic(w2)

    return EffectiveSequence(d.order, query, "composite").memoized()


def bruteforce_infsup(r, box: int) -> Fraction:
    """min over m1 <= box of max over m2 <= 2 box of r(m1, m2).

    The sup side scans twice as far so that row m1 = box still sees columns
    beyond its own index.
    """
    return min(max(r(i, j) for j in range(2 * box + 1)) for i in range(box + 1))


class RowCache:
    """Running maxima of the rows of an arity-2 sequence, extended lazily."""

    def __init__(self, r):
        self.r = r
        self.rows: list[list[Fraction]] = []
        self.lock = threading.RLock()

    def _row(self, i: int) -> list[Fraction]:
        while len(self.rows) <= i:
            self.rows.append([])
        return self.rows[i]

    def _extend(self, i: int, row: list[Fraction], upto: int, q: Fraction | None = None) -> None:
        """Grow row i through column upto, stopping early once it reaches q."""
        # integer cross-multiplication avoids the slow generic Fraction comparison
        r = self.r
        last = row[-1] if row else None
        if last is not None:
            ln, ld = last.numerator, last.denominator
        if q is not None:
            qn, qd = q.numerator, q.denominator
        for j in range(len(row), upto + 1):
            v = r(i, j)
            if type(v) is not Fraction:
                v = Fraction(v)
            if last is None or v.numerator * ld > ln * v.denominator:
                last = v
                ln, ld = v.numerator, v.denominator
            row.append(last)
            if q is not None and ln * qd >= qn * ld:
                return

    def running_max(self, i: int, j: int) -> Fraction:
        with self.lock:
            row = self._row(i)
            if len(row) <= j:
                self._extend(i, row, j)
            return row[j]

    def probe(self, i: int, q: Fraction, s: int, upto: int) -> int | None:
        """A column <= s where row i's running max is >= q if there is one;
        otherwise the least such column <= upto, or None."""
        with self.lock:
            row = self._row(i)
            if len(row) > s:
                if row[s] >= q:
                    return s
                if row[-1] >= q:
                    return bisect_left(row, q, s + 1)  # running maxima are nondecreasing
                if len(row) > upto:
                    return None
            elif row and row[-1] >= q:
                return len(row) - 1
            # the row is below q so far; extension stops at the first column reaching q
            self._extend(i, row, upto, q)
            return len(row) - 1 if row[-1] >= q else None

    def reached(self, i: int, q: Fraction, s: int) -> bool:
        """Has row i attained a value >= q in some column <= s?"""
        hit = self.probe(i, q, s, s)
        return hit is not None and hit <= s


def monotone_normal_form(r) -> EffectiveSequence:
    """r'_{n,j} = min over i <= n of max over k <= j of r_{i,k}."""
    rows = RowCache(r)

    def query(n: int, j: int) -> Fraction:
        return min(rows.running_max(i, j) for i in range(n + 1))

    return EffectiveSequence(2, query, "composite").memoized()


class BinaryCutoff:
    """Adaptive cutoff for 0/1 rows nondecreasing in the column.

    Stage s emits 1 and advances the cutoff c when every row i <= c has
    reached 1 by column s; otherwise it emits 0.  Rows below c were checked
    when c passed them and stay at 1, so only row c is examined.
    """

    def __init__(self, r):
        self.r = r
        self.bits: list[int] = []
        self.cutoffs: list[int] = []  # cutoff in force at the start of each stage
        self.c = 0
        self.lock = threading.Lock()

    def _advance(self, t: int) -> None:
        while len(self.bits) <= t:
            s = len(self.bits)
            self.cutoffs.append(self.c)
            if self.r(self.c, s) >= 1:
                self.bits.append(1)
                self.c += 1
            else:
                self.bits.append(0)

    def emission(self, s: int) -> int:
        with self.lock:
            self._advance(s)
            return self.bits[s]

    def cutoff(self, s: int) -> int:
        with self.lock:
            self._advance(s)
            return self.cutoffs[s]

    def count(self, stages: int) -> int:
        """Number of 1-emissions among stages 0..stages-1."""
        if stages <= 0:
            return 0
        with self.lock:
            self._advance(stages - 1)
            return sum(self.bits[:stages])

    def sequence(self) -> EffectiveSequence:
        return EffectiveSequence(1, lambda s: Fraction(self.emission(s)), "composite")


class _ThresholdMachine:
    """The adaptive cutoff run on the 0/1 rows [running max >= q]."""

    def __init__(self, q: Fraction, order: int):
        self.q = q
        self.order = order
        self.threshold = order.bit_length()
        self.c = 0
        self.count = 0
        self.stage = -1
        self.fired_at_stage = False
        self.wake = 0  # no firing before this stage on the current row

    def step(self, rows: RowCache, s: int) -> None:
        self.stage = s
        self.fired_at_stage = False
        if s < self.wake:
            return
        # look a little past s so a stalled machine sleeps through several stages
        upto = s + s // 4 + 16
        hit = rows.probe(self.c, self.q, s, upto)
        if hit is not None and hit <= s:
            self.fired_at_stage = True
            self.c += 1
            self.count += 1
            self.wake = 0
        else:
            self.wake = hit if hit is not None else upto + 1


class LimsupConverter:
    """General inf-sup to limsup conversion.

    One cutoff machine runs per candidate threshold q.  A machine for q
    advances past row i only once row i has reached q, so it advances
    forever iff q <= every row supremum (attained), and stalls for good
    once q exceeds some row supremum.  Stage s emits the largest q whose
    machine advances at s and has advanced at least bitlen(k) times, k
    being the order in which q was introduced; stalled thresholds above
    the inf-sup therefore fire only finitely often in total.  Candidates
    are all rationals (rat_decode(j) enters at stage 2^j) plus the
    normal-form values a_{i,2^p}, i <= p + 1, entering at stage 2^p.  When
    nothing fires, the stage emits one less than the smallest rational
    candidate so far, which drifts to minus infinity.
    """

    def __init__(self, r):
        self.rows = RowCache(r)
        self.machines: list[_ThresholdMachine] = []
        self.known: set[Fraction] = set()
        self.rat_floor: Fraction | None = None
        self.out: list[Fraction] = []
        self.lock = threading.Lock()

    def _normal_form(self, i: int, t: int) -> Fraction:
        return min(self.rows.running_max(k, t) for k in range(i + 1))

    def _introduce(self, q: Fraction, s: int) -> None:
        if q in self.known:
            return
        self.known.add(q)
        m = _ThresholdMachine(q, len(self.machines))
        # replay earlier stages so the machine's state is a function of q alone
        for past in range(s):
            m.step(self.rows, past)
        self.machines.append(m)

    def _stage(self, s: int) -> Fraction:
        if s == 0 or (s & (s - 1)) == 0:
            p = s.bit_length() - 1 if s else 0
            q = rat_decode(p if s else 0)
            self.rat_floor = q if self.rat_floor is None else min(self.rat_floor, q)
            self._introduce(q, s)
            for i in range(p + 2):
                self._introduce(self._normal_form(i, s), s)
        best = None
        for m in self.machines:
            m.step(self.rows, s)
            if m.fired_at_stage and m.count >= m.threshold:
                if best is None or m.q > best:
                    best = m.q
        return best if best is not None else self.rat_floor - 1

    def emission(self, s: int) -> Fraction:
        with self.lock:
            while len(self.out) <= s:
                self.out.append(self._stage(len(self.out)))
            return self.out[s]

    def sequence(self) -> EffectiveSequence:
        return EffectiveSequence(1, self.emission, "composite")


def infsup_to_limsup(r, binary: bool = False) -> EffectiveSequence:
    """Sequence whose limsup equals inf_{m1} sup_{m2} r.

    binary=True selects the adaptive-cutoff algorithm for 0/1 rows that are
    nondecreasing in m2.
    """
    if binary:
        return BinaryCutoff(r).sequence()
    return LimsupConverter(r).sequence()


def window_max(seq, start: int, stop: int) -> Fraction:
    """max of seq(s) over start <= s <= stop."""
    return max(seq(s) for s in range(start, stop + 1))


def limsup_shift_desc(b: ComputableRealSeq) -> ZWDescription:
    """b'_{m1,m2} = b_{m1+m2}, so inf-sup of b' is limsup of b."""
    if b.arity != 1:
        raise ValueError("limsup_shift_desc needs an arity-1 sequence")
    body = ComputableRealSeq(
        2,
        EffectiveSequence(3, lambda m1, m2, j: b.approximations(m1 + m2, j), "composite"),
        Modulus(lambda m1, m2, M: b.modulus(m1 + m2, M)),
    )
    return ZWDescription(2, "upper", body)


def fuel_estimate(d: ZWDescription, T: int, M: int) -> Fraction:
    """min over m1 <= T of max over m2 <= T of M-bit approximants."""
    if d.order != 2 or d.direction != "upper":
        raise ValueError("fuel_estimate handles order-2 upper descriptions")
    return min(max(d.body.approx((m1, m2), M) for m2 in range(T + 1)) for m1 in range(T + 1))
