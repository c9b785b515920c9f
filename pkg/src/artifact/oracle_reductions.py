"""Devices Ob, Oa, SG and the reductions from totality and halting to bandwidth.

The devices cannot exist as algorithms, so they are backed either by a
construction certificate (the exact bandwidth known from how a signal was
built) or by a fuel-bounded estimate that is advisory only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .encodings import dyadic_bits, x_of_set
from .exact_real import ComputableRealSeq, EffectiveSequence, Modulus
from .signals import TaylorSignal, bandwidth_estimate, type_bound_violations
from .toy_machine import CorpusEntry, Oracle, corpus, corpus_entry, psi
from .zw_hierarchy import BinaryCutoff

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Device:
    kind: str  # "Ob", "Oa" or "SG"
    backing: str = "ground-truth"  # or "fuel"
    fuel: int = 200
    bits: int = 16

    def __post_init__(self):
        if self.kind not in ("Ob", "Oa", "SG"):
            raise ValueError(f"unknown device kind {self.kind!r}")
        if self.backing not in ("ground-truth", "fuel"):
            raise ValueError(f"unknown backing {self.backing!r}")


class NoCertificate(LookupError):
    pass


def sg(a: ComputableRealSeq, L: int, certificate: Fraction | None = None, name: str = "") -> TaylorSignal:
    """Package coefficients as a signal after spot-checking the type bound."""
    f = TaylorSignal(a, L, name, certificate)
    bad = type_bound_violations(f)
    if bad:
        raise ValueError(f"coefficients violate the type bound L={L} at n={bad}")
    return f


# ------------------------------------------------------------- totality


@dataclass(frozen=True, eq=False)
class TotalityCoefficients:
    """a_m = (r'_m)^m with r' the adaptive cutoff over rows Psi(n, m1, .)."""

    program: int
    cutoff: BinaryCutoff

    def value(self, m: int) -> Fraction:
        bit = self.cutoff.emission(m)
        return Fraction(bit) ** m  # 0^0 = 1

    def sequence(self) -> ComputableRealSeq:
        # exact rationals, so any approximation index works; the modulus is constant 1
        return ComputableRealSeq(
            1, EffectiveSequence(2, lambda m, k: self.value(m), "program-backed"), Modulus(lambda m, M: 1)
        )


def totality_coefficients(n: int) -> TotalityCoefficients:
    return TotalityCoefficients(n, BinaryCutoff(lambda i, s: psi(n, i, s)))


def totality_certificate(n: int) -> Fraction | None:
    entry = corpus_entry(n)
    if entry is None:
        return None
    return Fraction(1 if entry.total else 0)


def totality_to_signal(n: int) -> TaylorSignal:
    """bw = 1 if program n is total, else 0; certified for corpus programs."""
    coeffs = totality_coefficients(n)
    return sg(coeffs.sequence(), 1, totality_certificate(n), f"totality({n})")


def stabilization_stage(entry: CorpusEntry) -> int | None:
    """Stage at which the cutoff reaches the first divergent input, from recorded
    halting times; None for total programs."""
    d = entry.first_divergent()
    if d is None:
        if entry.total:
            return None
        raise ValueError(f"{entry.name}: no divergent input within the recorded table")
    stage = 0
    for i in range(d):
        stage = max(stage, entry.halting_times[i]) + 1
    return stage


def windowed_bandwidth_01(bits: list[int], T: int) -> int:
    """min_{m1 <= T} max_{m1 < m <= m1 + T + 1} of 0/1 coefficients.

    This is the order-2 fuel estimate for coefficients in {0, 1}, whose roots
    equal the coefficients themselves.  Needs len(bits) >= 2T + 2.
    """
    prefix = [0]
    for b in bits[: 2 * T + 2]:
        prefix.append(prefix[-1] + b)
    return min(1 if prefix[m1 + T + 2] - prefix[m1 + 1] > 0 else 0 for m1 in range(T + 1))


# ----------------------------------------------------------------- devices


def ob(f: TaylorSignal, device: Device, polarity: str = "lt") -> int:
    """1 iff bw(f) < 1/2 (polarity "lt") or bw(f) > 1/2 (polarity "gt").

    Fuel backing compares a bandwidth estimate with 1/2 and is advisory only.
    """
    if polarity not in ("lt", "gt"):
        raise ValueError("polarity must be 'lt' or 'gt'")
    if device.backing == "ground-truth":
        if f.certificate is None:
            raise NoCertificate(f"signal {f.name!r} carries no bandwidth certificate")
        bw = f.certificate
    else:
        bw = bandwidth_estimate(f, device.fuel, device.bits)
    return int(bw < HALF) if polarity == "lt" else int(bw > HALF)


def oa(f: TaylorSignal, n: int, device: Device) -> Fraction:
    """x[A_n[bw(f)]]; bw = 0 has the empty expansion."""
    if device.backing != "ground-truth":
        raise NoCertificate("Oa is only available with certificate backing")
    if f.certificate is None:
        raise NoCertificate(f"signal {f.name!r} carries no bandwidth certificate")
    if f.certificate == 0:
        return Fraction(0)
    return x_of_set(dyadic_bits(f.certificate, n))


def totality_from_oa(v, n: int) -> int:
    """1 iff v 2^(n+2) - 2 floor(v 2^(n+1)) = 1, in exact arithmetic."""
    v = Fraction(v)
    g = v * (1 << (n + 2)) - 2 * ((v * (1 << (n + 1))).numerator // (v * (1 << (n + 1))).denominator)
    return int(g == 1)


OA_ALIGNMENT = (1, 2)  # (offset of the Oa precision, offset of the decoded bit)


def membership_via_oa(f: TaylorSignal, n: int, device: Device) -> int:
    """Membership of n in S for a signal certified with bw = x[S]."""
    a, b = OA_ALIGNMENT
    return totality_from_oa(oa(f, n + a, device), n + b)


# -------------------------------------------------- halting-oracle bandwidth


def _lcm_range(n: int) -> int:
    out = 1
    for k in range(1, n + 1):
        out = lcm(out, k)
    return out


def domain_dyadic_value(entry: CorpusEntry, preperiod: int = 20, period: int | None = None) -> Fraction:
    """x[D] exactly, for a corpus domain that is periodic beyond `preperiod`."""
    period = period or _lcm_range(6)
    window = [entry.halts_on(preperiod + i) for i in range(3 * period)]
    if window[:period] != window[period : 2 * period] or window[:period] != window[2 * period :]:
        raise ValueError(f"{entry.name}: domain is not periodic with period {period} beyond {preperiod}")
    head = x_of_set(j for j in range(preperiod) if entry.halts_on(j))
    block = x_of_set(preperiod + i for i in range(period) if window[i])
    return head + block / (1 - Fraction(1, 1 << period))


@dataclass(frozen=True, eq=False)
class DyadicStandIn:
    """A Sigma_1 bandwidth x[D(g)] for a corpus program g.

    generator(l) = x[{k <= l : g halts on k within l steps}] is nondecreasing
    with limit x[D(g)]; it is the generator a B1 synthesis would take.
    """

    program: int
    certificate: Fraction

    def generator(self) -> EffectiveSequence:
        def r(l: int) -> Fraction:
            return x_of_set(k for k in range(l + 1) if psi(self.program, k, l))

        return EffectiveSequence(1, r, "program-backed").memoized()


def dyadic_stand_in(name_or_index) -> DyadicStandIn:
    entry = None
    for e in corpus():
        if e.name == name_or_index or e.index == name_or_index:
            entry = e
    if entry is None:
        raise LookupError(f"{name_or_index!r} is not a corpus program")
    return DyadicStandIn(entry.index, domain_dyadic_value(entry))


def bw_via_halting_oracle(f: DyadicStandIn, oracle: Oracle, m: int) -> Fraction:
    """x[B_m] with B_m = {k <= m + 1 : the oracle says g halts on k}."""
    if oracle.kind != "halting":
        raise ValueError("bw_via_halting_oracle needs a halting oracle")
    members = []
    for k in range(m + 2):
        answer = oracle.halts(f.program, k)
        if answer is None:
            raise LookupError(f"oracle cannot answer for program {f.program} on input {k}")
        if answer:
            members.append(k)
    return x_of_set(members)


# ---------------------------------------------------------------- report

REPORT_BUDGETS = (100, 1000, 10000)


def reduction_entry(entry: CorpusEntry, budgets=REPORT_BUDGETS) -> dict:
    coeffs = totality_coefficients(entry.index)
    horizon = 2 * max(budgets) + 2
    bits = [coeffs.cutoff.emission(s) for s in range(horizon)]
    f = sg(coeffs.sequence(), 1, totality_certificate(entry.index), entry.name)
    device_bit = ob(f, Device("Ob"), polarity="gt")
    return {
        "index": str(entry.index),
        "name": entry.name,
        "total": entry.total,
        "ones_before_budget": {str(b): sum(bits[:b]) for b in budgets},
        "fuel_bandwidth_estimate": {str(b): windowed_bandwidth_01(bits, b) for b in budgets},
        "stabilization_stage": stabilization_stage(entry),
        "ob_literal": ob(f, Device("Ob")),
        "ob_reduction": device_bit,
        "agrees": device_bit == int(entry.total),
    }


def reduction_report(entries: list[CorpusEntry] | None = None, budgets=REPORT_BUDGETS) -> dict:
    rows = [reduction_entry(e, budgets) for e in (entries if entries is not None else corpus())]
    return {
        "budgets": list(budgets),
        "polarity": "1 iff bw > 1/2",
        "programs": rows,
        "all_agree": all(r["agrees"] for r in rows),
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True) + "\n"
