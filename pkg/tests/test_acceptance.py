"""The nine acceptance criteria, each timed and reported as one PASS/FAIL line."""

import random
import time
from contextlib import contextmanager
from fractions import Fraction
from math import factorial

import mpmath
import numpy as np
import pytest

from artifact.b1_synthesis import Exhausted, Halted, PI_LOWER, semidecide_bw_gt, synthesize, verify_witness
from artifact.encodings import pair, rat_decode, rat_encode, unpair
from artifact.exact_real import EffectiveSequence
from artifact.oracle_reductions import (
    bw_via_halting_oracle,
    domain_dyadic_value,
    dyadic_stand_in,
    reduction_report,
    totality_coefficients,
)
from artifact.signals import (
    ComplexRational,
    bandwidth_estimate,
    builtin_signal,
    exp_scaled,
    polynomial_signal,
    sinc_signal,
    taylor_to_weierstrass,
    weierstrass_to_taylor,
)
from artifact.toy_machine import Oracle, corpus, corpus_by_name
from artifact.zw_hierarchy import (
    ZWDescription,
    bruteforce_infsup,
    infsup_to_limsup,
    upper_zw_flatten,
    window_max,
)
from conftest import mpf
from test_zw_hierarchy import exact_body, flatten_oracle
from zw_instances import instances


@contextmanager
def criterion(record, n: int, text: str, limit: float):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        verdict = "PASS" if ok and elapsed < limit else "FAIL"
        record(f"{verdict} criterion {n}: {text} ({elapsed:.2f} s, limit {limit} s)")
    assert elapsed < limit, f"took {elapsed:.2f} s"


def test_criterion_1_encodings(record):
    with criterion(record, 1, "pairing and rational encoding round-trips", 5):
        for arity in (1, 2, 3, 4):
            for n in range(10**5):
                assert pair(unpair(n, arity)) == n
        rng = random.Random(1)
        for _ in range(10**4):
            q = Fraction(rng.randint(-(10**6), 10**6), rng.randint(1, 10**6))
            assert rat_decode(rat_encode(q)) == q


FORWARD_REFERENCES = {
    "exp": lambda z: mpmath.exp(z),
    "exp:1/2": lambda z: mpmath.exp(z / 2),
    "sinc": lambda z: mpmath.sin(mpmath.pi * z) / (mpmath.pi * z) if z != 0 else mpmath.mpf(1),
    "one": lambda z: mpmath.mpf(1),
}


def grid(J: int) -> list[ComplexRational]:
    """100 points of a 10 x 10 lattice inside the disk of radius J."""
    odd = range(-9, 10, 2)
    return [ComplexRational(Fraction(a * J, 13), Fraction(b * J, 13)) for a in odd for b in odd]


def test_criterion_2_forward_conversion(record, mp256):
    with criterion(record, 2, "forward conversion within 2^-M on 100 grid points, M <= 16, J <= 3", 30):
        violations = 0
        for name, ref in FORWARD_REFERENCES.items():
            w = taylor_to_weierstrass(builtin_signal(name))
            for J in (1, 2, 3):
                pts = grid(J)
                assert all(z.ceil_abs() <= J for z in pts)
                refs = [ref(mpmath.mpc(mpf(z.re), mpf(z.im))) for z in pts]
                for M in range(17):
                    p = w.polynomial(M, J)
                    tol = mpmath.mpf(2) ** -M
                    for z, r in zip(pts, refs):
                        v = p(z)
                        if abs(mpmath.mpc(mpf(v.re), mpf(v.im)) - r) >= tol:
                            violations += 1
        assert violations == 0


def test_criterion_3_backward_conversion(record):
    refs = [
        (exp_scaled(1), lambda n: Fraction(1)),
        (exp_scaled(Fraction(1, 2)), lambda n: Fraction(1, 2**n)),
        (exp_scaled(Fraction(-3, 4)), lambda n: Fraction(-3, 4) ** n),
        (builtin_signal("one"), lambda n: Fraction(int(n == 0))),
        (polynomial_signal([1, -2, 0, Fraction(1, 3)]), lambda n: [1, -2, 0, 2][n] if n < 4 else 0),
    ]
    with criterion(record, 3, "backward conversion error <= n! 2^-m, n <= 8, m <= 20", 10):
        for f, exact in refs:
            back = weierstrass_to_taylor(taylor_to_weierstrass(f), f.L)
            for n in range(9):
                for m in range(21):
                    raw = back.coefficients.approximations(n, m)
                    assert abs(raw - exact(n)) <= factorial(n) * Fraction(1, 2**m)


GEOM = EffectiveSequence(1, lambda m: 1 - Fraction(1, 2 ** (m + 1)))


def _u(x: np.ndarray) -> np.ndarray:
    """u(x) = (sin(x/2) / (pi x))^2 with u(0) = 1/(4 pi^2)."""
    return (np.sinc(x / (2 * np.pi)) / (2 * np.pi)) ** 2


def _u_l1() -> float:
    # integrate over [-X, X] and bound the rest by 2 / (pi^2 X)
    X, h = 2.0**16, 1 / 16
    x = np.arange(-X, X + h / 2, h)
    return float(np.trapezoid(_u(x), x)) + 2 / (np.pi**2 * X)


def l1_tail(k: int, extra: int = 3) -> float:
    """Numeric upper estimate of the L1 norm of f - f_k.

    Terms k+1..k+extra are summed pointwise and integrated on a window;
    the window's complement and the terms beyond k+extra are bounded by
    the triangle inequality.
    """
    K = k + extra
    tris = [t for t in synthesize(GEOM, K).triangles if t.index > k]
    hws = [float(t.half_width) for t in tris]
    c0 = tris[0].mid
    shifts = [float(t.mid - c0) for t in tris]  # |sum| is invariant under a common phase
    weights = [float(t.weight) for t in tris]
    scale = 1 / min(hws)
    W, h = scale * 2.0**12, 1 / (64 * max(hws))
    t = np.arange(-W, W + h / 2, h)
    total = np.zeros_like(t, dtype=complex)
    for hw, s, wt in zip(hws, shifts, weights):
        total += wt * hw * _u(hw * t) * np.exp(1j * s * t)
    inside = float(np.trapezoid(np.abs(total), t))
    outside = sum(wt * 2 / (np.pi**2 * hw * W) for hw, wt in zip(hws, weights))
    far = (np.pi**2 / 6 - sum(1 / m**2 for m in range(1, K + 1))) * _u_l1()
    return inside + outside + far


def test_criterion_4_b1_synthesis(record):
    with criterion(record, 4, "synthesis support sup, mass and L1 tail for k <= 12", 20):
        for k in range(13):
            f = synthesize(GEOM, k)
            assert f.support_sup == 1 - Fraction(1, 2 ** (k + 2))
            basel = sum((Fraction(1, m * m) for m in range(1, k + 1)), Fraction(0))
            # k = 0 has no triangle of its own and carries the weight-1 seed
            assert f.mass() == (basel if k else 1) and f.seeded == (k == 0)
            if k >= 1:
                basel_tail = np.pi**2 / 6 - sum(1 / m**2 for m in range(1, k + 1))
                assert l1_tail(k) <= basel_tail + 1e-6


def _generators() -> list[tuple[str, EffectiveSequence, Fraction]]:
    gens = []
    for b in (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3)):
        gens.append((f"geometric {b}", EffectiveSequence(1, lambda m, b=b: b * (1 - Fraction(1, 2 ** (m + 1)))), b))
    for b in (Fraction(1, 3), Fraction(1), Fraction(2), Fraction(3), Fraction(25, 8)):
        gens.append((f"harmonic {b}", EffectiveSequence(1, lambda m, b=b: b * Fraction(m + 1, m + 2)), b))
    for b in (Fraction(1, 4), Fraction(1), Fraction(2), Fraction(3)):
        gens.append((f"constant {b}", EffectiveSequence(1, lambda m, b=b: b), b))
    for b in (Fraction(1, 2), Fraction(7, 4), Fraction(5, 2)):
        # reaches b at m = 6 and stays there
        gens.append((f"plateau {b}", EffectiveSequence(1, lambda m, b=b: b * Fraction(min(m, 6) + 1, 7)), b))
    gens.append(("staircase 2", EffectiveSequence(1, lambda m: 2 - Fraction(1, 2 ** (m // 5))), Fraction(2)))
    gens.append(("triangular 1", EffectiveSequence(1, lambda m: 1 - Fraction(1, (m + 1) * (m + 2))), Fraction(1)))
    return gens


def test_criterion_5_semidecision(record):
    gens = _generators()
    assert len(gens) == 20
    with criterion(record, 5, "semi-decision halts below bw within 10^3, never above within 10^4", 60):
        for name, r, bw in gens:
            below = [bw * i / 8 for i in range(1, 8)] + [bw - Fraction(1, 64)]
            above = [bw, (bw + PI_LOWER) / 2]
            for sigma in below:
                res = semidecide_bw_gt(r, sigma, 10**3)
                assert isinstance(res, Halted), (name, sigma)
                assert verify_witness(r, sigma, res.witness), (name, sigma)
            for sigma in above:
                assert isinstance(semidecide_bw_gt(r, sigma, 10**4), Exhausted), (name, sigma)


def flatten_box(R: int) -> tuple[int, int]:
    """Box whose sup window 2 box covers the settling column 2^R, and the
    largest w2 it reaches for every row w1 <= R."""
    box = max(1 << max(R - 1, 0), 32)
    g = 0
    while all(pair((w1, g + 1)) <= box for w1 in range(R + 1)):
        g += 1
    return box, g


def test_criterion_6_zw_transforms(record):
    corpus6 = instances(200, base=1000)
    assert any(inst.R >= 8 for inst in corpus6)
    with criterion(record, 6, "flatten and limsup conversion on 200 eventually-constant instances", 30):
        for inst in corpus6:
            box, g = flatten_box(inst.R)
            flat = upper_zw_flatten(ZWDescription(2, "upper", exact_body(2, inst)))
            v = bruteforce_infsup(flat, box)
            assert v == flatten_oracle(inst, box)
            assert inst.value < v <= inst.value + Fraction(1, 2**g)
        for inst in corpus6:
            assert window_max(infsup_to_limsup(inst), 2**9, 2**10) == inst.value


def test_criterion_7_oracle_reduction(record):
    entries = corpus()
    assert len(entries) >= 50
    with criterion(record, 7, "totality reduction on every corpus program", 60):
        report = reduction_report(entries)
        assert report["all_agree"]
        for row, entry in zip(report["programs"], entries):
            assert row["ob_reduction"] == int(entry.total)
            counts = [row["ones_before_budget"][str(b)] for b in report["budgets"]]
            if entry.total:
                assert counts[0] < counts[1] < counts[2], entry.name
            else:
                stage = row["stabilization_stage"]
                cutoff = totality_coefficients(entry.index).cutoff
                horizon = 2 * report["budgets"][-1] + 2
                assert stage is not None and all(cutoff.emission(s) == 0 for s in range(stage, max(stage, horizon)))


def test_criterion_8_bandwidth_estimates(record):
    with criterion(record, 8, "fuel estimates for e^{cz} exact, sinc within 0.1 of pi", 20):
        for c in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)):
            f = exp_scaled(c)
            for T in (1, 2, 3, 10, 50):
                assert bandwidth_estimate(f, T, 16) == c
        est = bandwidth_estimate(sinc_signal(), 200, 16)
        assert abs(mpf(est) - mpmath.pi) < mpmath.mpf("0.1")


def test_criterion_9_halting_oracle_bits(record):
    oracle = Oracle("halting")
    # x[D] of each domain, frozen: {n >= 1}, the empty set and {0, 2, 4}
    expected = {"halt_iff_ge_1": Fraction(1, 2), "tight_loop": Fraction(0), "halt_iff_in_0_2_4": Fraction(21, 32)}
    with criterion(record, 9, "bandwidth bits from the halting oracle, m <= 16", 5):
        for name, bw in expected.items():
            s = dyadic_stand_in(name)
            assert s.certificate == domain_dyadic_value(corpus_by_name(name)) == bw
            for m in range(17):
                assert abs(bw - bw_via_halting_oracle(s, oracle, m)) < Fraction(1, 2**m)
