from fractions import Fraction

import mpmath
import pytest

from artifact.b1_synthesis import (
    Exhausted,
    Halted,
    LowerEnumeration,
    Triangle,
    basel_tail_upper,
    bw_lower_enumeration,
    eval_time,
    prefix_max,
    semidecide_bw_gt,
    sigma1_to_signal,
    spectrum_document,
    spectrum_max_outside,
    synthesize,
    synthesize_nonnegative,
    u_enclosure,
    verify_witness,
)
from artifact.exact_real import EffectiveSequence
from conftest import mpf


def seq(fn):
    return EffectiveSequence(1, lambda m: Fraction(fn(m)))


GEOM = seq(lambda m: 1 - Fraction(1, 2 ** (m + 1)))


def listed(values, tail):
    return seq(lambda m: values[m] if m < len(values) else tail)


def test_single_seed_triangle():
    f = synthesize(listed([Fraction(1, 2)], 1), 1)
    assert [(t.lo, t.hi) for t in f.triangles] == [(Fraction(1, 2), 1)]
    assert f.support_sup == 1


def test_geometric_generator():
    f = synthesize(GEOM, 3)
    assert f.support_sup == Fraction(31, 32)
    assert f.mass() == 1 + Fraction(1, 4) + Fraction(1, 9)
    assert f.spectrum.integral() == sum(t.integral() for t in f.triangles)


@pytest.mark.parametrize("c", [Fraction(1, 3), Fraction(2), Fraction(3)])
def test_constant_generator_is_seeded(c):
    f = synthesize(seq(lambda m: c), 4)
    assert f.seeded
    assert [(t.lo, t.hi) for t in f.triangles] == [(c / 2, c)]
    assert f.support_sup == c


def test_generator_checks():
    with pytest.raises(ValueError, match="nondecreasing"):
        synthesize(listed([1, Fraction(1, 2)], 1), 2)
    with pytest.raises(ValueError, match="positive"):
        synthesize(seq(lambda m: 0), 2)
    assert synthesize_nonnegative(seq(lambda m: 0), 3).triangles == ()


def test_support_sup_is_next_generator_value():
    for k in range(1, 10):
        assert synthesize(GEOM, k).support_sup == 1 - Fraction(1, 2 ** (k + 2))
    harm = seq(lambda m: 1 - Fraction(1, m + 1))
    for k in range(1, 8):
        assert synthesize_nonnegative(harm, k).support_sup == 1 - Fraction(1, k + 2)


def test_spectrum_is_sum_of_triangles():
    f = synthesize(GEOM, 5)
    for j in range(200):
        w = Fraction(j, 199)
        assert f.spectrum.value(w) == sum(t.value(w) for t in f.triangles)


def test_triangle_geometry():
    t = Triangle(Fraction(1, 2), Fraction(1), Fraction(1), 1)
    assert t.value(Fraction(3, 4)) == 1
    assert t.value(Fraction(7, 8)) == Fraction(1, 2)
    assert t.integral() / t.half_width == 1


def test_spectrum_max_outside():
    f = synthesize(listed([Fraction(1, 2)], 1), 1)
    assert spectrum_max_outside(f, Fraction(7, 8)) == Fraction(1, 2)
    assert spectrum_max_outside(f, Fraction(1, 2)) == 1
    assert spectrum_max_outside(f, 1) == 0
    assert spectrum_max_outside(f, 3) == 0
    with pytest.raises(ValueError):
        spectrum_max_outside(f, 4)


def test_u_at_zero(mp256):
    iv = u_enclosure(0, 40)
    assert mpf(iv.lo) <= 1 / (4 * mpmath.pi**2) <= mpf(iv.hi)


def test_eval_single_triangle_at_zero(mp256):
    r = listed([Fraction(1, 2), Fraction(1, 2), Fraction(1)], 1)
    f = synthesize(r, 1)
    e = eval_time(f, 0, 20)
    ref = (mpmath.mpf(1) / 4) / (4 * mpmath.pi**2)
    assert abs(mpf(e.center.re) - ref) <= mpf(e.radius)
    assert abs(mpf(e.center.im)) <= mpf(e.radius)
    assert e.radius < Fraction(1, 2**20)


def test_eval_time_against_series(mp256):
    f = synthesize(GEOM, 4)
    for t in (Fraction(0), Fraction(3, 2), Fraction(-40), Fraction(1000, 7)):
        e = eval_time(f, t, 24)
        ref = mpmath.mpc(0)
        for tri in f.triangles:
            hw, c, x = mpf(tri.half_width), mpf(tri.mid), mpf(tri.half_width * t)
            u = (1 / (4 * mpmath.pi**2)) if x == 0 else (mpmath.sin(x / 2) / (mpmath.pi * x)) ** 2
            ref += mpf(tri.weight) * hw * u * mpmath.expj(c * mpf(t))
        assert abs(ref - mpmath.mpc(mpf(e.center.re), mpf(e.center.im))) <= mpf(e.radius) * mpmath.sqrt(2)


def test_eval_magnitude_bound():
    f = synthesize(GEOM, 6)
    bound = sum(t.weight * t.half_width for t in f.triangles) / 39
    for t in (0, 1, 17, -300):
        e = eval_time(f, t, 20)
        assert abs(e.center.re) <= bound + e.radius and abs(e.center.im) <= bound + e.radius


def test_untruncated_radius_covers_tail():
    f = synthesize(GEOM, 4)
    e = eval_time(f, 2, 20, untruncated=True, bound=1)
    assert e.radius >= basel_tail_upper(4) / 2 / 39


def test_semidecide_examples():
    res = semidecide_bw_gt(GEOM, Fraction(1, 4), 100)
    assert isinstance(res, Halted) and res.witness.k <= 2
    assert verify_witness(GEOM, Fraction(1, 4), res.witness)
    assert isinstance(semidecide_bw_gt(GEOM, 1, 10**4), Exhausted)
    assert isinstance(semidecide_bw_gt(GEOM, 3, 100), Exhausted)


def test_semidecide_near_limit():
    sigma = Fraction(63, 64)
    res = semidecide_bw_gt(GEOM, sigma, 100)
    assert isinstance(res, Halted)
    assert verify_witness(GEOM, sigma, res.witness)
    assert res.witness.omega >= sigma


def test_prefix_max():
    r = listed([Fraction(1, 2), Fraction(1, 4), Fraction(3, 4)], 1)
    p = prefix_max(r)
    assert [p(m) for m in range(4)] == [Fraction(1, 2), Fraction(1, 2), Fraction(3, 4), 1]
    z = sigma1_to_signal(seq(lambda m: 0))
    assert z.truncation(5).triangles == ()
    neg = prefix_max(seq(lambda m: -1))
    assert neg(3) == 0


def test_lower_enumeration():
    assert bw_lower_enumeration(GEOM, 0) == 0
    le = LowerEnumeration(GEOM)
    vals = [le.value(L) for L in range(0, 20000, 500)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    assert all(v < 1 for v in vals)
    assert vals[-1] >= Fraction(1, 2)


def test_lower_enumeration_half():
    r = seq(lambda m: Fraction(1, 2) - Fraction(1, 2 ** (m + 2)))
    le = LowerEnumeration(r)
    vals = [le.value(L) for L in range(0, 30000, 3000)]
    assert all(v < Fraction(1, 2) for v in vals)
    assert vals[-1] >= Fraction(1, 3)


def test_spectrum_document_is_canonical():
    a = spectrum_document(synthesize(GEOM, 3))
    b = spectrum_document(synthesize(GEOM, 3))
    assert a == b and '"support_sup": "31/32"' in a


def test_csv_columns():
    text = synthesize(GEOM, 2).spectrum.to_csv(6)
    header, first = text.splitlines()[:2]
    assert header == "omega,value,omega_exact,value_exact,radius"
    assert first.split(",")[2] == "3/4"
