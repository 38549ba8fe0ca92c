import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etfzeros.logchar import IntervalQuery, build_profile, l_left, l_right, l_submeasure
from etfzeros.points import PointDistribution, conjugate, reflect, scale, union

PD = PointDistribution


def direct(Z, r, R):
    """Per-query reference sums over points with r < |z| <= R."""
    right, left = [], []
    for z, m in Z.entries:
        if r < abs(z) <= R:
            re = (1 / z).real
            (right if re > 0 else left).append(m * abs(re))
    return math.fsum(right), math.fsum(left)


PI_31 = [k * math.pi for k in range(1, 32)]
H31_OVER_PI = float(sum(Fraction(1, k) for k in range(1, 32))) / math.pi


def test_harmonic_example():
    P = build_profile(PD.from_points(PI_31))
    assert H31_OVER_PI == pytest.approx(1.2819, abs=5e-5)
    assert P.l_rh(100) == pytest.approx(H31_OVER_PI, rel=1e-15)
    assert P.l_lh(100) == 0
    assert l_right(P, (1, 100)) == pytest.approx(H31_OVER_PI, rel=1e-15)
    assert l_left(P, (1, 100)) == 0


def test_imaginary_axis_contributes_nothing():
    P = build_profile(PD({1j: 1, -1j: 1, 2j: 5}))
    for r in [0.5, 1, 2, 10]:
        assert P.l_rh(r) == 0 and P.l_lh(r) == 0


def test_boundary_inclusive():
    P = build_profile(PD({-2: 1}))
    assert P.l_lh(2) == 0.5
    assert P.l_rh(2) == 0
    assert P.l_lh(1.9) == 0


def test_interval_examples():
    P = build_profile(PD({2: 1, -2: 1}))
    assert l_right(P, (1, 2)) == 0.5
    assert l_left(P, (1, 2)) == 0.5
    assert l_right(P, (2, 5)) == 0
    assert l_submeasure(build_profile(PD({2: 1, -3: 1})), (1, 10)) == 0.5
    both = PD.from_points(PI_31 + [-p for p in PI_31])
    assert l_submeasure(build_profile(both), (1, 100)) == pytest.approx(H31_OVER_PI, rel=1e-15)


def test_empty_distribution_is_zero():
    P = build_profile(PD())
    for q in [(0.1, 1), (1, 100), (5, math.inf)]:
        assert l_submeasure(P, q) == 0


def test_origin_ignored():
    P = build_profile(PD({0: 4, 1: 1}))
    assert P.l_rh(10) == 1


def test_infinite_R_reads_last_modulus():
    P = build_profile(PD.from_points(PI_31))
    assert l_right(P, (1, math.inf)) == l_right(P, (1, P.t_max))


@pytest.mark.parametrize("r,R", [(0, 1), (-1, 1), (2, 2), (3, 1)])
def test_domain_errors(r, R):
    P = build_profile(PD({1: 1}))
    with pytest.raises(ValueError):
        l_right(P, (r, R))
    with pytest.raises(ValueError):
        IntervalQuery(r, R)


def test_permutation_gives_identical_bits():
    rng = np.random.default_rng(0)
    pts = (rng.normal(size=300) + 1j * rng.normal(size=300)) * 10
    a = build_profile(PD.from_points(pts.tolist()))
    b = build_profile(PD.from_points(pts[::-1].tolist()))
    for name in ("moduli", "right_hi", "right_lo", "left_hi", "left_lo"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_cumulative_monotone():
    rng = np.random.default_rng(1)
    Z = PD.from_points((rng.normal(size=200) + 1j * rng.normal(size=200)).tolist())
    P = build_profile(Z)
    full_r = P.right_hi + P.right_lo
    full_l = P.left_hi + P.left_lo
    assert full_r[0] == 0 and full_l[0] == 0
    assert np.all(np.diff(full_r) >= 0) and np.all(np.diff(full_l) >= 0)


def test_small_interval_keeps_relative_accuracy():
    # one far point after many near ones: the interval value is tiny next to the prefix total
    Z = PD.from_points([1 + 0.001 * k for k in range(1000)] + [1e6])
    P = build_profile(Z)
    assert l_right(P, (10, 2e6)) == pytest.approx(1e-6, rel=1e-15)


small = st.integers(-8, 8).filter(lambda k: k != 0).map(lambda k: k / 2)
pts = st.builds(complex, small, st.integers(-8, 8).map(lambda k: k / 2))
dists = st.dictionaries(pts, st.integers(1, 3), min_size=1, max_size=15).map(PD)
radius = st.sampled_from([0.3, 0.5, 0.75, 1.0, 1.5, 2.2, 3.0, 4.1, 6.0, 9.0])


@settings(max_examples=300, deadline=None)
@given(dists, st.lists(radius, min_size=3, max_size=3, unique=True))
def test_additivity_and_submeasure(Z, rs):
    r, R, S = sorted(rs)
    P = build_profile(Z)
    assert abs(l_right(P, (r, S)) - l_right(P, (r, R)) - l_right(P, (R, S))) <= 1e-12
    assert abs(l_left(P, (r, S)) - l_left(P, (r, R)) - l_left(P, (R, S))) <= 1e-12
    a, b, c = l_submeasure(P, (r, R)), l_submeasure(P, (R, S)), l_submeasure(P, (r, S))
    assert max(a, b) <= c + 1e-12
    assert c <= a + b + 1e-12


@settings(max_examples=300, deadline=None)
@given(dists, dists, radius, radius)
def test_distribution_additivity_and_monotonicity(Z, W, r, R):
    r, R = min(r, R), max(r, R)
    if r == R:
        R = 2 * r
    PZ, PW, PU = build_profile(Z), build_profile(W), build_profile(union(Z, W))
    q = (r, R)
    assert l_right(PU, q) == pytest.approx(l_right(PZ, q) + l_right(PW, q), abs=1e-12)
    assert l_left(PU, q) == pytest.approx(l_left(PZ, q) + l_left(PW, q), abs=1e-12)
    assert l_submeasure(PU, q) <= l_submeasure(PZ, q) + l_submeasure(PW, q) + 1e-12
    assert l_right(PZ, q) <= l_right(PU, q) + 1e-12


@settings(max_examples=300, deadline=None)
@given(dists, radius, st.sampled_from([0.5, 2.0, 3.0]))
def test_reflection_conjugation_scaling(Z, r, s):
    R = r * 3
    P = build_profile(Z)
    assert l_right(build_profile(reflect(Z)), (r, R)) == pytest.approx(l_left(P, (r, R)), abs=1e-15)
    assert l_left(build_profile(reflect(Z)), (r, R)) == pytest.approx(l_right(P, (r, R)), abs=1e-15)
    Pc = build_profile(conjugate(Z))
    assert l_right(Pc, (r, R)) == l_right(P, (r, R))
    Ps = build_profile(scale(Z, s))
    assert l_right(Ps, (s * r, s * R)) == pytest.approx(l_right(P, (r, R)) / s, rel=1e-12, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(dists, radius, radius)
def test_matches_direct_summation(Z, r, R):
    if r == R:
        return
    r, R = min(r, R), max(r, R)
    P = build_profile(Z)
    right, left = direct(Z, r, R)
    assert l_right(P, (r, R)) == pytest.approx(right, rel=1e-12, abs=0)
    assert l_left(P, (r, R)) == pytest.approx(left, rel=1e-12, abs=0)


def test_conjugation_gives_identical_bits():
    # equal-modulus points reorder under conjugation; the profile must not notice
    Z = PD.from_points([3 + 4j, -3 + 4j, 4 - 3j, -5, 5j, 1 + 2j, 2 + 1j, -2 + 1j])
    a, b = build_profile(Z), build_profile(conjugate(Z))
    r = build_profile(reflect(Z))
    for name in ("moduli", "right_hi", "right_lo", "left_hi", "left_lo"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    assert np.array_equal(r.right_hi, a.left_hi) and np.array_equal(r.left_lo, a.right_lo)
