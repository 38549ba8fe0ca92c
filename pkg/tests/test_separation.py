import math

import numpy as np
import pytest

from etfzeros.points import PointDistribution, conjugate, reflect, scale
from etfzeros.separation import angle_ratios, asymptotic_separation, strict_separation

PD = PointDistribution


def test_strict_examples():
    diag = PD.from_points([k * (1 + 1j) / math.sqrt(2) for k in range(1, 51)])
    assert strict_separation(diag) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert strict_separation(PD.from_points([1, 1j])) == 0
    assert strict_separation(PD.from_points([k * math.pi for k in range(1, 32)])) == 1
    assert strict_separation(PD({0: 3, 2: 1})) == 1
    with pytest.raises(ValueError):
        strict_separation(PD({0: 1}))


def test_imaginary_head():
    Z = PD.from_points([1j, 2j] + list(range(1, 101)))
    rep = asymptotic_separation(Z, 0.5)
    assert rep.tail_liminf_estimate == 1
    assert sorted(rep.violating_points, key=abs) == [1j, 2j]
    assert rep.d_strict == 0
    assert rep.consistent


def test_decaying_angles():
    pts = [k * complex(math.cos(math.pi / 2 - 1 / k), math.sin(math.pi / 2 - 1 / k)) for k in range(1, 201)]
    Z = PD.from_points(pts)
    rep = asymptotic_separation(Z, 0.25)
    # brute force over the 50 outermost points k = 151..200
    tail = [abs(p.real) / abs(p) for p in pts[150:]]
    assert rep.tail_size == 50
    assert rep.tail_liminf_estimate == pytest.approx(min(tail), rel=1e-12)
    assert rep.tail_liminf_estimate == pytest.approx(math.sin(1 / 200), rel=1e-9)
    assert rep.decaying
    assert rep.consistent


def test_constant_angle():
    Z = PD.from_points([k * (1 + 1j) for k in range(1, 51)])
    for frac in (1.0, 0.5, 0.25, 0.125):
        rep = asymptotic_separation(Z, frac)
        assert rep.tail_liminf_estimate == pytest.approx(1 / math.sqrt(2), rel=1e-15)
        assert rep.violating_points == []
        assert not rep.decaying


def test_ties_in_modulus_join_the_tail():
    Z = PD.from_points([1, 2, 3, 3j, -3])
    rep = asymptotic_separation(Z, 0.2)
    assert rep.tail_size == 3
    assert rep.tail_liminf_estimate == 0


def test_errors():
    with pytest.raises(ValueError):
        asymptotic_separation(PD({1: 1}), 0.5)
    with pytest.raises(ValueError):
        asymptotic_separation(PD.from_points([1, 2]), 0)


def test_invariances_and_ordering():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = rng.integers(2, 30)
        pts = (rng.normal(size=n) + 1j * rng.normal(size=n)).tolist()
        Z = PD.from_points(pts)
        d = strict_separation(Z)
        assert strict_separation(reflect(Z)) == d
        assert strict_separation(conjugate(Z)) == d
        assert strict_separation(scale(Z, 3.0)) == pytest.approx(d, rel=1e-12, abs=1e-15)
        for frac in (1.0, 0.5, 0.25, 0.125):
            rep = asymptotic_separation(Z, frac)
            assert 0 <= rep.d_strict <= rep.tail_liminf_estimate <= 1


def test_pointwise_equivalence_of_forms():
    rng = np.random.default_rng(5)
    z = rng.normal(size=2000) + 1j * rng.normal(size=2000)
    re, im = angle_ratios(z)
    assert np.allclose(re**2 + im**2, 1, atol=1e-12)
    for c in (0.1, 0.3, 0.7):
        lhs = re > c
        rhs = im < math.sqrt(1 - c * c)
        # disagreement only inside rounding distance of the threshold
        near = np.abs(re - c) < 1e-12
        assert np.all((lhs == rhs) | near)
