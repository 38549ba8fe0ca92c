import math

import numpy as np
import pytest

from etfzeros.entire import EntireFunctionModel, Power, Scalar, even_product, polynomial, zeros_of_model
from etfzeros.logchar import build_profile, l_submeasure
from etfzeros.mrcheck import (
    domination_check,
    domination_grid,
    dyadic_grid,
    growth_verdict,
    lemma_discrepancy_report,
    mr_condition_report,
    subset_tail_factor,
    tail_split,
    vanishes_on,
    witness_assemble,
)
from etfzeros.points import PointDistribution, includes, reflect, union
from etfzeros.separation import strict_separation

PD = PointDistribution
ONE = EntireFunctionModel([Scalar(1.0)])


def arith(step, count):
    return PD.from_points([k * step for k in range(1, count + 1)])


@pytest.fixture(scope="module")
def sin_model():
    return even_product(arith(math.pi, 10_000)) * EntireFunctionModel([Power(1)])


def test_dyadic_grid():
    g = dyadic_grid(1.0, 3)
    assert g == [(1, 2), (1, 4), (2, 4), (1, 8), (2, 8), (4, 8)]
    assert len(dyadic_grid(0.5, 12)) == 78


def test_growth_verdict():
    R = [2.0**b for b in range(1, 13)]
    assert growth_verdict(R, [0.3] * 12)[2] == "bounded-consistent"
    slope, resid, verdict = growth_verdict(R, [0.2 * math.log(r) for r in R])
    assert slope == pytest.approx(0.2) and resid < 1e-12 and verdict == "growth-detected"
    noisy = [0.2 * math.log(r) + (0.5 if i % 2 else -0.5) for i, r in enumerate(R)]
    assert growth_verdict(R, noisy)[2] == "inconclusive"


def test_mr_identity():
    Z = PD.from_points((np.arange(1, 3000) * 0.7 * np.exp(0.3j)).tolist())
    rep = mr_condition_report(Z, Z)
    assert all(v == 0 for v in rep.values)
    assert rep.sup_value == 0 and rep.verdict == "bounded-consistent"


def test_mr_discrimination():
    Z, W = arith(2 * math.pi, 5000), arith(math.pi, 10_000)
    rep = mr_condition_report(Z, W, r0=1, levels=12)
    assert max(rep.values) <= 1e-9
    assert rep.verdict == "bounded-consistent"
    swapped = mr_condition_report(W, Z, r0=1, levels=12)
    assert swapped.growth_slope == pytest.approx(1 / (2 * math.pi), abs=0.02)
    assert swapped.verdict == "growth-detected"


def test_mr_exclusion_and_errors():
    Z = arith(1.0, 100)
    rep = mr_condition_report(Z, Z, levels=12)
    # cells stop at 0.5 * 100
    assert max(R for _, R in rep.grid) <= 50
    with pytest.raises(ValueError, match="larger truncations"):
        mr_condition_report(arith(1.0, 10), Z)
    with pytest.raises(ValueError):
        mr_condition_report(Z, Z, r0=0)


def test_mr_reflection_and_monotonicity():
    rng = np.random.default_rng(21)
    for _ in range(20):
        Z = PD.from_points(((rng.normal(size=300) + 1j * rng.normal(size=300)) * 200).tolist())
        W = PD.from_points(((rng.normal(size=300) + 1j * rng.normal(size=300)) * 200).tolist())
        a = mr_condition_report(Z, W, r0=1, levels=8)
        b = mr_condition_report(reflect(Z), reflect(W), r0=1, levels=8)
        assert a.grid == b.grid
        assert np.allclose(a.values, b.values, rtol=0, atol=1e-12)
        # a sub-multiset never raises a grid value
        keep = PD({z: m for z, m in Z.entries if rng.random() < 0.6} | {Z.points[-1]: 1})
        assert includes(keep, Z)
        c = mr_condition_report(keep, W, r0=1, levels=8)
        assert c.grid == a.grid
        assert all(x <= y + 1e-12 for x, y in zip(c.values, a.values))


def test_chain_inequality():
    rng = np.random.default_rng(3)
    for _ in range(50):
        Ginf = PD.from_points(((rng.normal(size=200) + 1j * rng.normal(size=200)) * 50).tolist())
        G0 = PD.from_points(((rng.normal(size=5) + 1j * rng.normal(size=5)) * 3).tolist())
        p_u, p_inf, p_0 = build_profile(union(Ginf, G0)), build_profile(Ginf), build_profile(G0)
        C0 = max(p_0.l_rh(math.inf), p_0.l_lh(math.inf))
        for r, R in dyadic_grid(0.25, 10):
            l0 = l_submeasure(p_0, (r, R))
            assert l_submeasure(p_u, (r, R)) <= l_submeasure(p_inf, (r, R)) + l0 + 1e-12
            assert l0 <= C0 + 1e-12


def test_lemma_sin_model(sin_model):
    rep = lemma_discrepancy_report(sin_model, r0=1, levels=12)
    assert rep.sup_value <= 1.0
    assert rep.growth_slope <= 0.01
    assert rep.verdict == "bounded-consistent"
    inner = max(v for (r, R), v in zip(rep.grid, rep.values) if R <= 2**8)
    assert abs(inner - rep.sup_value) <= 0.05
    assert rep.work["quadratures"] == 12


@pytest.mark.parametrize("c", [2.0, 10.0, 1e5])
def test_lemma_scalar(c):
    rep = lemma_discrepancy_report(EntireFunctionModel([Scalar(c)]), r0=1, levels=12)
    # J(r, R) = (ln c / pi)(1/r - 1/R); the largest cell is (1, 2^12)
    assert rep.sup_value == pytest.approx(math.log(c) / math.pi * (1 - 2.0**-12), rel=1e-9)
    assert rep.verdict == "bounded-consistent"


def test_lemma_imaginary_zeros():
    def A(y):
        if y == 1:
            return -2 * math.log(2)
        return -math.log(abs(1 - y * y)) / y - math.log(abs((1 + y) / (1 - y)))

    F = even_product(PD({1j: 1}))
    rep = lemma_discrepancy_report(F, r0=0.5, levels=6)
    # no zeros off the axis, so every value is |J|, with J from the antiderivative
    for (r, R), v in zip(rep.grid, rep.values):
        assert v == pytest.approx(abs(A(R) - A(r)) / math.pi, abs=1e-7)
    # J(r, R) tends to a finite limit only like ln(R)/R, so the verdict needs the full default grid
    assert lemma_discrepancy_report(F).verdict == "bounded-consistent"


def test_domination_examples(sin_model):
    rng = np.random.default_rng(0)
    g = even_product(PD.from_points((rng.normal(size=8) + 1j * rng.normal(size=8)).tolist()))
    same = domination_check(g, g)
    assert same.holds and same.worst_margin == 0
    half = domination_check(EntireFunctionModel([Scalar(0.5)]) * g, g)
    assert half.holds and half.worst_margin == pytest.approx(math.log(0.5), abs=1e-12)
    # zeros at the integers: |g(iy)| ~ sinh(pi y)/(pi y) * y against sinh(y)
    g_int = even_product(arith(1.0, 10_000)) * EntireFunctionModel([Power(1)])
    assert domination_check(sin_model, g_int, y_max=50).holds
    assert not domination_check(g_int, sin_model, y_max=50).holds


def test_domination_zero_handling():
    g = even_product(PD({1j: 1}))
    assert domination_check(g, g).holds
    assert not domination_check(ONE, g).holds
    assert domination_check(ONE, g).worst_margin == math.inf
    with pytest.raises(ValueError):
        domination_check(g, g, samples=50)
    y = domination_grid(50, 400)
    assert y.min() == -50 and y.max() == 50 and 0 in y


def test_tail_split_examples():
    Z = PD.from_points([1j] + list(range(1, 11)))
    Z0, Zinf = tail_split(Z, 0.5)
    assert Z0 == PD({1j: 1}) and Zinf == PD.from_points(list(range(1, 11)))
    assert tail_split(PD.from_points([-3, 2, 7]), 0.9)[0] == PD()
    pts = [k * complex(math.cos(math.pi / 2 - 1 / k), math.sin(math.pi / 2 - 1 / k)) for k in range(1, 101)]
    Z0, Zinf = tail_split(PD.from_points(pts), math.sin(1 / 50))
    brute = sum(abs(p.real) / abs(p) < math.sin(1 / 50) for p in pts)
    assert Z0.total() == brute == 50
    assert sorted(round(abs(z)) for z in Z0.points) == list(range(51, 101))


def test_tail_split_round_trip():
    rng = np.random.default_rng(9)
    for _ in range(200):
        n = int(rng.integers(1, 40))
        Z = PD.from_points((rng.normal(size=n) + 1j * rng.normal(size=n)).tolist() + [0] * int(rng.integers(0, 2)))
        d = float(rng.uniform(0.05, 1))
        Z0, Zinf = tail_split(Z, d)
        assert union(Z0, Zinf) == Z
        if Zinf:
            assert strict_separation(Zinf) >= d


def test_witness_empty_head():
    rng = np.random.default_rng(4)
    g = even_product(PD.from_points((rng.normal(size=6) * 4 + 1j * rng.normal(size=6)).tolist()))
    f = witness_assemble(PD(), PD(), g)
    assert f.factors[0] == Scalar(0.5)
    assert domination_check(f, g).holds


def test_witness_single_root():
    f = witness_assemble(PD({1: 1}), PD(), ONE)
    assert vanishes_on(f, PD({1: 1}))
    # dense check: |f_a(iy)| stays below 1/2 everywhere, not only on the probe grid
    y = np.linspace(-60, 60, 240_001)
    assert np.max(f.log_modulus(1j * y)) <= math.log(0.5) + 1e-8
    with pytest.raises(ValueError):
        witness_assemble(PD({0: 1}), PD(), ONE)


def test_witness_near_imaginary_head():
    head = PD.from_points([2j, 0.1 + 3j, -0.05 - 5j])
    reals = arith(math.pi, 300)
    Z = union(head, union(reals, reflect(reals)))
    G0 = PD.from_points([4j, 1 + 6j])
    W_pos = union(reals, PD.from_points([(k + 0.5) * math.pi for k in range(1, 300)]))
    g = polynomial(G0) * even_product(W_pos)
    Z0, Zinf = tail_split(Z, 0.5)
    assert Z0 == head
    g_inf = subset_tail_factor(g, G0)
    assert vanishes_on(g_inf, Zinf)
    f = witness_assemble(Z0, G0, g_inf)
    assert domination_check(f, g).holds
    assert vanishes_on(f, Z)
    assert includes(Z, zeros_of_model(f, Z.max_modulus()))
