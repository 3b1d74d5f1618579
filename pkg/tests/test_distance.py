"""Distance pipelines against closed forms, dual routes, and finite
differences.

The derivated-distance jets are exercised three independent ways:
  * order-0 values against the exact order-zero formulas,
  * full partial derivatives against central finite differences of a plain
    float evaluation of exp D,
  * hyperplane cycles through two unrelated pipelines (subspace frames
    versus product-divisor factors), which must agree to rounding.
"""

import math

import numpy as np
import pytest

from algdist.cycles import (
    LinearCycle,
    ProductDivisor,
    ZeroCycle,
    line_covector,
    poly_eval,
)
from algdist.distance import (
    algebraic_distance,
    chart_derivative_sup,
    chart_polynomial_jet,
    derivated_distance,
    derivative_sup_reciprocal,
    divisor_pair_distance,
    harmonic,
    hypeb_compare,
    line_divisor_distance,
    line_family_derivated,
    line_log_norm_integral,
    log_norm_integral,
    main2_check,
    point_cycle_exp_jet,
    product_divisor_integral,
    restrict_zero_cycle_to_line,
)
from algdist.jets import extract_partial
from algdist.projective import (
    AffineChart,
    fs_distance,
    normalize,
    orthonormal_frame,
    random_point,
    random_points,
)


def test_integral_closed_forms():
    # integral of log|x0| over P^t is -H_t/2
    for t, blocks in ((1, 32), (2, 32)):
        e = tuple([1] + [0] * t)
        val, err = log_norm_integral({e: 1.0 + 0j}, t, blocks=blocks, seed=5)
        assert val == pytest.approx(-harmonic(t) / 2.0, abs=5 * err)
        assert err < 5e-3
    # bit-identical on reruns
    a = log_norm_integral({(1, 0): 1.0 + 0j}, 1, blocks=8, seed=9)
    b = log_norm_integral({(1, 0): 1.0 + 0j}, 1, blocks=8, seed=9)
    assert a == b


def test_product_divisor_integral_matches_mc():
    rng = np.random.default_rng(40)
    div = ProductDivisor(list(random_points(2, 2, rng)), [2, 1])
    exact = product_divisor_integral(div)
    val, err = log_norm_integral(div.poly(), 2, blocks=48, seed=3)
    assert val == pytest.approx(exact, abs=5 * err)


def test_frozen_hyperplane_example():
    # f = z0 in P^1, theta = (1,1)/sqrt(2): D = 1/2 - log(2)/2
    div = ProductDivisor([np.array([1.0, 0.0])], [1])
    th = np.array([1.0, 1.0]) / math.sqrt(2.0)
    got = algebraic_distance(th, div)
    assert got.normalization == "divisor_integral"
    assert got.value == pytest.approx(0.15342640972002733, abs=1e-12)
    # the holomorphic side of the same example
    assert chart_derivative_sup(th, div.poly(), 0) == pytest.approx(
        -0.34657359027997264, abs=1e-12)


def test_order_zero_matches_exact_formula():
    rng = np.random.default_rng(41)
    th = random_point(2, rng)
    zc = ZeroCycle(list(random_points(2, 4, rng)), [1, 2, 1, 1])
    want = sum(m * math.log(fs_distance(p, th))
               for p, m in zip(zc.points, zc.mults))
    assert algebraic_distance(th, zc).value == pytest.approx(want, abs=1e-12)
    dd = derivated_distance(th, zc, 0)
    assert dd.value(0) == pytest.approx(want, abs=1e-10)
    assert dd.normalization == "point_product"

    lc = LinearCycle([orthonormal_frame(random_points(2, 2, rng))
                      for _ in range(2)], [1, 2])
    want = float(np.dot(lc.mults, np.log(lc.distances_to(th))))
    assert derivated_distance(th, lc, 0).value(0) == pytest.approx(
        want, abs=1e-10)

    div = ProductDivisor(list(random_points(2, 3, rng)), [1, 1, 2])
    for norm in ("divisor_integral", "point_product"):
        want = algebraic_distance(th, div).value
        if norm == "point_product":
            want += product_divisor_integral(div)
        got = derivated_distance(th, div, 0, normalization=norm)
        assert got.value(0) == pytest.approx(want, abs=1e-10)


def test_polynomial_route_matches_factored_route():
    rng = np.random.default_rng(42)
    th = random_point(2, rng)
    div = ProductDivisor(list(random_points(2, 3, rng)), [1, 2, 1])
    a = derivated_distance(th, div, 3)
    b = derivated_distance(th, div.poly(), 3,
                           integral=product_divisor_integral(div))
    assert np.allclose(a.per_order, b.per_order, atol=1e-9)


def _fd_partial(f, center, index, h):
    k = next((i for i, e in enumerate(index) if e > 0), None)
    if k is None:
        return f(*center)
    lower = list(index)
    lower[k] -= 1
    up, dn = list(center), list(center)
    up[k] += h
    dn[k] -= h
    return (_fd_partial(f, up, lower, h) - _fd_partial(f, dn, lower, h)) / (2 * h)


def test_exp_distance_jet_matches_finite_differences():
    rng = np.random.default_rng(43)
    th = random_point(1, rng)
    zc = ZeroCycle(list(random_points(1, 2, rng)), [1, 2])
    chart = AffineChart(th)

    def g_plain(x, y):
        p = chart.from_chart(np.array([complex(x, y)]))
        return float(np.prod([fs_distance(p, q) ** m
                              for q, m in zip(zc.points, zc.mults)]))

    g, log_scale = point_cycle_exp_jet(th, zc, 3)
    for idx in map(tuple, g.table.exponents):
        h = 1e-4 if sum(idx) <= 2 else 2.5e-4
        want = _fd_partial(g_plain, [0.0, 0.0], idx, h)
        got = extract_partial(g, idx) * math.exp(log_scale)
        assert got == pytest.approx(want, rel=1e-4, abs=1e-4)


def test_linear_cycle_dual_route():
    # hyperplanes of P^2 as subspace frames and as product-divisor factors
    rng = np.random.default_rng(44)
    th = random_point(2, rng)
    div = ProductDivisor(list(random_points(2, 3, rng)), [1, 2, 1])
    lc = LinearCycle(div.hyperplane_frames(), list(div.mults))
    a = derivated_distance(th, lc, 3)
    b = derivated_distance(th, div, 3, normalization="point_product")
    assert np.allclose(a.per_order, b.per_order, atol=1e-10)


def test_per_order_stability_and_monotonicity():
    rng = np.random.default_rng(45)
    th = random_point(1, rng)
    zc = ZeroCycle(list(random_points(1, 3, rng)), [1, 1, 2])
    lo = derivated_distance(th, zc, 3)
    hi = derivated_distance(th, zc, 6)
    assert np.allclose(lo.per_order, hi.per_order[:4], atol=1e-10)
    vals = [hi.value(S) for S in range(7)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        hi.value(7)


def test_small_distance_products_stay_in_range():
    # 20 points at distance ~1e-6: the squared product would underflow
    # without the split-off log scale
    rng = np.random.default_rng(46)
    th = random_point(1, rng)
    chart = AffineChart(th)
    pts = [chart.from_chart(1e-6 * (rng.standard_normal(1)
                                    + 1j * rng.standard_normal(1)))
           for _ in range(20)]
    zc = ZeroCycle(pts, [1] * 20)
    want = algebraic_distance(th, zc).value
    assert want < -250.0
    got = derivated_distance(th, zc, 0).value(0)
    # both routes compute 1 - |<theta,p>|^2 with ~eps cancellation, which at
    # distance 1e-6 leaves ~1e-4 relative noise per squared factor
    assert got == pytest.approx(want, rel=1e-6)


def test_chart_polynomial_jet_evaluates_section():
    rng = np.random.default_rng(47)
    th = random_point(2, rng)
    div = ProductDivisor(list(random_points(2, 2, rng)), [1, 2])
    poly = div.poly()
    jet = chart_polynomial_jet(th, poly, 3)
    chart = AffineChart(th)
    for _ in range(5):
        w = 0.3 * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
        want = poly_eval(poly, chart.unitary @ np.concatenate([[1.0 + 0j], w]))
        got = sum(c * np.prod(w ** e)
                  for e, c in zip(jet.table.exponents, jet.coeffs))
        assert got == pytest.approx(want, abs=1e-10)


def test_line_divisor_distance_closed_form_vs_mc():
    rng = np.random.default_rng(48)
    div = ProductDivisor(list(random_points(2, 3, rng)), [1, 1, 1])
    fr = orthonormal_frame(random_points(2, 2, rng))
    closed = line_divisor_distance(fr, div)
    line_part, err = line_log_norm_integral(fr, div.poly(), blocks=48, seed=7)
    mc = line_part - product_divisor_integral(div)
    assert closed == pytest.approx(mc, abs=5 * err + 1e-12)


def test_divisor_pair_distance():
    rng = np.random.default_rng(49)
    c0, c1 = random_points(2, 2, rng)
    z0 = ProductDivisor([c0], [1])
    z1 = ProductDivisor([c1], [1])
    ang2 = 1.0 - abs(np.vdot(c1, c0)) ** 2
    assert divisor_pair_distance(z0, z1) == pytest.approx(
        0.5 * math.log(ang2), abs=1e-12)
    assert divisor_pair_distance(z0, z1) == pytest.approx(
        divisor_pair_distance(z1, z0), abs=1e-12)
    # multiplicities scale it; shared factors send it to -inf
    z0m = ProductDivisor([c0], [3])
    assert divisor_pair_distance(z0m, z1) == pytest.approx(
        3 * divisor_pair_distance(z0, z1), abs=1e-12)
    assert divisor_pair_distance(z0, z0) == -math.inf


def test_restrict_zero_cycle_to_line():
    rng = np.random.default_rng(50)
    fr = orthonormal_frame(random_points(2, 2, rng))
    us = random_points(1, 3, rng)
    zc = ZeroCycle([fr @ u for u in us], [1, 2, 1])
    small = restrict_zero_cycle_to_line(zc, fr)
    assert small.ambient_dim == 1
    for i in range(3):
        for j in range(i + 1, 3):
            assert fs_distance(small.points[i], small.points[j]) == \
                pytest.approx(fs_distance(zc.points[i], zc.points[j]),
                              abs=1e-12)
    with pytest.raises(ValueError):
        restrict_zero_cycle_to_line(
            ZeroCycle([random_point(2, rng)], [1]), fr)


def test_support_errors():
    rng = np.random.default_rng(51)
    p = random_point(2, rng)
    zc = ZeroCycle([p, random_point(2, rng)], [1, 1])
    with pytest.raises(ValueError):
        algebraic_distance(p, zc)
    with pytest.raises(ValueError):
        derivated_distance(p, zc, 1)
    div = ProductDivisor([np.array([1.0, 0, 0])], [1])
    on_div = np.array([0, 1.0, 0])
    with pytest.raises(ValueError):
        derivated_distance(on_div, div, 1)


def test_reciprocal_pipeline():
    rng = np.random.default_rng(60)
    zc = ZeroCycle(random_points(1, 4, rng), [1, 1, 2, 1])
    th = random_point(1, rng)
    rec = derivative_sup_reciprocal(th, zc, 3)
    assert rec.value(0) == pytest.approx(
        -algebraic_distance(th, zc).value, abs=1e-10)
    # monotone in the order, like the direct pipeline
    vals = [rec.value(s) for s in range(4)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
    # derivative check against finite differences of 1 / prod of distances
    chart = AffineChart(th)

    def g_recip(x, y):
        p = chart.from_chart(np.array([x + 1j * y]))
        out = 1.0
        for q, m in zip(zc.points, zc.mults):
            out /= fs_distance(p, q) ** m
        return out

    jet, log_scale = point_cycle_exp_jet(th, zc, 3)
    rj = jet.reciprocal()
    h = 1e-4
    for I in [(1, 0), (0, 1), (2, 0), (1, 1)]:
        exact = extract_partial(rj, I) * math.exp(-log_scale)
        fd = _fd_partial(g_recip, [0.0, 0.0], I, h)
        assert exact == pytest.approx(fd, rel=2e-4), I


def test_line_family_jets():
    rng = np.random.default_rng(61)
    cov = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    div = ProductDivisor(list(cov), [1, 2, 1])
    fr = orthonormal_frame(random_points(2, 2, rng))
    fam = line_family_derivated(fr, div, 3)
    assert fam.value(0) == pytest.approx(
        line_divisor_distance(fr, div), abs=1e-10)
    rec = line_family_derivated(fr, div, 3, reciprocal=True)
    assert rec.value(0) == pytest.approx(-fam.value(0), abs=1e-10)
    assert fam.value(3) >= fam.value(0) - 1e-15
    with pytest.raises(ValueError, match="frame"):
        line_family_derivated(fr[:, :1], div, 2)


def test_hypeb_compare_frozen():
    div = ProductDivisor([np.array([1.0, 0.0])], [1])
    theta = np.array([1.0, 1.0])
    rep = hypeb_compare(theta, div, 0)
    assert rep["lhs"] == pytest.approx(0.15342640972002733, abs=1e-10)
    assert rep["rhs_sup"] == pytest.approx(-0.34657359027997264, abs=1e-10)
    assert rep["c_min"] > 0
    # linear form aligned with the chart center: the chart polynomial is a
    # unimodular constant, so the derivative sup is exactly zero
    rep2 = hypeb_compare(np.array([1.0, 0.0]),
                         ProductDivisor([np.array([1.0, 0.0])], [1]), 1)
    assert rep2["rhs_sup"] == pytest.approx(0.0, abs=1e-12)
    # scale-free constant ignores section rescaling
    rng = np.random.default_rng(62)
    cov = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    div3 = ProductDivisor(list(cov), [2, 1])
    th = random_point(2, rng)
    a = hypeb_compare(th, div3, 2)
    poly_scaled = {e: 7.5 * c for e, c in div3.poly().items()}
    b = hypeb_compare(th, poly_scaled,
                      2, integral=product_divisor_integral(div3)
                      + math.log(7.5))
    assert b["c_min_scale_free"] == pytest.approx(
        a["c_min_scale_free"], abs=1e-8)
    assert b["c_min"] != pytest.approx(a["c_min"], abs=1e-3)


def test_main2_check_zero_cycle():
    rng = np.random.default_rng(63)
    th = random_point(1, rng)
    single = ZeroCycle([random_point(1, rng)], [1])
    rep = main2_check(th, single, 0)
    assert rep["lhs"] - rep["tail"] == pytest.approx(0.0, abs=1e-10)
    zc = ZeroCycle(random_points(1, 7, rng), [1] * 7)
    rep = main2_check(th, zc, 2)
    d = np.sort(zc.distances_to(th))
    assert rep["tail"] == pytest.approx(float(np.sum(np.log(d[2:]))),
                                        abs=1e-12)
    assert np.isfinite(rep["gap1"]) and np.isfinite(rep["gap2"])
    assert rep["d3"] >= rep["lhs"] - 1e-12
    with pytest.raises(ValueError, match="out of range"):
        main2_check(th, zc, 3)


def test_main2_check_sliced_divisor():
    rng = np.random.default_rng(64)
    cov = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    div = ProductDivisor(list(cov), [1, 1, 1, 1])
    th = random_point(2, rng)
    fr = orthonormal_frame(np.array([th, random_point(2, rng)]))
    rep = main2_check(th, div, 1, line=fr)
    # the slice route reproduces the ambient jet value up to the allowed
    # degree-log residual scale
    assert abs(rep["zerl_residual"]) < 4 * math.log(4 + 2) * (4 + 1)
    assert np.isfinite(rep["gap1_proof"])
    with pytest.raises(ValueError, match="through theta"):
        main2_check(th, div, 1,
                    line=orthonormal_frame(random_points(2, 2, rng)))
    with pytest.raises(ValueError, match="slicing line"):
        main2_check(th, div, 1)
