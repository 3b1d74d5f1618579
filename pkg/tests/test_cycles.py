"""Cycle types, polynomial expansion, and exact intersection cross-checks."""

import json
import math

import numpy as np
import pytest

from algdist.cycles import (
    LinearCycle,
    ProductDivisor,
    ZeroCycle,
    cycle_from_dict,
    intersect_divisor_line,
    intersect_product_divisors,
    line_covector,
    line_through,
    poly_degree,
    poly_eval,
    random_dense_poly,
    restrict_poly_to_line,
    section_log_norm,
)
from algdist.projective import (
    fs_distance,
    normalize,
    orthonormal_frame,
    point_subspace_distance,
    random_point,
    random_points,
)


def random_product_divisor(t, mults, rng):
    return ProductDivisor(list(random_points(t, len(mults), rng)), mults)


def test_serialization_round_trip_bit_exact():
    rng = np.random.default_rng(21)
    z = ZeroCycle(list(random_points(2, 3, rng)), [1, 2, 1])
    w = LinearCycle([orthonormal_frame(random_points(3, 2, rng)),
                     orthonormal_frame(random_points(3, 2, rng))], [2, 1])
    d = random_product_divisor(2, [1, 3], rng)
    for cyc in (z, w, d):
        blob = json.dumps(cyc.to_dict())
        back = cycle_from_dict(json.loads(blob))
        assert type(back) is type(cyc)
        assert back.mults == cyc.mults
        orig = (cyc.points if hasattr(cyc, "points")
                else cyc.frames if hasattr(cyc, "frames") else cyc.covectors)
        rec = (back.points if hasattr(back, "points")
               else back.frames if hasattr(back, "frames") else back.covectors)
        for a, b in zip(orig, rec):
            assert np.asarray(a).tobytes() == np.asarray(b).tobytes()
    with pytest.raises(ValueError):
        cycle_from_dict({"type": "mystery"})


def test_basic_invariants():
    rng = np.random.default_rng(22)
    z = ZeroCycle(list(random_points(2, 3, rng)), [1, 2, 1])
    assert z.degree == 4
    assert z.ambient_dim == 2
    th = random_point(2, rng)
    assert z.min_distance(th) == pytest.approx(min(z.distances_to(th)))
    w = LinearCycle([orthonormal_frame(random_points(3, 2, rng))], [2])
    assert w.member_dim == 1 and w.degree == 2
    with pytest.raises(ValueError):
        ZeroCycle([np.array([1, 0, 0])], [0])


def test_product_divisor_poly_matches_factors():
    rng = np.random.default_rng(23)
    d = random_product_divisor(2, [2, 1, 1], rng)
    p = d.poly()
    assert poly_degree(p) == 4 == d.degree
    for _ in range(10):
        z = random_point(2, rng)
        want = np.prod([np.dot(c, z) ** m
                        for c, m in zip(d.covectors, d.mults)])
        assert poly_eval(p, z) == pytest.approx(want, abs=1e-12)
    # scale invariance of the section norm
    z = random_point(2, rng)
    assert section_log_norm(p, z) == pytest.approx(
        section_log_norm(p, 5.0 * z), abs=1e-12)


def test_dual_points_and_hyperplane_frames():
    rng = np.random.default_rng(24)
    d = random_product_divisor(2, [1, 1], rng)
    th = random_point(2, rng)
    frames = d.hyperplane_frames()
    for c, n, fr in zip(d.covectors, d.dual_points(), frames):
        # |l(theta^)| is the FS distance to the hyperplane div l
        assert abs(np.dot(c, normalize(th))) == pytest.approx(
            point_subspace_distance(th, fr), abs=1e-12)
        assert np.linalg.norm(fr.conj().T @ n) <= 1e-12  # normal vs kernel
    assert d.min_distance(th) == pytest.approx(
        min(point_subspace_distance(th, fr) for fr in frames), abs=1e-12)


def test_bezout_count_for_products():
    rng = np.random.default_rng(25)
    z0 = random_product_divisor(2, [1, 1], rng)
    z1 = random_product_divisor(2, [1, 1, 1], rng)
    inter = intersect_product_divisors(z0, z1)
    assert inter.degree == z0.degree * z1.degree == 6
    p0, p1 = z0.poly(), z1.poly()
    for pt in inter.points:
        assert abs(poly_eval(p0, pt)) <= 1e-10
        assert abs(poly_eval(p1, pt)) <= 1e-10
    with pytest.raises(ValueError, match="proper"):
        shared = ProductDivisor([z0.covectors[0]], [1])
        intersect_product_divisors(z0, shared)


def test_multiplicity_through_intersection():
    rng = np.random.default_rng(26)
    z0 = ProductDivisor(list(random_points(2, 2, rng)), [2, 1])
    z1 = random_product_divisor(2, [1], rng)
    inter = intersect_product_divisors(z0, z1)
    assert sorted(inter.mults) == [1, 2]
    assert inter.degree == 3


def test_restriction_matches_evaluation():
    rng = np.random.default_rng(27)
    poly = random_dense_poly(2, 4, rng)
    fr = orthonormal_frame(random_points(2, 2, rng))
    g = restrict_poly_to_line(poly, fr)
    for _ in range(8):
        u = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        want = poly_eval(poly, fr @ u)
        got = sum(g[k] * u[0] ** (len(g) - 1 - k) * u[1] ** k
                  for k in range(len(g)))
        assert got == pytest.approx(want, abs=1e-10)


def test_line_slice_against_cross_products():
    """Cutting a hyperplane-product divisor with a line, done two ways:
    companion-matrix roots of the restricted binary form versus exact
    pairwise cross products."""
    rng = np.random.default_rng(28)
    for _ in range(10):
        div = random_product_divisor(2, [1, 2, 1], rng)
        fr = orthonormal_frame(random_points(2, 2, rng))
        got = intersect_divisor_line(div.poly(), fr)
        assert got.degree == div.degree
        k = line_covector(fr)
        exact = ZeroCycle(
            [np.cross(c, k) for c in div.covectors], div.mults)
        matched = set()
        for p, m in zip(got.points, got.mults):
            # sine distances resolve membership only to about sqrt(eps)
            assert point_subspace_distance(p, fr) <= 1e-6
            hits = [j for j, (q, mm) in
                    enumerate(zip(exact.points, exact.mults))
                    if fs_distance(p, q) <= 1e-7 and mm == m
                    and j not in matched]
            assert hits, "clustered root does not match exact intersection"
            matched.add(hits[0])


def test_line_slice_root_at_chart_corner():
    # force the frame's first column onto the divisor: the binary form then
    # loses leading coefficients and the corner point must be recovered
    rng = np.random.default_rng(29)
    div = random_product_divisor(2, [1, 1], rng)
    c = div.covectors[0]
    v0 = normalize(np.cross(c, random_point(2, rng)))
    q, _ = np.linalg.qr(np.column_stack([v0, random_point(2, rng)]))
    got = intersect_divisor_line(div.poly(), q)
    assert got.degree == 2
    assert min(fs_distance(p, v0) for p in got.points) <= 1e-8


def test_line_slice_multiplicity_clustering():
    rng = np.random.default_rng(30)
    div = ProductDivisor(list(random_points(2, 2, rng)), [2, 1])
    fr = orthonormal_frame(random_points(2, 2, rng))
    got = intersect_divisor_line(div.poly(), fr)
    assert sorted(got.mults) == [1, 2]


def test_line_helpers():
    rng = np.random.default_rng(31)
    a, b = random_point(2, rng), random_point(2, rng)
    fr = line_through(a, b)
    assert point_subspace_distance(a, fr) <= 1e-7
    assert point_subspace_distance(b, fr) <= 1e-7
    k = line_covector(fr)
    assert abs(np.dot(k, normalize(a))) <= 1e-10
    assert abs(np.dot(k, normalize(b))) <= 1e-10
    with pytest.raises(ValueError):
        line_through(a, 2.0 * a)


def test_dense_poly_shape():
    rng = np.random.default_rng(32)
    p = random_dense_poly(2, 3, rng)
    assert len(p) == math.comb(3 + 2, 2)
    assert poly_degree(p) == 3
    assert all(sum(e) == 3 for e in p)
