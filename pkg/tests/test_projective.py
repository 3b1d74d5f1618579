"""Fubini-Study geometry against closed forms and brute-force minimization."""

import numpy as np
import pytest

from algdist.projective import (
    AffineChart,
    chart_distortion_bounds,
    diagonal_point,
    fs_distance,
    householder_unitary,
    join_line_frame,
    normalize,
    orthonormal_frame,
    point_subspace_distance,
    random_point,
    random_points,
)


def test_frozen_values():
    e0 = np.array([1, 0, 0], dtype=complex)
    e1 = np.array([0, 1, 0], dtype=complex)
    assert fs_distance(e0, e1) == pytest.approx(1.0, abs=1e-15)
    assert fs_distance(e0, e0 + e1) == pytest.approx(0.7071067811865476, abs=1e-15)
    assert fs_distance(e0, 3j * e0) == pytest.approx(0.0, abs=1e-15)


def test_fs_properties():
    rng = np.random.default_rng(11)
    for _ in range(50):
        p, q, r = (random_point(2, rng) for _ in range(3))
        d = fs_distance(p, q)
        assert 0.0 <= d <= 1.0
        assert d == pytest.approx(fs_distance(q, p), abs=1e-15)
        # invariance under phases and a common unitary
        U = np.linalg.qr(rng.standard_normal((3, 3))
                         + 1j * rng.standard_normal((3, 3)))[0]
        assert fs_distance(U @ p, U @ q) == pytest.approx(d, abs=1e-12)
        assert fs_distance(np.exp(0.7j) * p, q) == pytest.approx(d, abs=1e-14)
        # sine-metric triangle inequality via angles
        ang = lambda a, b: np.arcsin(min(1.0, fs_distance(a, b)))
        assert ang(p, q) <= ang(p, r) + ang(r, q) + 1e-10


def test_householder_deterministic_and_unitary():
    rng = np.random.default_rng(3)
    for _ in range(20):
        th = random_point(3, rng)
        U = householder_unitary(th)
        assert np.allclose(U.conj().T @ U, np.eye(4), atol=1e-14)
        # fs resolves equality only to sqrt(eps): 1 - |<p,q>|^2 cancels
        assert fs_distance(U[:, 0], th) <= 1e-7
        U2 = householder_unitary(th)
        assert U.tobytes() == U2.tobytes()
    # no special-casing near e0 or -e0
    for sgn in (1.0, -1.0):
        th = np.array([sgn, 1e-9, 0], dtype=complex)
        U = householder_unitary(th)
        assert np.allclose(U.conj().T @ U, np.eye(3), atol=1e-14)
        assert fs_distance(U[:, 0], th) <= 1e-7


def test_chart_round_trip():
    rng = np.random.default_rng(5)
    for _ in range(25):
        th = random_point(2, rng)
        chart = AffineChart(th)
        w = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        assert np.allclose(chart.to_chart(chart.from_chart(w)), w, atol=1e-12)
        p = random_point(2, rng)
        assert fs_distance(chart.from_chart(chart.to_chart(p)), p) <= 1e-12
        assert np.linalg.norm(chart.to_chart(th)) <= 1e-13


def test_chart_fs_identity_and_center_distance():
    rng = np.random.default_rng(6)
    for _ in range(25):
        chart = AffineChart(random_point(3, rng))
        w1 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        w2 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        direct = fs_distance(chart.from_chart(w1), chart.from_chart(w2))
        assert AffineChart.chart_fs(w1, w2) == pytest.approx(direct, abs=1e-12)
        assert chart.center_distance(w1) == pytest.approx(
            fs_distance(chart.theta, chart.from_chart(w1)), abs=1e-12)


def test_chart_domain_error():
    chart = AffineChart(np.array([1, 0], dtype=complex))
    with pytest.raises(ValueError, match="chart domain"):
        chart.to_chart(np.array([0, 1], dtype=complex))


def test_chart_distortion_constants():
    r = 0.9
    b = chart_distortion_bounds(r)
    rng = np.random.default_rng(8)
    chart = AffineChart(random_point(2, rng))
    rmax = r / np.sqrt(1 - r * r)  # chart radius of the FS ball
    seen_center, seen_all = 0.0, 0.0
    for _ in range(300):
        w1 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        w2 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        w1 *= rng.uniform(0, rmax) / np.linalg.norm(w1)
        w2 *= rng.uniform(0, rmax) / np.linalg.norm(w2)
        d = AffineChart.chart_fs(w1, w2)
        gap = np.linalg.norm(w1 - w2)
        assert d <= gap + 1e-12                      # contraction, c = 1
        assert gap <= b["all_pairs"] * d + 1e-12     # expansion, all pairs
        if d > 0:
            seen_all = max(seen_all, gap / d)
        dc = AffineChart.chart_fs(w1, np.zeros(2))
        assert np.linalg.norm(w1) <= b["center"] * dc + 1e-12
        if dc > 0:
            seen_center = max(seen_center, np.linalg.norm(w1) / dc)
    # the center constant really is attained (up to sampling slack) ...
    assert seen_center >= 0.9 * b["center"]
    # ... and genuinely does NOT cover arbitrary pairs: antipodal coordinates
    u = np.array([rmax, 0], dtype=complex)
    ratio = (2 * rmax) / AffineChart.chart_fs(u, -u)
    assert ratio == pytest.approx(b["all_pairs"], rel=1e-12)
    assert ratio > 2.2 * b["center"]
    assert seen_all <= b["all_pairs"] + 1e-9


def test_point_subspace_distance():
    rng = np.random.default_rng(9)
    fr = orthonormal_frame([np.array([1, 0, 0, 0]), np.array([0, 1, 0, 0])])
    assert point_subspace_distance(np.array([0, 0, 1, 0]), fr) == pytest.approx(1.0)
    assert point_subspace_distance(np.array([2, 3j, 0, 0]), fr) <= 1e-12
    # distance to a member of the span is 0; to a random point it is the
    # minimum FS distance over the subspace (checked by sampling)
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    d = point_subspace_distance(v, fr)
    best = min(
        fs_distance(v, fr @ c)
        for c in (rng.standard_normal((500, 2)) + 1j * rng.standard_normal((500, 2)))
    )
    assert d <= best + 1e-12
    assert best <= d + 1e-2  # sampled minimum approaches it from above


def test_join_distance_closed_form():
    """|x#y, (theta,theta)/sqrt(2)| equals the root mean square of
    |x,theta| and |y,theta|; in particular it sits between min and max."""
    rng = np.random.default_rng(10)
    for t in (1, 2, 3):
        for _ in range(20):
            x, y, th = (random_point(t, rng) for _ in range(3))
            sx, sy = fs_distance(x, th), fs_distance(y, th)
            rms = np.sqrt((sx * sx + sy * sy) / 2.0)
            got = point_subspace_distance(diagonal_point(th),
                                          join_line_frame(x, y))
            assert got == pytest.approx(rms, abs=1e-12)
            assert min(sx, sy) - 1e-12 <= got <= max(sx, sy) + 1e-12


def test_join_distance_brute_force():
    # grid-minimize FS distance from the diagonal point over the join line
    rng = np.random.default_rng(12)
    x, y, th = (random_point(2, rng) for _ in range(3))
    fr = join_line_frame(x, y)
    dp = diagonal_point(th)
    closed = point_subspace_distance(dp, fr)
    mus = np.linspace(0, np.pi / 2, 301)
    psis = np.linspace(0, 2 * np.pi, 601)
    best = 1.0
    for mu in mus:
        pts = (np.cos(mu) * fr[:, 0])[None, :] \
            + np.outer(np.sin(mu) * np.exp(1j * psis), fr[:, 1])
        c = np.abs(pts @ dp.conj())
        best = min(best, np.sqrt(max(0.0, 1.0 - c.max() ** 2)))
    assert best == pytest.approx(closed, abs=5e-4)


def test_random_point_moments():
    # E |x, theta|^2 = t/(t+1) for uniform x
    for t, want in ((2, 2 / 3), (4, 4 / 5)):
        pts = random_points(t, 50_000, seed=100 + t)
        th = np.zeros(t + 1, dtype=complex)
        th[0] = 1.0
        s2 = 1.0 - np.abs(pts @ th.conj()) ** 2
        err = 5 * s2.std() / np.sqrt(len(s2))
        assert s2.mean() == pytest.approx(want, abs=err)


def test_normalize_rejects_zero():
    with pytest.raises(ValueError):
        normalize(np.zeros(3))
