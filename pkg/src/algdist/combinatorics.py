"""Merge-path combinatorics for the distances of two intersection cycles.

All functions work on two ascending lists of distances s0, s1 in (0, 1]
(the sorted Fubini-Study distances of theta to the sliced intersection
points of two cycles).  The joint distance of a pair is the root mean
square of the two single distances (the distance of the diagonal point to
the join line, which is what makes the cut set a staircase).

The merge path f(k) walks the grid from (0,0) to (n0,n1), advancing at step
k on the side holding the smallest unconsumed distance.  i_k marks the side
that did NOT advance; the point that arrived at step k is the "new point"
z^{1-i_k} with index f_{1-i_k}(k).  The sum of log joint distances over all
pairs reorders exactly into a sum over arrival steps: each pair is counted
at the arrival of its earlier member, against all later opposite-side
points.  reordering_residual checks that identity to rounding; the
alternative index convention (advancing side marked instead) breaks it and
is kept only for demonstration.

Ties anywhere in the merged order (or at the cut-set boundary) make the
path ambiguous and raise; callers redraw the configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .projective import (
    diagonal_point,
    fs_distance,
    join_line_frame,
    normalize,
    point_subspace_distance,
)

TIE_TOL = 1e-10


def joint_distance(a: float, b: float) -> float:
    """Distance of the diagonal point to the join of two points with the
    given single distances: sqrt((a^2 + b^2) / 2)."""
    return math.sqrt((a * a + b * b) / 2.0)


def _check_sorted(s, name):
    s = [float(x) for x in s]
    if not s:
        raise ValueError(f"{name} must be nonempty")
    if any(not 0.0 < x <= 1.0 for x in s):
        raise ValueError(f"{name} entries must lie in (0, 1]")
    if any(b - a < 0 for a, b in zip(s, s[1:])):
        raise ValueError(f"{name} must be ascending")
    return s


@dataclass
class MergePath:
    s0: list
    s1: list
    f: list          # f[k] = (nu0, nu1) for k = 0..n0+n1
    not_increased: list  # i_k for k = 1..n0+n1 (index k-1)

    @property
    def length(self) -> int:
        return len(self.s0) + len(self.s1)

    def side(self, i: int) -> list:
        return self.s0 if i == 0 else self.s1

    def new_point(self, k: int, convention: str = "resolved"):
        """(side, 1-based index) of the point arriving at step k."""
        ik = self.not_increased[k - 1]
        if convention == "resolved":
            side = 1 - ik
            return side, self.f[k][side]
        if convention == "literal":
            # marking the side that advanced instead puts the "new point"
            # on the stale side, at its stale count
            side = ik
            return side, self.f[k][side]
        raise ValueError(f"unknown convention {convention!r}")


def merge_path(s0, s1) -> MergePath:
    s0 = _check_sorted(s0, "s0")
    s1 = _check_sorted(s1, "s1")
    merged = sorted(s0 + s1)
    if any(b - a <= TIE_TOL for a, b in zip(merged, merged[1:])):
        raise ValueError("tie: distances closer than the tie tolerance")
    f = [(0, 0)]
    not_inc = []
    a = b = 0
    while a < len(s0) or b < len(s1):
        take0 = b >= len(s1) or (a < len(s0) and s0[a] < s1[b])
        if take0:
            a += 1
            not_inc.append(1)
        else:
            b += 1
            not_inc.append(0)
        f.append((a, b))
    return MergePath(s0, s1, f, not_inc)


def joint_matrix(s0, s1) -> np.ndarray:
    g0 = np.asarray(s0)[:, None] ** 2
    g1 = np.asarray(s1)[None, :] ** 2
    return np.sqrt((g0 + g1) / 2.0)


def cut_set(s0, s1, S: int, joint=None) -> set:
    """The S pairs (i, j), 1-based, with the smallest joint distances.

    S = n0*n1 saturates the grid and is rejected; ties across the cut
    boundary are rejected (redraw)."""
    n0, n1 = len(s0), len(s1)
    if not 0 <= S <= n0 * n1:
        raise ValueError("S out of range")
    if S == n0 * n1:
        raise ValueError("cut set saturates grid")
    if S == 0:
        return set()
    jm = joint_matrix(s0, s1) if joint is None else np.asarray(joint)
    flat = np.sort(jm.ravel())
    thr = flat[S - 1]
    if flat[S] - thr <= TIE_TOL:
        raise ValueError("tie: cut set boundary is ambiguous")
    out = {(i + 1, j + 1) for i in range(n0) for j in range(n1)
           if jm[i, j] <= thr}
    assert len(out) == S
    return out


def is_staircase(M: set, n0: int, n1: int) -> bool:
    """Downward closure in both indices (the shape the join inequality
    forces on any smallest-S cut set)."""
    for (i, j) in M:
        if i > 1 and (i - 1, j) not in M:
            return False
        if j > 1 and (i, j - 1) not in M:
            return False
    return True


def h_function(path: MergePath, M: set, S: int) -> list:
    """h_S(k): how many of the pairs counted at step k fall into the cut
    set (the staircase makes them the leading run of the row/column)."""
    out = []
    for k in range(1, path.length + 1):
        side, idx = path.new_point(k)
        other = 1 - side
        n_other = len(path.side(other))
        ell = 1
        while ell <= n_other:
            pair = (idx, ell) if side == 0 else (ell, idx)
            if pair not in M:
                break
            ell += 1
        out.append(max(0, ell - path.f[k][other] - 1))
    return out


def k0_of(h: list) -> int:
    """Least k such that h vanishes from k on (1 if h is identically 0)."""
    k0 = len(h) + 1
    for k in range(len(h), 0, -1):
        if h[k - 1] != 0:
            break
        k0 = k
    return k0


def pair_log_sum(s0, s1, joint=None) -> float:
    jm = joint_matrix(s0, s1) if joint is None else np.asarray(joint)
    return float(np.sum(np.log(jm)))


def _tail_log(s, nu: int) -> float:
    return float(np.sum(np.log(np.asarray(s[nu:])))) if nu < len(s) else 0.0


def _joint_entry(jm, side, idx, l):
    """jm entry for the pair (new point on `side` at 1-based idx, opposite
    point at 1-based l)."""
    return jm[idx - 1, l - 1] if side == 0 else jm[l - 1, idx - 1]


def reordering_residual(s0, s1, convention: str = "resolved",
                        joint=None) -> float:
    """|full pair sum - arrival-ordered sum|; zero (to rounding) for the
    resolved convention, order 1 for the literal reading."""
    path = merge_path(s0, s1)
    jm = joint_matrix(s0, s1) if joint is None else np.asarray(joint)
    lhs = pair_log_sum(s0, s1, jm)
    rhs = 0.0
    for k in range(1, path.length + 1):
        side, idx = path.new_point(k, convention)
        other = 1 - side
        for l in range(path.f[k][other] + 1, len(path.side(other)) + 1):
            rhs += math.log(_joint_entry(jm, side, idx, l))
    return abs(lhs - rhs)


def comb_bounds(s0, s1, S: int, K: int | None = None, k: int | None = None,
                joint=None):
    """All left/right sides of the five path inequalities, as a dict.

    Keys: reordering (residual), c11/c12 (full-pair sums vs step and corner
    bounds at K), c21/c22/c23 (cut-complement sums at k >= k0).  The caller
    asserts lhs <= rhs; this routine only assembles the numbers, plus the
    path data (f, h, k0, nu) for reporting.
    """
    path = merge_path(s0, s1)
    jm = joint_matrix(s0, s1) if joint is None else np.asarray(joint)
    n = path.length
    K = n if K is None else K
    if not 1 <= K <= n:
        raise ValueError("K out of range")
    M = cut_set(s0, s1, S, jm)
    if not is_staircase(M, len(s0), len(s1)):
        raise AssertionError("cut set is not a staircase")
    h = h_function(path, M, S)
    k0 = k0_of(h)
    k = k0 if k is None else k
    if not k0 <= k <= n:
        raise ValueError("k must be >= k0")
    nu = path.f[k0]
    nub = path.f[k]

    lhs_all = pair_log_sum(s0, s1, jm)
    # comb1.1: arrival-tail bound cut at K
    rhs_c11 = 0.0
    for kk in range(1, K + 1):
        side, idx = path.new_point(kk)
        other = 1 - side
        rhs_c11 += _tail_log(path.side(other), path.f[kk][other])
    # comb1.2: corner bound at f(K)
    nK = path.f[K]
    rhs_c12 = nK[1] * _tail_log(s0, nK[0]) + nK[0] * _tail_log(s1, nK[1])

    lhs_cut = float(sum(
        math.log(jm[i - 1, j - 1])
        for i in range(1, len(s0) + 1) for j in range(1, len(s1) + 1)
        if (i, j) not in M))
    # comb2.1: same arrival bound, steps k0..K, h already zero there
    rhs_c21 = 0.0
    for kk in range(k0, K + 1):
        side, idx = path.new_point(kk)
        other = 1 - side
        rhs_c21 += _tail_log(path.side(other),
                             path.f[kk][other] - h[kk - 1])
    # comb2.2: corner form with the k0 offset
    rhs_c22 = (nub[1] - nu[1]) * _tail_log(s0, nub[0]) \
        + (nub[0] - nu[0]) * _tail_log(s1, nub[1])
    # comb2.3: tails from nu, paid for by the global minimum distance
    min_dist = min(s0[0], s1[0])
    lhs_c23 = (nub[0] - nu[0]) * (nub[1] - nu[1]) * math.log(min_dist) \
        + lhs_cut
    rhs_c23 = (nub[1] - nu[1]) * _tail_log(s0, nu[0]) \
        + (nub[0] - nu[0]) * _tail_log(s1, nu[1])

    return {
        "path": path,
        "cut_set": M,
        "h": h,
        "k0": k0,
        "nu": nu,
        "nu_bar": nub,
        "reordering_residual": reordering_residual(s0, s1, joint=jm),
        "c11": (lhs_all, rhs_c11),
        "c12": (lhs_all, rhs_c12),
        "c21": (lhs_cut, rhs_c21),
        "c22": (lhs_cut, rhs_c22),
        "c23": (lhs_c23, rhs_c23),
    }


# ---------------------------------------------------------------------------
# cycle-level layer: profiles built from actual point configurations

@dataclass
class DistanceProfile:
    """Sorted single distances of theta to two point sets, plus the matrix
    of geometric joint distances (diagonal point to join line), ordered to
    match the sorted lists."""
    d0: list
    d1: list
    joint: np.ndarray


@dataclass
class CutSet:
    M: set
    nu: tuple
    k0: int
    h: list
    S: int


def _expanded_points(z):
    if hasattr(z, "points") and hasattr(z, "mults"):
        pts = [p for p, m in zip(z.points, z.mults) for _ in range(int(m))]
        return np.asarray(pts)
    a = np.asarray(z, dtype=complex)
    if a.ndim == 1:
        a = a[None, :]
    return a


def build_profile(z0, z1, theta) -> DistanceProfile:
    """Distance data of theta against two point sets (cycles of dimension
    zero, or raw coordinate rows).

    Rejects non-generic configurations: any two of the n0 + n1 + n0*n1
    stored values closer than the tie tolerance.  Checks per entry that the
    joint distance is bracketed by the two single distances.
    """
    theta = normalize(theta)
    p0 = _expanded_points(z0)
    p1 = _expanded_points(z1)
    d0 = np.array([fs_distance(theta, p) for p in p0])
    d1 = np.array([fs_distance(theta, p) for p in p1])
    o0 = np.argsort(d0)
    o1 = np.argsort(d1)
    p0, d0 = p0[o0], d0[o0]
    p1, d1 = p1[o1], d1[o1]
    if np.any(d0 <= 0) or np.any(d1 <= 0):
        raise ValueError("non-generic configuration: theta on a support")
    dd = diagonal_point(theta)
    joint = np.empty((len(p0), len(p1)))
    for i, x in enumerate(p0):
        for j, y in enumerate(p1):
            joint[i, j] = point_subspace_distance(dd, join_line_frame(x, y))
            lo = min(d0[i], d1[j]) - 1e-10
            hi = max(d0[i], d1[j]) + 1e-10
            if not lo <= joint[i, j] <= hi:
                raise AssertionError("joint distance escapes its bracket")
    allv = np.sort(np.concatenate([d0, d1, joint.ravel()]))
    if np.min(np.diff(allv)) <= TIE_TOL:
        raise ValueError("non-generic configuration: tie detected")
    return DistanceProfile(list(d0), list(d1), joint)


def build_path(profile: DistanceProfile) -> MergePath:
    return merge_path(profile.d0, profile.d1)


def build_cutset(profile: DistanceProfile, path: MergePath, S: int) -> CutSet:
    M = cut_set(profile.d0, profile.d1, S, profile.joint)
    if not is_staircase(M, len(profile.d0), len(profile.d1)):
        raise AssertionError("cut set is not a staircase")
    h = h_function(path, M, S)
    k0 = k0_of(h)
    return CutSet(M, path.f[k0], k0, h, S)


_WHICH = {"comb1.1": "c11", "comb1.2": "c12", "comb2.1": "c21",
          "comb2.2": "c22", "comb2.3": "c23"}


def verify_comb(profile: DistanceProfile, path: MergePath, cutset: CutSet,
                which: str, K: int | None = None, k: int | None = None,
                slack: float = 1e-9) -> dict:
    """Evaluate one of the five pair-sum inequalities on a profile.

    Returns lhs, rhs, the gap rhs - lhs, and whether lhs <= rhs + slack.
    """
    if which not in _WHICH:
        raise ValueError(f"unknown inequality {which!r}")
    bounds = comb_bounds(profile.d0, profile.d1, cutset.S, K=K, k=k,
                         joint=profile.joint)
    lhs, rhs = bounds[_WHICH[which]]
    return {
        "which": which,
        "lhs": lhs,
        "rhs": rhs,
        "gap": rhs - lhs,
        "holds": bool(lhs <= rhs + slack),
        "k0": bounds["k0"],
        "nu": bounds["nu"],
        "nu_bar": bounds["nu_bar"],
    }
