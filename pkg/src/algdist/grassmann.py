"""Grassmannian geometry: principal-angle metric, Bruhat charts, incidence
distances, and the randomized far-subspace construction.

A subspace is a GrassPoint: an orthonormal frame with one column per
dimension.  The metric is the largest principal sine,

    |W, W'| = sigma_max((I - P_W) frame(W')),

symmetric for equal dimensions, 1 when some direction of W' is orthogonal
to all of W.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import as_generator
from .cycles import LinearCycle, ZeroCycle
from .projective import normalize, point_subspace_distance


@dataclass
class GrassPoint:
    frame: np.ndarray

    def __post_init__(self):
        self.frame = np.asarray(self.frame, dtype=complex)
        if self.frame.ndim != 2:
            raise ValueError("frame must be a matrix with frame columns")
        g = self.frame.conj().T @ self.frame
        if not np.allclose(g, np.eye(self.k), atol=1e-10):
            raise ValueError("frame columns are not orthonormal")

    @property
    def n(self) -> int:
        return self.frame.shape[0]

    @property
    def k(self) -> int:
        return self.frame.shape[1]


def _frame(W) -> np.ndarray:
    return W.frame if isinstance(W, GrassPoint) else np.asarray(W, dtype=complex)


def grass_distance(W, Wp) -> float:
    """Largest principal sine between two equidimensional subspaces."""
    A, B = _frame(W), _frame(Wp)
    if A.shape != B.shape:
        raise ValueError("subspaces must share ambient space and dimension")
    r = B - A @ (A.conj().T @ B)
    s = np.linalg.svd(r, compute_uv=False)
    return float(min(1.0, s[0])) if len(s) else 0.0


def haar_subspace(n: int, k: int, seed) -> GrassPoint:
    """Haar-uniform k-dimensional subspace of C^n: QR of a complex standard
    Gaussian matrix with the R diagonal phase-fixed."""
    rng = as_generator(seed)
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return GrassPoint(q)


def complement_frame(frame) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement."""
    A = _frame(frame)
    n, k = A.shape
    q, _ = np.linalg.qr(np.hstack([A, np.eye(n, dtype=complex)]))
    return q[:, k:n]


class BruhatChart:
    """Graph coordinates on the big cell around a base subspace W0:
    u (an (n-k) x k complex matrix) maps to span(W0 + W0_perp u)."""

    def __init__(self, W0):
        self.base = _frame(W0)
        self.perp = complement_frame(self.base)
        self.n, self.k = self.base.shape

    def _as_matrix(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=complex)
        if u.ndim == 1:
            u = u.reshape(self.n - self.k, self.k)
        if u.shape != (self.n - self.k, self.k):
            raise ValueError("chart parameter has wrong shape")
        return u

    def point(self, u) -> GrassPoint:
        u = self._as_matrix(u)
        m = self.base + self.perp @ u
        q, _ = np.linalg.qr(m)
        return GrassPoint(q)

    def param(self, W) -> np.ndarray:
        """Inverse chart; errors outside the big cell."""
        F = _frame(W)
        a = self.base.conj().T @ F
        s = np.linalg.svd(a, compute_uv=False)
        if s[-1] <= 1e-10:
            raise ValueError("subspace outside the big cell of this chart")
        b = self.perp.conj().T @ F
        return b @ np.linalg.inv(a)


def contained_subspace(W, F, Fp) -> GrassPoint:
    """Given W inside F and a second subspace F' of the same dimension as F,
    produce W' inside F' with |W, W'| <= |F, F'|.

    Construction: W' = (W + F_perp) intersect F', computed as the nullspace
    of the concatenated frames."""
    Wf, Ff, Fpf = _frame(W), _frame(F), _frame(Fp)
    if Ff.shape != Fpf.shape:
        raise ValueError("F and F' must share dimensions")
    if grass_big_residual(Wf, Ff) > 1e-10:
        raise ValueError("W is not contained in F")
    n, k = Wf.shape
    big = np.hstack([Wf, complement_frame(Ff)])  # spans W + F_perp
    m = np.hstack([big, -Fpf])
    _, s, vh = np.linalg.svd(m)
    null_dim = (s <= 1e-10 * s[0]).sum() + m.shape[1] - len(s)
    if null_dim < k:
        raise ValueError("degenerate configuration: intersection too small")
    vecs = []
    for row in vh[len(vh) - null_dim:]:
        c = row[big.shape[1]:].conj()
        vecs.append(Fpf @ c)
    q, _ = np.linalg.qr(np.column_stack(vecs))
    return GrassPoint(q[:, :k])


def grass_big_residual(Wf, Ff) -> float:
    """sigma_max of the part of W sticking out of F (0 iff W inside F)."""
    r = Wf - Ff @ (Ff.conj().T @ Wf)
    s = np.linalg.svd(r, compute_uv=False)
    return float(s[0]) if len(s) else 0.0


def trfunk_direct_sum(F, W, Wt) -> GrassPoint:
    """The direct-sum map of the transfer-function lemma: send a perturbed
    copy Wt of W (inside F) to Wt + (F intersect W_perp); the image F'
    satisfies |F, F'| <= |W, Wt|."""
    Ff, Wf, Wtf = _frame(F), _frame(W), _frame(Wt)
    if grass_big_residual(Wf, Ff) > 1e-10:
        raise ValueError("W is not contained in F")
    v = Ff - Wf @ (Wf.conj().T @ Ff)  # inside F, orthogonal to W
    q, r = np.linalg.qr(v)
    keep = np.abs(np.diag(r)) > 1e-10
    V = q[:, keep]
    out, _ = np.linalg.qr(np.hstack([Wtf, V]))
    return GrassPoint(out[:, : Ff.shape[1]])


def incidence_distance(V, Z) -> float:
    """Computable incidence proxy: how far V is from meeting the cycle.

    Zero cycles: the smallest point-to-subspace sine over the support.
    Linear cycles with complementary member dimension: the smallest of the
    smallest principal sines against the members (0 iff V meets a member).
    """
    Vf = _frame(V)
    n, k = Vf.shape
    if isinstance(Z, ZeroCycle):
        return float(min(point_subspace_distance(p, Vf) for p in Z.points))
    if isinstance(Z, LinearCycle):
        if (Z.member_dim + 1) + k != n:
            raise ValueError("need complementary dimensions for linear "
                             "cycle incidence")
        best = 1.0
        for fr in Z.frames:
            sv = np.linalg.svd(Vf.conj().T @ fr, compute_uv=False)
            smax = min(1.0, sv[0]) if len(sv) else 0.0
            best = min(best, math.sqrt(max(0.0, 1.0 - smax * smax)))
        return float(best)
    raise TypeError("incidence distance supports zero and linear cycles")


def find_far_subspace(Z, l: int, seed, *, budget: int = 32, C: float = 4.0):
    """Draw Haar subspaces of codimension l until one is at incidence
    distance at least 1/(C deg Z); returns (GrassPoint, draws used)."""
    if budget < 1:
        raise ValueError("budget must be positive")
    n = (Z.ambient_dim + 1)
    k = n - l
    if k < 1:
        raise ValueError("codimension too large")
    thr = 1.0 / (C * Z.degree)
    for i in range(budget):
        ss = np.random.SeedSequence(seed, spawn_key=(i,))
        V = haar_subspace(n, k, np.random.default_rng(ss))
        if incidence_distance(V, Z) >= thr:
            return V, i + 1
    raise RuntimeError(f"no far subspace found in {budget} draws "
                       f"(threshold 1/{C} deg)")


def tube_measure(Z, eps: float, n_samples: int, seed, *, k: int | None = None):
    """Haar fraction of subspaces within incidence distance eps of the
    cycle, with binomial standard error."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    n = Z.ambient_dim + 1
    if k is None:
        k = n - (Z.member_dim + 1) if isinstance(Z, LinearCycle) else n - 1
    hits = 0
    for i in range(n_samples):
        ss = np.random.SeedSequence(seed, spawn_key=(i,))
        V = haar_subspace(n, k, np.random.default_rng(ss))
        if incidence_distance(V, Z) <= eps:
            hits += 1
    frac = hits / n_samples
    stderr = math.sqrt(max(frac * (1.0 - frac), 1.0 / n_samples) / n_samples)
    return frac, stderr


def nearest_incident_subspace(V, z, *, rng=None, steps: int = 200):
    """Local-search oracle: the (approximately) nearest subspace to V that
    passes through the point z, and its distance to V.

    Closed-form candidate (z plus the dominant directions of V off z),
    refined by random descent over frames through z."""
    Vf = _frame(V)
    n, k = Vf.shape
    zh = normalize(z)
    proj = Vf - np.outer(zh, zh.conj() @ Vf)
    u, s, _ = np.linalg.svd(proj, full_matrices=False)
    W = np.column_stack([zh] + [u[:, j] for j in range(k - 1)])
    W, _ = np.linalg.qr(W)
    best = grass_distance(Vf, W)
    rng = as_generator(rng if rng is not None else 0)
    scale = 0.1
    for _ in range(steps):
        pert = rng.standard_normal((n, k - 1)) \
            + 1j * rng.standard_normal((n, k - 1))
        cand = np.column_stack([zh, W[:, 1:] + scale * pert])
        cand, _ = np.linalg.qr(cand)
        d = grass_distance(Vf, cand)
        if d < best:
            best, W = d, cand
        else:
            scale *= 0.97
    return GrassPoint(W), best
