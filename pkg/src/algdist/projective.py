"""Fubini-Study geometry of complex projective space.

Points are nonzero complex vectors in C^{t+1} (homogeneous coordinates);
linear subspaces are given by orthonormal frames, one column per dimension.
The Fubini-Study distance used throughout is

    |x, y| = sqrt(1 - |<x^, y^>|^2),

the sine of the Hermitian angle between unit representatives.  It takes
values in [0, 1], with 1 for orthogonal points.

Affine charts are unitary: the chart centered at theta sends w in C^t to the
point U (1, w), where U is a deterministic Householder reflection moving e_0
to theta (up to phase).  Unitarity makes the chart an isometry on the level
of homogeneous coordinates; the induced metric distortion between |w1 - w2|
and the Fubini-Study distance is controlled by explicit constants returned
by chart_distortion_bounds.
"""

from __future__ import annotations

import numpy as np

from ._rng import as_generator


def normalize(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=complex)
    n = np.linalg.norm(p)
    if n == 0:
        raise ValueError("zero vector is not a projective point")
    return p / n


def fs_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Fubini-Study distance sqrt(1 - |<p^, q^>|^2) in [0, 1]."""
    ph, qh = normalize(p), normalize(q)
    c = abs(np.vdot(ph, qh))
    return float(np.sqrt(max(0.0, 1.0 - min(c, 1.0) ** 2)))


def random_points(t: int, n: int, seed) -> np.ndarray:
    """n independent Fubini-Study-uniform points of P^t, rows of shape (t+1,)."""
    rng = as_generator(seed)
    z = rng.standard_normal((n, t + 1)) + 1j * rng.standard_normal((n, t + 1))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_point(t: int, seed) -> np.ndarray:
    return random_points(t, 1, seed)[0]


def orthonormal_frame(vectors) -> np.ndarray:
    """Orthonormal basis of the span of the given vectors ((t+1, k) columns)."""
    a = np.atleast_2d(np.asarray(vectors, dtype=complex))  # rows are vectors
    q, r = np.linalg.qr(a.T)
    keep = np.abs(np.diag(r)) > 1e-12 * max(1.0, np.abs(r).max())
    return q[:, keep]


def point_subspace_distance(p: np.ndarray, frame: np.ndarray) -> float:
    """FS distance from a point to the projective subspace spanned by the
    orthonormal frame columns: sqrt(1 - |frame^* p^|^2)."""
    ph = normalize(p)
    c = np.linalg.norm(frame.conj().T @ ph)
    return float(np.sqrt(max(0.0, 1.0 - min(c, 1.0) ** 2)))


def join_line_frame(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Orthonormal frame of the join of x in one P^t copy and y in another,
    inside P^{2t+1}: the span of (x^, 0) and (0, y^)."""
    xh, yh = normalize(x), normalize(y)
    t1 = len(xh)
    fr = np.zeros((2 * t1, 2), dtype=complex)
    fr[:t1, 0] = xh
    fr[t1:, 1] = yh
    return fr


def diagonal_point(theta: np.ndarray) -> np.ndarray:
    """(theta, theta)/sqrt(2), the image of theta under the diagonal
    embedding P^t -> P^{2t+1}."""
    th = normalize(theta)
    return np.concatenate([th, th]) / np.sqrt(2.0)


def _sign(z: complex) -> complex:
    return z / abs(z) if z != 0 else 1.0 + 0j


def householder_unitary(theta: np.ndarray) -> np.ndarray:
    """Deterministic unitary with U e_0 proportional to theta.

    Single complex Householder reflection: beta = -sign(theta^_0),
    v = theta^ - beta e_0, U = I - 2 v v^* / |v|^2.  Then
    U e_0 = conj(beta) theta^, the same projective point as theta.
    No factorization routine is involved, so the result is bitwise
    reproducible across runs.
    """
    th = normalize(theta)
    n = len(th)
    beta = -_sign(th[0])
    v = th.copy()
    v[0] -= beta
    nv2 = np.vdot(v, v).real
    U = np.eye(n, dtype=complex)
    if nv2 > 0:
        U -= (2.0 / nv2) * np.outer(v, v.conj())
    return U


class AffineChart:
    """Unitary affine chart of P^t centered at theta.

    w in C^t maps to the point U (1, w); theta itself maps to w = 0.
    """

    def __init__(self, theta: np.ndarray):
        self.theta = normalize(theta)
        self.dim = len(self.theta) - 1
        self.unitary = householder_unitary(self.theta)

    def from_chart(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        if w.shape != (self.dim,):
            raise ValueError(f"chart coordinate must have shape ({self.dim},)")
        z = self.unitary @ np.concatenate([[1.0 + 0j], w])
        return z / np.linalg.norm(z)

    def to_chart(self, p: np.ndarray) -> np.ndarray:
        z = self.unitary.conj().T @ normalize(p)
        if abs(z[0]) <= 1e-13:
            raise ValueError("chart domain: point is on the hyperplane at "
                             "infinity of this chart")
        return z[1:] / z[0]

    def pullback_vector(self, p: np.ndarray) -> np.ndarray:
        """U^* p^ (homogeneous coordinates of p in the rotated frame)."""
        return self.unitary.conj().T @ normalize(p)

    def center_distance(self, w: np.ndarray) -> float:
        """|theta, from_chart(w)| = |w| / sqrt(1 + |w|^2), exactly."""
        r = np.linalg.norm(w)
        return float(r / np.sqrt(1.0 + r * r))

    @staticmethod
    def chart_fs(w1: np.ndarray, w2: np.ndarray) -> float:
        """FS distance of the two chart images, from coordinates alone:
        sqrt(|w1-w2|^2 + |w1|^2|w2|^2 - |<w1,w2>|^2) normalized by
        sqrt((1+|w1|^2)(1+|w2|^2))."""
        w1 = np.asarray(w1, dtype=complex)
        w2 = np.asarray(w2, dtype=complex)
        d2 = np.linalg.norm(w1 - w2) ** 2
        gram = (np.linalg.norm(w1) * np.linalg.norm(w2)) ** 2 \
            - abs(np.vdot(w2, w1)) ** 2
        den = (1.0 + np.linalg.norm(w1) ** 2) * (1.0 + np.linalg.norm(w2) ** 2)
        return float(np.sqrt(max(0.0, d2 + gram) / den))


def chart_distortion_bounds(r: float) -> dict:
    """Distortion constants of the chart on the ball {|p, theta| <= r}.

    'contraction': FS distance <= |w1 - w2| for every pair (constant 1).
    'center': |w - 0| <= center_c * FS(p, theta) when one point is the center.
    'all_pairs': |w1 - w2| <= all_c * FS for arbitrary pairs in the ball;
    the square of the center constant, and attained (antipodal coordinate
    pairs), so no constant of the form c/sqrt(1-r^2) with c < 1/sqrt(1-r^2)
    works for all pairs.
    """
    if not 0 <= r < 1:
        raise ValueError("need 0 <= r < 1")
    return {
        "contraction": 1.0,
        "center": 1.0 / np.sqrt(1.0 - r * r),
        "all_pairs": 1.0 / (1.0 - r * r),
    }
