"""Effective cycles of projective space and operations on them.

Three concrete cycle types cover everything the verification sweeps need:

  ZeroCycle       weighted points (pure dimension 0),
  LinearCycle     weighted projective subspaces of a fixed dimension,
  ProductDivisor  a divisor that is a weighted product of hyperplanes.

General divisors are handled as homogeneous polynomials in sparse dict form
{exponent tuple: complex coefficient}.  Product divisors expand to such
polynomials exactly (convolution of linear factors), which gives every
divisor computation a second, independent route: structured factor data
versus raw polynomial coefficients.

Intersections implemented here are the ones with exact small-scale answers:
hyperplane-product divisors in P^2 intersect in pairwise line crossings
(cross products), and any divisor cuts a projective line in the roots of a
binary form (companion-matrix roots, with multiplicity read off by root
clustering).  The two routes are cross-checked in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .projective import (
    fs_distance,
    householder_unitary,
    normalize,
    orthonormal_frame,
    point_subspace_distance,
)

# Double eigenvalues of a companion matrix split by about sqrt(eps) times a
# conditioning factor (observed up to ~1.5e-7 already at degree 4), so the
# clustering tolerance sits at 1e-6, with a separation guard below that
# rejects configurations where clustering would be ambiguous.
ROOT_CLUSTER_TOL = 1e-6


def _c2pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _pair2c(p) -> complex:
    return complex(p[0], p[1])


def _vec_to_lists(v: np.ndarray) -> list[list[float]]:
    return [_c2pair(z) for z in np.asarray(v, dtype=complex)]


def _lists_to_vec(ls) -> np.ndarray:
    return np.array([_pair2c(p) for p in ls], dtype=complex)


@dataclass
class ZeroCycle:
    """Sum of points with positive integer multiplicities."""

    points: list  # homogeneous coordinate vectors
    mults: list

    def __post_init__(self):
        if len(self.points) != len(self.mults):
            raise ValueError("points and multiplicities must align")
        self.points = [normalize(p) for p in self.points]
        self.mults = [int(m) for m in self.mults]
        if any(m <= 0 for m in self.mults):
            raise ValueError("multiplicities must be positive")

    @property
    def degree(self) -> int:
        return sum(self.mults)

    @property
    def ambient_dim(self) -> int:
        return len(self.points[0]) - 1

    def distances_to(self, theta: np.ndarray) -> np.ndarray:
        return np.array([fs_distance(p, theta) for p in self.points])

    def min_distance(self, theta: np.ndarray) -> float:
        return float(self.distances_to(theta).min())

    def to_dict(self) -> dict:
        return {
            "type": "zero_cycle",
            "points": [_vec_to_lists(p) for p in self.points],
            "mults": list(self.mults),
        }

    @staticmethod
    def from_dict(d: dict) -> "ZeroCycle":
        if d.get("type") != "zero_cycle":
            raise ValueError("not a zero cycle payload")
        return ZeroCycle([_lists_to_vec(p) for p in d["points"]], d["mults"])


@dataclass
class LinearCycle:
    """Sum of projective subspaces of one fixed dimension, with weights.

    Each member is an orthonormal frame, columns spanning the subspace."""

    frames: list
    mults: list

    def __post_init__(self):
        if len(self.frames) != len(self.mults):
            raise ValueError("frames and multiplicities must align")
        self.frames = [np.asarray(f, dtype=complex) for f in self.frames]
        k = self.frames[0].shape
        if any(f.shape != k for f in self.frames):
            raise ValueError("members must share one dimension")
        self.mults = [int(m) for m in self.mults]

    @property
    def degree(self) -> int:
        return sum(self.mults)

    @property
    def ambient_dim(self) -> int:
        return self.frames[0].shape[0] - 1

    @property
    def member_dim(self) -> int:
        """Projective dimension of each member."""
        return self.frames[0].shape[1] - 1

    def distances_to(self, theta: np.ndarray) -> np.ndarray:
        return np.array(
            [point_subspace_distance(theta, f) for f in self.frames]
        )

    def min_distance(self, theta: np.ndarray) -> float:
        return float(self.distances_to(theta).min())

    def to_dict(self) -> dict:
        return {
            "type": "linear_cycle",
            "frames": [[_vec_to_lists(col) for col in f.T] for f in self.frames],
            "mults": list(self.mults),
        }

    @staticmethod
    def from_dict(d: dict) -> "LinearCycle":
        if d.get("type") != "linear_cycle":
            raise ValueError("not a linear cycle payload")
        frames = [
            np.column_stack([_lists_to_vec(col) for col in f])
            for f in d["frames"]
        ]
        return LinearCycle(frames, d["mults"])


@dataclass
class ProductDivisor:
    """Divisor of a product of linear forms: div prod_a l_a^{m_a}.

    Covectors act by l(z) = sum_k l_k z_k (no conjugation)."""

    covectors: list
    mults: list

    def __post_init__(self):
        if len(self.covectors) != len(self.mults):
            raise ValueError("covectors and multiplicities must align")
        self.covectors = [normalize(c) for c in self.covectors]
        self.mults = [int(m) for m in self.mults]

    @property
    def degree(self) -> int:
        return sum(self.mults)

    @property
    def ambient_dim(self) -> int:
        return len(self.covectors[0]) - 1

    def dual_points(self) -> list:
        """Unit normals: dist(x, div l) = |<x^, conj(l)^>|."""
        return [np.conj(c) for c in self.covectors]

    def hyperplane_frames(self) -> list:
        """Orthonormal frames of the hyperplanes ker l (deterministic)."""
        return [householder_unitary(np.conj(c))[:, 1:] for c in self.covectors]

    def poly(self) -> dict:
        out = {tuple([0] * (self.ambient_dim + 1)): 1.0 + 0j}
        for c, m in zip(self.covectors, self.mults):
            lin = {}
            for k in range(len(c)):
                e = [0] * len(c)
                e[k] = 1
                lin[tuple(e)] = c[k]
            for _ in range(m):
                out = poly_mul(out, lin)
        return out

    def min_distance(self, theta: np.ndarray) -> float:
        th = normalize(theta)
        return float(min(abs(np.dot(c, th)) for c in self.covectors))

    def to_dict(self) -> dict:
        return {
            "type": "product_divisor",
            "covectors": [_vec_to_lists(c) for c in self.covectors],
            "mults": list(self.mults),
        }

    @staticmethod
    def from_dict(d: dict) -> "ProductDivisor":
        if d.get("type") != "product_divisor":
            raise ValueError("not a product divisor payload")
        return ProductDivisor(
            [_lists_to_vec(c) for c in d["covectors"]], d["mults"]
        )


def cycle_from_dict(d: dict):
    kind = d.get("type")
    if kind == "zero_cycle":
        return ZeroCycle.from_dict(d)
    if kind == "linear_cycle":
        return LinearCycle.from_dict(d)
    if kind == "product_divisor":
        return ProductDivisor.from_dict(d)
    raise ValueError(f"unknown cycle type {kind!r}")


# -- sparse homogeneous polynomials -----------------------------------------


def poly_mul(a: dict, b: dict) -> dict:
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0.0) + ca * cb
    return {e: c for e, c in out.items() if c != 0}


def poly_degree(poly: dict) -> int:
    return max(sum(e) for e in poly)


def poly_eval(poly: dict, z: np.ndarray):
    """Works on plain complex vectors and on sequences of jets alike."""
    val = None
    for e, c in poly.items():
        term = c
        for k, ek in enumerate(e):
            for _ in range(ek):
                term = term * z[k]
        val = term if val is None else val + term
    return val


def section_log_norm(poly: dict, z: np.ndarray) -> float:
    """log |F(z^)| for the unit representative of z."""
    return float(np.log(abs(poly_eval(poly, normalize(z)))))


def random_dense_poly(t: int, degree: int, rng) -> dict:
    """Homogeneous polynomial with iid complex gaussian coefficients."""
    def exps(nv, d):
        if nv == 1:
            yield (d,)
            return
        for e0 in range(d + 1):
            for rest in exps(nv - 1, d - e0):
                yield (e0,) + rest

    out = {}
    for e in exps(t + 1, degree):
        out[e] = complex(rng.standard_normal(), rng.standard_normal())
    return out


# -- intersections with exact answers ---------------------------------------


def intersect_product_divisors(
    z0: ProductDivisor, z1: ProductDivisor
) -> ZeroCycle:
    """Intersection cycle of two hyperplane-product divisors of P^2: one
    point per factor pair, at the cross product of the two covectors, with
    multiplicity the product of the factor multiplicities."""
    if z0.ambient_dim != 2 or z1.ambient_dim != 2:
        raise ValueError("pairwise line crossings need ambient P^2")
    pts, mults = [], []
    for c0, m0 in zip(z0.covectors, z0.mults):
        for c1, m1 in zip(z1.covectors, z1.mults):
            p = np.cross(c0, c1)
            if np.linalg.norm(p) <= 1e-12:
                raise ValueError("divisors share a factor; intersection is "
                                 "not proper")
            pts.append(p)
            mults.append(m0 * m1)
    return ZeroCycle(pts, mults)


def restrict_poly_to_line(poly: dict, frame: np.ndarray) -> np.ndarray:
    """Binary form G(u0, u1) = F(frame @ (u0, u1)) as a dense coefficient
    array, G[k] the coefficient of u0^(D-k) u1^k."""
    D = poly_degree(poly)
    out = np.zeros(D + 1, dtype=complex)
    for e, c in poly.items():
        term = np.array([1.0 + 0j])
        for k, ek in enumerate(e):
            lin = np.array([frame[k, 0], frame[k, 1]])
            for _ in range(ek):
                term = np.convolve(term, lin)
        term *= c
        out[: len(term)] += term
    return out


def _cluster_roots(roots: np.ndarray, tol: float) -> list:
    """Greedy clustering of near-coincident roots into (value, count)."""
    out = []
    for r in sorted(roots, key=lambda z: (z.real, z.imag)):
        for i, (v, n) in enumerate(out):
            if abs(r - v) <= tol * max(1.0, abs(v)):
                out[i] = ((v * n + r) / (n + 1), n + 1)
                break
        else:
            out.append((r, 1))
    return out


def intersect_divisor_line(
    poly: dict, frame: np.ndarray, cluster_tol: float = ROOT_CLUSTER_TOL
) -> ZeroCycle:
    """Zero cycle cut out on a projective line by a divisor.

    The divisor polynomial restricted to the line is a binary form; its
    projective roots (companion matrix, plus the point at infinity of the
    affine parameter when leading coefficients vanish) give the points, and
    root clustering recovers multiplicities.
    """
    g = restrict_poly_to_line(poly, frame)
    D = len(g) - 1
    scale = np.abs(g).max()
    if scale == 0:
        raise ValueError("divisor contains the line")
    g = g / scale
    # G = sum_k g[k] u0^(D-k) u1^k.  Vanishing low-index coefficients mean
    # u1 divides G (root at (1, 0)); vanishing high-index ones mean u0
    # divides G (root at (0, 1)).  Split those off exactly, then run the
    # companion matrix on the core in s = u1/u0.
    lo = 0
    while lo <= D and abs(g[lo]) <= 1e-14:
        lo += 1
    hi = D
    while hi >= 0 and abs(g[hi]) <= 1e-14:
        hi -= 1
    pts, mults = [], []
    if lo > 0:
        pts.append(frame @ np.array([1.0, 0.0], dtype=complex))
        mults.append(lo)
    if hi < D:
        pts.append(frame @ np.array([0.0, 1.0], dtype=complex))
        mults.append(D - hi)
    core = g[lo: hi + 1]
    if len(core) > 1:
        # roots of sum_k core[k] s^k with s = u1/u0, ascending powers
        rts = np.roots(core[::-1])
        clusters = _cluster_roots(rts, cluster_tol)
        for i, (v, _) in enumerate(clusters):
            for w, _ in clusters[i + 1:]:
                if abs(v - w) <= 10 * cluster_tol * max(1.0, abs(v)):
                    raise ValueError(
                        "root clustering ambiguous: distinct clusters closer "
                        "than 10x the clustering tolerance")
        for val, n in clusters:
            pts.append(frame @ np.array([1.0, val], dtype=complex))
            mults.append(n)
    return ZeroCycle(pts, mults)


def line_covector(frame: np.ndarray) -> np.ndarray:
    """The linear form vanishing on a line of P^2 (cross product)."""
    if frame.shape != (3, 2):
        raise ValueError("need a line frame in P^2")
    return normalize(np.cross(frame[:, 0], frame[:, 1]))


def line_through(theta: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Orthonormal frame of the projective line joining two points."""
    fr = orthonormal_frame([normalize(theta), normalize(q)])
    if fr.shape[1] != 2:
        raise ValueError("points coincide; no unique line")
    return fr
