"""Dense truncated multivariate Taylor arithmetic.

A jet of order S in v real variables stores every Taylor coefficient of a
smooth function at a point, up to total degree S, in a flat numpy array.
Multi-indices are enumerated in graded lexicographic order, so the
coefficients of a fixed total degree occupy one contiguous slice.  All
arithmetic (ring operations, division, sqrt, exp, log, powers) is exact
truncated power-series arithmetic: no step sizes, no approximation beyond
float rounding.

The enumeration tables and the index table for coefficient multiplication are
cached per (nvars, order).  Table sizes are guarded: a table whose
coefficient count or multiplication-pair count exceeds the configured budget
raises JetBudgetError instead of silently allocating.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

# Budget guards for table construction.  binomial(v+S, S) coefficients,
# binomial(2v+S, S) multiplication pairs.
MAX_TABLE_COEFFS = 200_000
MAX_TABLE_PAIRS = 30_000_000

_MUL_CHUNK = 4_000_000


class JetBudgetError(RuntimeError):
    """Requested jet order/variable count exceeds the table budget."""


class JetSingularityError(ArithmeticError):
    """Division by a jet whose constant term is numerically zero."""


class JetDomainError(ArithmeticError):
    """sqrt/log of a jet with non-positive constant term."""


def _multiindices(nvars: int, degree: int) -> list[tuple[int, ...]]:
    # all exponent tuples of the given total degree, lexicographic order
    if nvars == 1:
        return [(degree,)]
    out = []
    for e0 in range(degree + 1):
        for rest in _multiindices(nvars - 1, degree - e0):
            out.append((e0,) + rest)
    return out


class MultiIndexTable:
    """Graded-lex enumeration of multi-indices with |I| <= order, plus the
    gather/scatter index arrays used by coefficient multiplication."""

    def __init__(self, nvars: int, order: int):
        if nvars < 1 or order < 0:
            raise ValueError("need nvars >= 1 and order >= 0")
        ncoef = math.comb(nvars + order, order)
        if ncoef > MAX_TABLE_COEFFS:
            raise JetBudgetError(
                f"jet table with {ncoef} coefficients (nvars={nvars}, "
                f"order={order}) exceeds budget {MAX_TABLE_COEFFS}"
            )
        npairs = math.comb(2 * nvars + order, order)
        if npairs > MAX_TABLE_PAIRS:
            raise JetBudgetError(
                f"jet table with {npairs} product pairs (nvars={nvars}, "
                f"order={order}) exceeds budget {MAX_TABLE_PAIRS}"
            )
        self.nvars = nvars
        self.order = order
        exps = []
        slices = []
        start = 0
        for d in range(order + 1):
            block = _multiindices(nvars, d)
            exps.extend(block)
            slices.append(slice(start, start + len(block)))
            start += len(block)
        self.exponents = np.array(exps, dtype=np.int64)
        self.size = len(exps)
        self.order_slices = slices
        self.index_of = {tuple(e): i for i, e in enumerate(exps)}
        # log(I!) and I! per slot, for derivative extraction
        lg = np.zeros(self.size)
        for k in range(nvars):
            lg += np.vectorize(math.lgamma)(self.exponents[:, k] + 1.0)
        self.log_factorial = lg
        self.factorial = np.array(
            [float(math.prod(math.factorial(int(e)) for e in row))
             for row in self.exponents]
        )
        self._keys = self._encode(self.exponents)
        ksort = np.argsort(self._keys)
        self._keys_sorted = self._keys[ksort]
        self._keys_order = ksort
        self._pairs = None  # built lazily

    def _encode(self, exps: np.ndarray) -> np.ndarray:
        base = self.order + 1
        key = np.zeros(exps.shape[0], dtype=np.int64)
        for k in range(self.nvars):
            key = key * base + exps[:, k]
        return key

    def lookup(self, keys: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self._keys_sorted, keys)
        return self._keys_order[pos]

    @property
    def pairs(self):
        """(i, j, k) index triples with deg_i + deg_j <= order and
        exponents[k] == exponents[i] + exponents[j]."""
        if self._pairs is None:
            ii, jj, kk = [], [], []
            for d1 in range(self.order + 1):
                s1 = self.order_slices[d1]
                e1 = self.exponents[s1]
                idx1 = np.arange(s1.start, s1.stop, dtype=np.int32)
                for d2 in range(self.order + 1 - d1):
                    s2 = self.order_slices[d2]
                    e2 = self.exponents[s2]
                    idx2 = np.arange(s2.start, s2.stop, dtype=np.int32)
                    sums = e1[:, None, :] + e2[None, :, :]
                    keys = self._encode(sums.reshape(-1, self.nvars))
                    kk.append(self.lookup(keys).astype(np.int32))
                    gi, gj = np.meshgrid(idx1, idx2, indexing="ij")
                    ii.append(gi.ravel())
                    jj.append(gj.ravel())
            self._pairs = (
                np.concatenate(ii), np.concatenate(jj), np.concatenate(kk)
            )
        return self._pairs


@lru_cache(maxsize=8)
def get_table(nvars: int, order: int) -> MultiIndexTable:
    return MultiIndexTable(nvars, order)


class Jet:
    """Taylor coefficients of a function at a point, up to a total degree.

    coeffs[i] is the coefficient of the monomial table.exponents[i]; the
    value of the mixed partial for multi-index I is I! * coeffs[index(I)].
    """

    __slots__ = ("table", "coeffs")

    def __init__(self, table: MultiIndexTable, coeffs: np.ndarray):
        self.table = table
        self.coeffs = coeffs

    # -- construction -----------------------------------------------------

    @staticmethod
    def constant(table: MultiIndexTable, value) -> "Jet":
        dtype = np.complex128 if isinstance(value, complex) else np.float64
        c = np.zeros(table.size, dtype=dtype)
        c[0] = value
        return Jet(table, c)

    @staticmethod
    def variable(table: MultiIndexTable, k: int, center=0.0) -> "Jet":
        """The coordinate function w_k expanded at w_k = center."""
        dtype = np.complex128 if isinstance(center, complex) else np.float64
        c = np.zeros(table.size, dtype=dtype)
        c[0] = center
        if table.order >= 1:
            e = [0] * table.nvars
            e[k] = 1
            c[table.index_of[tuple(e)]] = 1.0
        return Jet(table, c)

    def copy(self) -> "Jet":
        return Jet(self.table, self.coeffs.copy())

    @property
    def const(self):
        return self.coeffs[0]

    def valuation(self) -> int:
        """Smallest total degree with a nonzero coefficient (order+1 if 0)."""
        for d, s in enumerate(self.table.order_slices):
            if np.any(self.coeffs[s] != 0):
                return d
        return self.table.order + 1

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "Jet"):
        if other.table is not self.table:
            raise ValueError("jets built on different tables")

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet(self.table, self.coeffs + other.coeffs)
        c = self.coeffs.copy()
        if isinstance(other, complex) and c.dtype != np.complex128:
            c = c.astype(np.complex128)
        c[0] += other
        return Jet(self.table, c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.table, -self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.table, self.coeffs * other)
        self._check(other)
        ii, jj, kk = self.table.pairs
        a, b = self.coeffs, other.coeffs
        cplx = a.dtype == np.complex128 or b.dtype == np.complex128
        out = np.zeros(self.table.size,
                       dtype=np.complex128 if cplx else np.float64)
        n = len(ii)
        for lo in range(0, n, _MUL_CHUNK):
            hi = min(lo + _MUL_CHUNK, n)
            w = a[ii[lo:hi]] * b[jj[lo:hi]]
            k = kk[lo:hi]
            if cplx:
                out += np.bincount(k, weights=w.real, minlength=self.table.size)
                out += 1j * np.bincount(k, weights=w.imag,
                                        minlength=self.table.size)
            else:
                out += np.bincount(k, weights=w, minlength=self.table.size)
        return Jet(self.table, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.table, self.coeffs / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def conjugate(self) -> "Jet":
        return Jet(self.table, np.conj(self.coeffs))

    @property
    def real(self) -> "Jet":
        return Jet(self.table, np.ascontiguousarray(self.coeffs.real))

    # -- series-based operations -------------------------------------------

    def _series(self, coeffs) -> "Jet":
        """sum_k coeffs[k] * u^k where u = self must have zero constant term."""
        val = self.valuation()
        nterms = min(len(coeffs) - 1, self.table.order // max(val, 1))
        res = Jet.constant(self.table, coeffs[nterms] + 0.0)
        if np.iscomplexobj(self.coeffs) and res.coeffs.dtype != np.complex128:
            res.coeffs = res.coeffs.astype(np.complex128)
        for k in range(nterms - 1, -1, -1):
            res = res * self
            res.coeffs[0] += coeffs[k]
        return res

    def reciprocal(self) -> "Jet":
        c0 = self.const
        if abs(c0) <= 1e-14:
            raise JetSingularityError(
                "jet singularity: division by jet with constant term "
                f"{c0!r} (|.| <= 1e-14)"
            )
        u = Jet(self.table, self.coeffs / c0)
        u.coeffs[0] = 0.0
        seq = [(-1.0) ** k for k in range(self.table.order + 1)]
        return u._series(seq) * (1.0 / c0)

    def sqrt(self) -> "Jet":
        c0 = self.const
        if np.iscomplexobj(self.coeffs) or not c0 > 0:
            raise JetDomainError(
                f"jet domain: sqrt of non-positive constant term {c0!r}"
            )
        u = Jet(self.table, self.coeffs / c0)
        u.coeffs[0] = 0.0
        seq, b = [], 1.0
        for k in range(self.table.order + 1):
            seq.append(b)
            b *= (0.5 - k) / (k + 1.0)
        return u._series(seq) * math.sqrt(c0)

    def exp(self) -> "Jet":
        c0 = self.const
        u = self.copy()
        u.coeffs[0] = 0.0
        seq = [1.0 / math.factorial(k) for k in range(self.table.order + 1)]
        out = u._series(seq)
        return out * (np.exp(c0) if np.iscomplexobj(self.coeffs)
                      else math.exp(float(c0)))

    def log(self) -> "Jet":
        c0 = self.const
        if np.iscomplexobj(self.coeffs) or not c0 > 0:
            raise JetDomainError(
                f"jet domain: log of non-positive constant term {c0!r}"
            )
        u = Jet(self.table, self.coeffs / c0)
        u.coeffs[0] = 0.0
        seq = [0.0] + [(-1.0) ** (k + 1) / k
                       for k in range(1, self.table.order + 1)]
        out = u._series(seq)
        out.coeffs[0] += math.log(c0)
        return out

    def power(self, p) -> "Jet":
        if isinstance(p, int) or (isinstance(p, float) and p.is_integer()):
            p = int(p)
            if p == 0:
                return Jet.constant(self.table, 1.0)
            base = self if p > 0 else self.reciprocal()
            m = abs(p)
            # binary exponentiation
            res = None
            while m:
                if m & 1:
                    res = base if res is None else res * base
                m >>= 1
                if m:
                    base = base * base
            return res
        c0 = self.const
        if np.iscomplexobj(self.coeffs) or not c0 > 0:
            raise JetDomainError(
                f"jet domain: power of non-positive constant term {c0!r}"
            )
        u = Jet(self.table, self.coeffs / c0)
        u.coeffs[0] = 0.0
        seq, b = [], 1.0
        for k in range(self.table.order + 1):
            seq.append(b)
            b *= (p - k) / (k + 1.0)
        return u._series(seq) * (c0 ** p)

    __pow__ = power


# -- spec-shaped free functions --------------------------------------------


def jet_seed(nvars: int, order: int, values=None) -> list[Jet]:
    """Coordinate jets w_0..w_{nvars-1} at the given center (default 0)."""
    table = get_table(nvars, order)
    if values is None:
        values = [0.0] * nvars
    if len(values) != nvars:
        raise ValueError("values must have one entry per variable")
    return [Jet.variable(table, k, values[k]) for k in range(nvars)]


_BINOPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "power": lambda a, b: a.power(b),
}
_UNOPS = {
    "sqrt": lambda a: a.sqrt(),
    "exp": lambda a: a.exp(),
    "log": lambda a: a.log(),
}


def jet_compose(op: str, a: Jet, b=None) -> Jet:
    """Dispatch by operation name; unary ops ignore b."""
    if op in _BINOPS:
        if b is None:
            raise ValueError(f"{op} needs two operands")
        return _BINOPS[op](a, b)
    if op in _UNOPS:
        return _UNOPS[op](a)
    raise ValueError(f"unknown jet operation {op!r}")


def extract_partial(a: Jet, index) -> float:
    """The mixed partial d^I f at the expansion point: I! * coeff_I."""
    index = tuple(int(i) for i in index)
    if len(index) != a.table.nvars or sum(index) > a.table.order:
        raise ValueError(f"multi-index {index} out of range for this jet")
    i = a.table.index_of[index]
    return a.table.factorial[i] * a.coeffs[i]


def per_order_sup_log(a: Jet) -> np.ndarray:
    """log sup_{|I| = s} |d^I f| for each s = 0..order (-inf where all zero)."""
    t = a.table
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(a.coeffs)) + t.log_factorial
    out = np.empty(t.order + 1)
    for d, s in enumerate(t.order_slices):
        seg = logs[s]
        out[d] = np.max(seg) if seg.size else -np.inf
    return out


def sup_log_partial(a: Jet, S: int | None = None) -> float:
    """log sup over |I| <= S of |d^I f| (default: the jet's full order)."""
    per = per_order_sup_log(a)
    if S is None:
        S = a.table.order
    if not 0 <= S <= a.table.order:
        raise ValueError("S out of range for this jet")
    return float(np.max(per[: S + 1]))
