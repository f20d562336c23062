"""Integer quaternion arithmetic and the rotation action on R^3.

Quaternions q = a + b*i + c*j + d*k are stored through doubled coordinates
(da, db, dc, dd) = (2a, 2b, 2c, 2d), all four integers of equal parity: even
for the Lipschitz part of the order, odd for the half-integer part. This
keeps every element of the order <1, i, j, (1+i+j+k)/2> exactly representable
and makes products/norms pure integer arithmetic.

A quaternion q acts on a vector v in R^3 (identified with the pure quaternion
v = x*i + y*j + z*k) by q.v = q v q^{-1} = q v conj(q) / nrd(q), a rotation.
Both a float path (`rotate`) and an exact rational path (`rotate_exact`) are
provided; the exact path is what orbit computations on lattice points use.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "HurwitzQuaternion",
    "units",
    "unit_rotation_matrices",
    "enumerate_norm",
    "norm_doubled_array",
    "sigma_divisors",
    "rotate",
    "rotate_exact",
    "rotation_matrix",
    "rotation_matrices_for_norm",
    "coset_representatives",
    "quat_mul_f",
    "quat_conj_f",
]


@dataclass(frozen=True)
class HurwitzQuaternion:
    """Quaternion with doubled integer coordinates (2a, 2b, 2c, 2d)."""

    da: int
    db: int
    dc: int
    dd: int

    def __post_init__(self):
        coords = (self.da, self.db, self.dc, self.dd)
        if not all(isinstance(c, int) for c in coords):
            raise TypeError("doubled coordinates must be integers")
        parities = {c & 1 for c in coords}
        if len(parities) != 1:
            raise ValueError(f"coordinates {coords} are not all of equal parity")

    @classmethod
    def from_integers(cls, a: int, b: int, c: int, d: int) -> "HurwitzQuaternion":
        """Element a + b*i + c*j + d*k with integer coefficients."""
        return cls(2 * a, 2 * b, 2 * c, 2 * d)

    @classmethod
    def omega(cls) -> "HurwitzQuaternion":
        """The half-unit (1 + i + j + k)/2."""
        return cls(1, 1, 1, 1)

    def __mul__(self, other: "HurwitzQuaternion") -> "HurwitzQuaternion":
        if not isinstance(other, HurwitzQuaternion):
            return NotImplemented
        a1, b1, c1, d1 = self.da, self.db, self.dc, self.dd
        a2, b2, c2, d2 = other.da, other.db, other.dc, other.dd
        # product of the doubled representatives, halved; the order is closed
        # under multiplication so the halves are exact
        pa = a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2
        pb = a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2
        pc = a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2
        pd = a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2
        assert pa % 2 == pb % 2 == pc % 2 == pd % 2 == 0
        return HurwitzQuaternion(pa // 2, pb // 2, pc // 2, pd // 2)

    def __add__(self, other: "HurwitzQuaternion") -> "HurwitzQuaternion":
        if not isinstance(other, HurwitzQuaternion):
            return NotImplemented
        return HurwitzQuaternion(
            self.da + other.da, self.db + other.db, self.dc + other.dc, self.dd + other.dd
        )

    def __neg__(self) -> "HurwitzQuaternion":
        return HurwitzQuaternion(-self.da, -self.db, -self.dc, -self.dd)

    def conjugate(self) -> "HurwitzQuaternion":
        return HurwitzQuaternion(self.da, -self.db, -self.dc, -self.dd)

    def nrd(self) -> int:
        """Reduced norm a^2 + b^2 + c^2 + d^2 (an integer for order elements)."""
        s = self.da**2 + self.db**2 + self.dc**2 + self.dd**2
        assert s % 4 == 0
        return s // 4

    def trd(self) -> int:
        """Reduced trace 2a (always an integer)."""
        return self.da

    def is_zero(self) -> bool:
        return self.da == self.db == self.dc == self.dd == 0

    def coefficients(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """Exact coefficients (a, b, c, d) as Fractions."""
        return tuple(Fraction(c, 2) for c in (self.da, self.db, self.dc, self.dd))

    def to_float(self) -> np.ndarray:
        return np.array([self.da, self.db, self.dc, self.dd], dtype=float) / 2.0

    def __repr__(self):
        a, b, c, d = self.coefficients()
        return f"HurwitzQuaternion({a}, {b}, {c}, {d})"


_UNITS_CACHE: list[HurwitzQuaternion] | None = None


def units() -> list[HurwitzQuaternion]:
    """The 24 units of the order: 8 with one coefficient +-1, 16 of shape (+-1+-i+-j+-k)/2."""
    global _UNITS_CACHE
    if _UNITS_CACHE is None:
        out = []
        for pos in range(4):
            for sgn in (2, -2):
                coords = [0, 0, 0, 0]
                coords[pos] = sgn
                out.append(HurwitzQuaternion(*coords))
        for signs in itertools.product((1, -1), repeat=4):
            out.append(HurwitzQuaternion(*signs))
        _UNITS_CACHE = out
    return list(_UNITS_CACHE)


_UNIT_MATS_CACHE: list[np.ndarray] | None = None


def unit_rotation_matrices() -> list[np.ndarray]:
    """The 12 distinct integer rotation matrices induced by the 24 units.

    Units come in pairs +-u with the same conjugation action; the matrices are
    exact (signed permutation matrices) and deduplicated deterministically.
    """
    global _UNIT_MATS_CACHE
    if _UNIT_MATS_CACHE is None:
        seen = {}
        for u in units():
            cols = []
            for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                w = rotate_exact(u, e)
                assert all(f.denominator == 1 for f in w)
                cols.append([int(f) for f in w])
            mat = tuple(zip(*cols))  # rows of the matrix
            seen.setdefault(mat, np.array(mat, dtype=np.int64))
        _UNIT_MATS_CACHE = [seen[k] for k in sorted(seen)]
    return [m.copy() for m in _UNIT_MATS_CACHE]


def sigma_divisors(n: int) -> int:
    """Sum of divisors of n."""
    if n < 1:
        raise ValueError("n must be positive")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d
            if d != n // d:
                total += n // d
        d += 1
    return total


def norm_doubled_array(n: int) -> np.ndarray:
    """Doubled coordinates of all order elements of reduced norm n, as an (K, 4) int array.

    Solves da^2 + db^2 + dc^2 + dd^2 = 4n over equal-parity integer 4-tuples by a
    vectorized bucket join on two-square sums. Rows are sorted lexicographically.
    """
    if n < 1:
        raise ValueError("n must be positive")
    target = 4 * n
    limit = math.isqrt(target)
    blocks = []
    for par in (0, 1):
        vals = np.arange(-limit, limit + 1, dtype=np.int64)
        vals = vals[(vals & 1) == par]
        if vals.size == 0:
            continue
        # all (dc, dd) pairs of this parity, sorted by dc^2 + dd^2
        pc, pd = np.meshgrid(vals, vals, indexing="ij")
        pc, pd = pc.ravel(), pd.ravel()
        s2 = pc * pc + pd * pd
        keep = s2 <= target
        pc, pd, s2 = pc[keep], pd[keep], s2[keep]
        order = np.argsort(s2, kind="stable")
        pc, pd, s2 = pc[order], pd[order], s2[order]
        # all (da, db) pairs with residual r = 4n - da^2 - db^2 >= 0
        qa, qb = np.meshgrid(vals, vals, indexing="ij")
        qa, qb = qa.ravel(), qb.ravel()
        r = target - qa * qa - qb * qb
        keep = r >= 0
        qa, qb, r = qa[keep], qb[keep], r[keep]
        lo = np.searchsorted(s2, r, side="left")
        hi = np.searchsorted(s2, r, side="right")
        counts = hi - lo
        total = int(counts.sum())
        if total == 0:
            continue
        rep = np.repeat(np.arange(qa.size), counts)
        base = np.repeat(lo, counts)
        offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        idx = base + offs
        blocks.append(np.column_stack([qa[rep], qb[rep], pc[idx], pd[idx]]))
    if not blocks:
        return np.empty((0, 4), dtype=np.int64)
    out = np.vstack(blocks)
    order = np.lexsort(out.T[::-1])
    return out[order]


def enumerate_norm(n: int) -> list[HurwitzQuaternion]:
    """All order elements of reduced norm n (|result| = 24*sigma(n) for odd n)."""
    arr = norm_doubled_array(n)
    return [HurwitzQuaternion(*map(int, row)) for row in arr]


def _as_float_quat(q) -> np.ndarray:
    if isinstance(q, HurwitzQuaternion):
        return q.to_float()
    arr = np.asarray(q, dtype=float)
    if arr.shape != (4,):
        raise ValueError("quaternion must have 4 components")
    return arr


def quat_mul_f(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Float quaternion product (scalar-first convention)."""
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ]
    )


def quat_conj_f(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def rotate(q, v) -> np.ndarray:
    """Rotation action q v q^{-1} of a nonzero quaternion on a 3-vector (float path)."""
    qf = _as_float_quat(q)
    nq = float(qf @ qf)
    if nq == 0.0:
        raise ValueError("cannot rotate by the zero quaternion")
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError("vector must have 3 components")
    vq = np.array([0.0, v[0], v[1], v[2]])
    w = quat_mul_f(quat_mul_f(qf, vq), quat_conj_f(qf)) / nq
    return w[1:]


def rotate_exact(q: HurwitzQuaternion, v) -> tuple[Fraction, Fraction, Fraction, Fraction] | tuple:
    """Rotation action on a rational 3-vector, carried out in exact arithmetic.

    Accepts ints or Fractions; returns a tuple of Fractions.
    """
    if not isinstance(q, HurwitzQuaternion):
        raise TypeError("exact rotation needs an order element")
    if q.is_zero():
        raise ValueError("cannot rotate by the zero quaternion")
    x, y, z = (Fraction(c) for c in v)
    a, b, c, d = q.coefficients()
    # p = q * (0, x, y, z)
    pa = -b * x - c * y - d * z
    pb = a * x + c * z - d * y
    pc = a * y - b * z + d * x
    pd = a * z + b * y - c * x
    # w = p * conj(q), then divide by nrd(q)
    n = Fraction(q.nrd())
    wx = (-pa * b + pb * a - pc * d + pd * c) / n
    wy = (-pa * c + pb * d + pc * a - pd * b) / n
    wz = (-pa * d - pb * c + pc * b + pd * a) / n
    return (wx, wy, wz)


def rotation_matrix(q) -> np.ndarray:
    """3x3 rotation matrix of the conjugation action of q."""
    qf = _as_float_quat(q)
    nq = float(qf @ qf)
    if nq == 0.0:
        raise ValueError("cannot rotate by the zero quaternion")
    a, b, c, d = qf / math.sqrt(nq)
    return np.array(
        [
            [a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)],
            [2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)],
            [2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d],
        ]
    )


def _rotation_matrices_batch(doubled: np.ndarray) -> np.ndarray:
    """Rotation matrices for an (K, 4) array of doubled coordinates, shape (K, 3, 3)."""
    q = doubled.astype(float)
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    a, b, c, d = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    m = np.empty((q.shape[0], 3, 3))
    m[:, 0, 0] = a * a + b * b - c * c - d * d
    m[:, 0, 1] = 2 * (b * c - a * d)
    m[:, 0, 2] = 2 * (b * d + a * c)
    m[:, 1, 0] = 2 * (b * c + a * d)
    m[:, 1, 1] = a * a - b * b + c * c - d * d
    m[:, 1, 2] = 2 * (c * d - a * b)
    m[:, 2, 0] = 2 * (b * d - a * c)
    m[:, 2, 1] = 2 * (c * d + a * b)
    m[:, 2, 2] = a * a - b * b - c * c + d * d
    return m


def coset_representatives(n: int) -> np.ndarray:
    """One doubled-coordinate representative per left unit coset of the norm-n elements.

    Rows alpha, beta lie in the same coset when beta = u*alpha for a unit u;
    each coset is keyed by the lexicographic minimum of its 24 unit translates,
    encoded into a single int64. For odd n the number of cosets is sigma(n).
    """
    arr = norm_doubled_array(n)
    if arr.shape[0] == 0:
        return arr
    base = np.int64(4 * math.isqrt(4 * n) + 3)
    offset = base // 2
    keys = np.full(arr.shape[0], np.iinfo(np.int64).max)
    a2, b2, c2, d2 = arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]
    for u in units():
        a1, b1, c1, d1 = u.da, u.db, u.dc, u.dd
        # doubled product halved: left multiplication by the unit
        pa = (a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2) // 2
        pb = (a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2) // 2
        pc = (a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2) // 2
        pd = (a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2) // 2
        enc = ((pa + offset) * base + (pb + offset)) * base + (pc + offset)
        enc = enc * base + (pd + offset)
        np.minimum(keys, enc, out=keys)
    _, first = np.unique(keys, return_index=True)
    return arr[np.sort(first)]


def rotation_matrices_for_norm(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct rotation matrices induced by norm-n elements, with multiplicities.

    Returns (mats, counts): mats has shape (R, 3, 3), counts (R,) with
    counts.sum() == |{gamma : nrd(gamma) = n}|. Elements gamma and -gamma act
    identically, so grouping by matrix halves the work without changing the
    averaged operator.
    """
    arr = norm_doubled_array(n)
    if arr.shape[0] == 0:
        return np.empty((0, 3, 3)), np.empty((0,), dtype=np.int64)
    # canonical sign: flip so the first nonzero doubled coordinate is positive
    sign = np.where(arr[:, 0] != 0, np.sign(arr[:, 0]), 0)
    for col in (1, 2, 3):
        sign = np.where(sign == 0, np.where(arr[:, col] != 0, np.sign(arr[:, col]), 0), sign)
    canon = arr * sign[:, None]
    uniq, counts = np.unique(canon, axis=0, return_counts=True)
    return _rotation_matrices_batch(uniq), counts.astype(np.int64)
