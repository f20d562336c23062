"""Sphere lattice points, class numbers, and closed-geodesic families.

For a negative fundamental discriminant D with D mod 8 != 1, put n_D = -D/4
when 4 | D and n_D = -D otherwise. The integer points on x^2 + y^2 + z^2 = n_D,
scaled to the unit sphere, serve as poles of great circles. The 24 quaternion
units act on these points through 12 exact rotation matrices; the geodesic
family keeps one circle per orbit, together with a rotation moving its pole
to the x-axis and a length factor read off the pole's symmetry pattern.

Class numbers h_D are counted from reduced binary quadratic forms (a, b, c)
with b^2 - 4ac = D, and Gauss's relation r_3(n_D) in {12 h_D, 24 h_D} is
checked exactly against the lattice-point count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .hurwitz import rotate, rotation_matrix, unit_rotation_matrices

__all__ = [
    "lattice_sphere_points",
    "three_squares_count",
    "is_fundamental",
    "ClassData",
    "class_data",
    "reduced_forms",
    "GaussCheck",
    "gauss_check",
    "fundamental_discriminants",
    "point_orbits",
    "length_factor",
    "pole_to_rotation",
    "Geodesic",
    "GeodesicFamily",
    "build_family",
]


def lattice_sphere_points(n: int) -> list[tuple[int, int, int]]:
    """All integer triples with x^2 + y^2 + z^2 = n, sorted; may be empty."""
    if n < 1:
        raise ValueError("n must be positive")
    r = math.isqrt(n)
    vals = np.arange(-r, r + 1, dtype=np.int64)
    x, y = np.meshgrid(vals, vals, indexing="ij")
    rem = n - x * x - y * y
    out = []
    for zsq in (rem,):
        mask = zsq >= 0
        zr = np.zeros_like(zsq)
        zr[mask] = np.sqrt(zsq[mask].astype(float)).round().astype(np.int64)
        good = mask & (zr * zr == zsq)
        xs, ys, zs = x[good], y[good], zr[good]
        for xi, yi, zi in zip(xs, ys, zs):
            out.append((int(xi), int(yi), int(zi)))
            if zi != 0:
                out.append((int(xi), int(yi), -int(zi)))
    return sorted(out)


def three_squares_count(n: int) -> int:
    return len(lattice_sphere_points(n))


def _squarefree(m: int) -> bool:
    m = abs(m)
    d = 2
    while d * d <= m:
        if m % (d * d) == 0:
            return False
        d += 1
    return True


def is_fundamental(D: int) -> bool:
    """Fundamental negative discriminant test."""
    if D >= 0:
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def reduced_forms(D: int) -> list[tuple[int, int, int]]:
    """Reduced positive binary quadratic forms (a, b, c) of discriminant D < 0.

    Reduced means |b| <= a <= c with b >= 0 whenever |b| = a or a = c.
    """
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError("discriminant must be negative and 0 or 1 mod 4")
    forms = []
    b_max = math.isqrt(-D // 3)
    for b in range(D % 2, b_max + 1, 2):
        four_ac = b * b - D
        if four_ac % 4:
            continue
        ac = four_ac // 4
        a = max(b, 1)
        while a * a <= ac:
            if ac % a == 0:
                c = ac // a
                forms.append((a, b, c))
                if b != 0 and b != a and a != c:
                    forms.append((a, -b, c))
            a += 1
    return sorted(forms, key=lambda f: (f[0], abs(f[1]), -f[1], f[2]))


@dataclass(frozen=True)
class ClassData:
    D: int
    n_D: int
    h: int
    c: int
    forms: tuple[tuple[int, int, int], ...]


def class_data(D: int) -> ClassData:
    """Class number h_D by reduced-form count, plus the orbit multiplier c_D."""
    if not is_fundamental(D):
        raise ValueError(f"D = {D} is not a negative fundamental discriminant")
    if D % 8 == 1:
        raise ValueError(f"D = {D} is 1 mod 8: the sphere x^2+y^2+z^2 = {-D} has no integer points")
    forms = reduced_forms(D)
    n_D = -D // 4 if D % 4 == 0 else -D
    c = 1 if D % 4 == 0 else 2
    return ClassData(D=D, n_D=n_D, h=len(forms), c=c, forms=tuple(forms))


@dataclass(frozen=True)
class GaussCheck:
    D: int
    n_D: int
    h: int
    r3: int
    expected: int | None
    applies: bool
    ok: bool
    note: str


def gauss_check(D: int) -> GaussCheck:
    """Compare r_3(n_D) with 12 h_D or 24 h_D (exact integers).

    The relation is a theorem for squarefree n_D > 4 with n_D != 7 mod 8;
    outside that range the comparison is still reported, marked non-applicable.
    """
    cd = class_data(D)
    n = cd.n_D
    r3 = three_squares_count(n)
    if n % 4 in (1, 2):
        expected = 12 * cd.h
    elif n % 8 == 3:
        expected = 24 * cd.h
    else:
        expected = None
    applies = n > 4 and _squarefree(n) and n % 8 != 7 and expected is not None
    ok = expected is not None and r3 == expected
    if applies:
        note = "theorem case"
    elif expected is None:
        note = "no statement for this residue class"
    else:
        note = f"observational only (n_D = {n} <= 4 or not squarefree)"
    return GaussCheck(D=D, n_D=n, h=cd.h, r3=r3, expected=expected, applies=applies, ok=ok, note=note)


def fundamental_discriminants(n_max: int) -> list[int]:
    """All valid discriminants (fundamental, not 1 mod 8) with n_D <= n_max, descending."""
    out = []
    for n in range(1, n_max + 1):
        if n % 4 in (1, 2) and _squarefree(n):
            out.append(-4 * n)
        if n % 8 == 3 and _squarefree(n):
            out.append(-n)
    return sorted(out, reverse=True)


def point_orbits(n: int) -> list[list[tuple[int, int, int]]]:
    """Orbits of the sphere lattice points under the 24 units (12 matrices).

    Orbits are sorted by their lexicographically smallest member, which serves
    as the representative pole.
    """
    pts = lattice_sphere_points(n)
    mats = unit_rotation_matrices()
    buckets: dict[tuple[int, int, int], list[tuple[int, int, int]]] = {}
    for p in pts:
        v = np.array(p, dtype=np.int64)
        key = min(tuple(int(t) for t in m @ v) for m in mats)
        buckets.setdefault(key, []).append(p)
    return [sorted(buckets[k]) for k in sorted(buckets)]


def length_factor(pole) -> Fraction:
    """Length factor of the projected circle, read off the integer pole pattern.

    1/4 when exactly two entries vanish, 1/2 when exactly one vanishes or all
    absolute values coincide, 1 otherwise.
    """
    p = tuple(int(t) for t in pole)
    if len(p) != 3 or p == (0, 0, 0):
        raise ValueError("pole must be a nonzero integer triple")
    zeros = sum(1 for t in p if t == 0)
    if zeros == 2:
        return Fraction(1, 4)
    if zeros == 1:
        return Fraction(1, 2)
    if len({abs(t) for t in p}) == 1:
        return Fraction(1, 2)
    return Fraction(1)


def pole_to_rotation(mu) -> np.ndarray:
    """Unit quaternion kappa with rotate(kappa, mu) = x-axis.

    Built from the half-angle identity: the quaternion (1 + <m, e_x>, m x e_x)
    normalized. Antipodal input gets the half turn about the z-axis.
    """
    m = np.asarray(mu, dtype=float)
    m = m / np.linalg.norm(m)
    d = m[0]
    if d > 1.0 - 1e-12:
        return np.array([1.0, 0.0, 0.0, 0.0])
    if d < -1.0 + 1e-12:
        return np.array([0.0, 0.0, 0.0, 1.0])
    q = np.array([1.0 + d, 0.0, m[2], -m[1]])
    return q / np.linalg.norm(q)


@dataclass
class Geodesic:
    """One closed circle of the family: integer pole, rotation, length factor."""

    pole: tuple[int, int, int]
    label: int
    factor: Fraction
    orbit_size: int

    def __post_init__(self):
        self.mu_hat = np.array(self.pole, dtype=float)
        self.mu_hat /= np.linalg.norm(self.mu_hat)
        self.kappa = pole_to_rotation(self.mu_hat)
        self._to_x = rotation_matrix(self.kappa)

    def points(self, thetas: np.ndarray) -> np.ndarray:
        """Circle parametrization theta -> kappa^{-1} . (0, -sin t, cos t), shape (N, 3)."""
        t = np.asarray(thetas, dtype=float)
        base = np.column_stack([np.zeros_like(t), -np.sin(t), np.cos(t)])
        return base @ self._to_x

    def to_record(self) -> dict:
        return {"pole": list(self.pole), "length_factor": float(self.factor)}


@dataclass
class GeodesicFamily:
    D: int
    n_D: int
    h: int
    c: int
    geodesics: list[Geodesic]

    def __len__(self):
        return len(self.geodesics)

    def to_record(self) -> dict:
        return {
            "D": self.D,
            "n_D": self.n_D,
            "h_D": self.h,
            "c_D": self.c,
            "orbits": [g.to_record() for g in self.geodesics],
        }


def build_family(D: int) -> GeodesicFamily:
    """The geodesic family of D: one representative circle per unit orbit."""
    cd = class_data(D)
    orbits = point_orbits(cd.n_D)
    geos = []
    for idx, orbit in enumerate(orbits):
        rep = orbit[0]
        geos.append(Geodesic(pole=rep, label=idx, factor=length_factor(rep), orbit_size=len(orbit)))
    fam = GeodesicFamily(D=D, n_D=cd.n_D, h=cd.h, c=cd.c, geodesics=geos)
    for g in fam.geodesics:
        img = rotate(g.kappa, g.mu_hat)
        if not np.allclose(img, [1.0, 0.0, 0.0], atol=1e-12):
            raise AssertionError(f"pole rotation failed for {g.pole}")
    return fam
