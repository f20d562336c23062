"""Lifts of invariant eigenfunctions to q-expansions, and CM theta series.

A degree-l invariant eigenfunction psi produces a level-2 cusp form of weight
2l + 2 whose m-th coefficient averages the self-correlation <psi, psi o rot>
over the order elements of norm m, scaled by m^l from the homogeneous
extension of psi.  Left unit cosets collapse, so only one rotation per coset
is evaluated.

On the CM side, the character alpha -> alpha^{2n} on a class-number-one
imaginary quadratic order gives a theta series of weight 2n + 1 and level |D|
whose coefficients are computed in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .harmonics import basis_values
from .hecke import HeckeEigenfunction, space
from .hurwitz import _rotation_matrices_batch, coset_representatives

__all__ = [
    "QExpansion",
    "CMFormSpec",
    "CM_DISCRIMINANTS",
    "lift",
    "lift_hecke",
    "cm_form",
    "cm_coefficients_exact",
    "kronecker_chi",
    "hecke_normalize",
]

# fundamental discriminants with class number one and integer points on the
# corresponding sphere (D = -7 has none)
CM_DISCRIMINANTS = (-3, -4, -8, -11, -19, -43, -67, -163)


@dataclass
class QExpansion:
    """Coefficients a_1..a_M of a q-expansion, with weight/level bookkeeping.

    normalization is "arithmetic" for raw coefficients and "hecke" once each
    a_n has been divided by n^((k-1)/2).
    """

    weight: int
    level: int
    normalization: str
    a: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.normalization not in ("arithmetic", "hecke"):
            raise ValueError(f"unknown normalization {self.normalization!r}")
        self.a = np.asarray(self.a, dtype=float)

    def __len__(self) -> int:
        return int(self.a.shape[0])

    def an(self, n: int) -> float:
        if not 1 <= n <= len(self):
            raise IndexError(f"coefficient {n} not computed (have 1..{len(self)})")
        return float(self.a[n - 1])

    def multiplicative_gap(self, m: int, n: int) -> float:
        """Relative defect in the Hecke relation for a coefficient pair.

        a_m a_n = sum over d | gcd(m, n) of d^(k-1) a_{mn/d^2}, valid when
        gcd(mn, level) = 1.  In Hecke normalization the d-powers drop out.
        """
        if math.gcd(m * n, self.level) != 1:
            raise ValueError("relation requires mn coprime to the level")
        lhs = self.an(m) * self.an(n)
        rhs = 0.0
        g = math.gcd(m, n)
        for d in range(1, g + 1):
            if g % d == 0:
                scale = 1.0 if self.normalization == "hecke" else float(d) ** (self.weight - 1)
                rhs += scale * self.an(m * n // (d * d))
        return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-30)

    def to_record(self) -> dict:
        return {
            "weight": self.weight,
            "level": self.level,
            "normalization": self.normalization,
            "a": [float(x) for x in self.a],
        }


def hecke_normalize(q: QExpansion) -> QExpansion:
    """Divide a_n by n^((k-1)/2); requires a_1 = 1."""
    if abs(q.an(1) - 1.0) > 1e-8:
        raise ValueError("normalization requires a_1 = 1")
    if q.normalization == "hecke":
        return QExpansion(q.weight, q.level, "hecke", q.a.copy())
    ns = np.arange(1, len(q) + 1, dtype=float)
    return QExpansion(q.weight, q.level, "hecke", q.a / ns ** ((q.weight - 1) / 2.0))


# ---------------------------------------------------------------------------
# Lift of an invariant eigenfunction


def _coset_correlations(sp, coeffs: np.ndarray, m: int) -> np.ndarray:
    """<psi, psi o rot> for one representative of each left unit coset of norm m."""
    reps = coset_representatives(m)
    if reps.shape[0] == 0:
        return np.zeros(0)
    mats = _rotation_matrices_batch(reps)
    pts = sp.grid.points
    vals0_w = (sp._basis @ coeffs) * sp.grid.weights
    rotated = (pts[None, :, :] @ mats.transpose(0, 2, 1)).reshape(-1, 3)
    vals = (basis_values(sp.ell, rotated) @ coeffs).reshape(mats.shape[0], -1)
    return vals @ vals0_w


def lift(psi: HeckeEigenfunction, M: int) -> QExpansion:
    """Level-2 q-expansion of an invariant eigenfunction, coefficients to q^M.

    a_m = m^ell * sum over norm-m cosets of <psi, psi o rot>.  Every norm is
    enumerated directly, so keep M modest (tens); for long coefficient lists
    use lift_hecke.
    """
    if M < 1:
        raise ValueError("need at least one coefficient")
    sp = space(psi.ell)
    out = np.zeros(M)
    for m in range(1, M + 1):
        corr = _coset_correlations(sp, psi.coeffs, m)
        out[m - 1] = float(m) ** psi.ell * float(corr.sum())
    return QExpansion(weight=2 * psi.ell + 2, level=2, normalization="arithmetic", a=out)


def _primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.nonzero(sieve)[0]]


def lift_hecke(psi: HeckeEigenfunction, M: int) -> QExpansion:
    """Hecke-normalized lift coefficients lambda(1..M), built multiplicatively.

    Prime values come from the direct coset sums (lambda(p) = a_p / p^(l+1/2));
    higher coefficients follow from the eigenform recurrences: at the ramified
    prime 2, lambda(2^j) = lambda(2)^j, and at odd p,
    lambda(p^{j+1}) = lambda(p) lambda(p^j) - lambda(p^{j-1}).  The overlap
    with the direct lift is a test target, not assumed here.
    """
    if M < 1:
        raise ValueError("need at least one coefficient")
    sp = space(psi.ell)
    lam = np.zeros(M + 1)
    lam[1] = 1.0
    for p in _primes_upto(M):
        corr = float(_coset_correlations(sp, psi.coeffs, p).sum())
        lam[p] = corr / math.sqrt(p)
        pk, prev, cur = p * p, 1.0, lam[p]
        while pk <= M:
            if p == 2:
                nxt = cur * lam[2]
            else:
                nxt = lam[p] * cur - prev
            lam[pk] = nxt
            prev, cur = cur, nxt
            pk *= p
    # multiplicative fill: split off the lowest prime power
    spf = np.zeros(M + 1, dtype=np.int64)
    for p in _primes_upto(M):
        hits = np.arange(p, M + 1, p)
        spf[hits[spf[hits] == 0]] = p
    for n in range(2, M + 1):
        p = int(spf[n])
        q = p
        rest = n // p
        while rest % p == 0:
            q *= p
            rest //= p
        if rest > 1:
            lam[n] = lam[q] * lam[rest]
    return QExpansion(weight=2 * psi.ell + 2, level=2, normalization="hecke", a=lam[1:])


# ---------------------------------------------------------------------------
# CM theta series in exact arithmetic


@dataclass(frozen=True)
class CMFormSpec:
    """A class-number-one discriminant with an angular index.

    Elements of the order are written alpha = (u + v sqrt(-q))/2 in doubled
    integer coordinates, q = |D| or |D|/4.  The character alpha -> alpha^{2n}
    must be trivial on units, which constrains n for D = -3 and -4.
    """

    D: int
    n: int

    def __post_init__(self):
        if self.D not in CM_DISCRIMINANTS:
            raise ValueError(
                f"D = {self.D}: only class number one supported, D in {CM_DISCRIMINANTS}"
            )
        if self.n < 0:
            raise ValueError("angular index must be nonnegative")
        if self.D == -4 and self.n % 2 != 0:
            raise ValueError("D = -4 needs an even angular index (fourth roots of unity)")
        if self.D == -3 and self.n % 3 != 0:
            raise ValueError("D = -3 needs the index divisible by 3 (sixth roots of unity)")

    @property
    def weight(self) -> int:
        return 2 * self.n + 1

    @property
    def level(self) -> int:
        return -self.D

    @property
    def q(self) -> int:
        return -self.D // 4 if self.D % 4 == 0 else -self.D

    @property
    def unit_count(self) -> int:
        return {-3: 6, -4: 4}.get(self.D, 2)

    def in_fundamental_domain(self, u: int, v: int) -> bool:
        """One generator per nonzero principal ideal, in doubled coordinates."""
        if self.D == -4:
            return u > 0 and v >= 0
        if self.D == -3:
            return u > 0 and -u < 3 * v <= u
        return u > 0 or (u == 0 and v < 0)


def _complex_power_exact(re: Fraction, im: Fraction, q: int, k: int) -> tuple[Fraction, Fraction]:
    """(re + im*sqrt(-q))^k by square and multiply, exact."""
    rr, ri = Fraction(1), Fraction(0)
    br, bi = re, im
    while k:
        if k & 1:
            rr, ri = rr * br - q * ri * bi, rr * bi + ri * br
        br, bi = br * br - q * bi * bi, 2 * br * bi
        k >>= 1
    return rr, ri


def cm_coefficients_exact(D: int, n: int, M: int) -> list[Fraction]:
    """a_1..a_M of the CM theta series as exact rationals (in fact integers).

    a_m sums alpha^{2n} over the fundamental-domain generators of norm m;
    imaginary parts must cancel identically and this is asserted.
    """
    spec = CMFormSpec(D, n)
    if M < 1:
        raise ValueError("need at least one coefficient")
    q = spec.q
    acc_re = [Fraction(0) for _ in range(M + 1)]
    acc_im = [Fraction(0) for _ in range(M + 1)]
    step = 2 if D % 4 == 0 else 1
    u_max = math.isqrt(4 * M)
    for u in range(-u_max, u_max + 1):
        rem = 4 * M - u * u
        if rem < 0:
            continue
        v_max = math.isqrt(rem // q)
        for v in range(-v_max, v_max + 1):
            if step == 2:
                if u % 2 or v % 2:
                    continue
            elif (u - v) % 2:
                continue
            norm4 = u * u + q * v * v
            if norm4 == 0 or norm4 % 4:
                continue
            m = norm4 // 4
            if m > M or not spec.in_fundamental_domain(u, v):
                continue
            pr, pi = _complex_power_exact(Fraction(u, 2), Fraction(v, 2), q, 2 * n)
            acc_re[m] += pr
            acc_im[m] += pi
    for m in range(1, M + 1):
        assert acc_im[m] == 0, (D, n, m, acc_im[m])
        assert acc_re[m].denominator == 1, (D, n, m, acc_re[m])
    return acc_re[1:]


def cm_form(D: int, n: int, M: int) -> QExpansion:
    """CM theta series of weight 2n+1 and level |D| (class number one only)."""
    spec = CMFormSpec(D, n)
    exact = cm_coefficients_exact(D, n, M)
    return QExpansion(
        weight=spec.weight,
        level=spec.level,
        normalization="arithmetic",
        a=np.array([float(x) for x in exact]),
    )


# ---------------------------------------------------------------------------
# Quadratic character


def _jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n > 0."""
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker_chi(D: int, m: int) -> int:
    """Kronecker symbol (D/m) for m >= 0, the quadratic character mod |D|."""
    if m < 0:
        raise ValueError("nonnegative m only")
    if m == 0:
        return 0
    twos = 0
    while m % 2 == 0:
        m //= 2
        twos += 1
    if twos and D % 2 == 0:
        return 0
    at_two = 1 if D % 8 in (1, 7) else -1
    return (at_two**twos if twos else 1) * _jacobi(D, m)
