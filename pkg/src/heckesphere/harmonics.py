"""Real spherical harmonics in Legendre form, with exact product quadrature.

Degree-l harmonics are spanned by the 2l+1 functions

    P_l(cos phi),  P_l^m(cos phi) cos(m theta),  P_l^m(cos phi) sin(m theta)

for m = 1..l, in coordinates (x, y, z) = (sin phi cos theta, sin phi sin theta,
cos phi). Associated Legendre functions carry the Condon-Shortley factor
(-1)^m and are evaluated by three-term recurrences. Surface measure is the
unnormalized area element (total mass 4*pi); "normalized" basis functions are
scaled to unit L^2 norm against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "legendre",
    "assoc_legendre",
    "legendre_row",
    "log_norm_sq",
    "basis",
    "BasisFunction",
    "QuadratureGrid",
    "basis_values",
    "SphericalFunction",
    "inner_product",
    "equator_value",
    "equator_envelope",
]


def _as_x_array(x):
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) > 1 + 1e-12):
        raise ValueError("argument outside [-1, 1]")
    return np.clip(arr, -1.0, 1.0)


def legendre(n: int, x):
    """Legendre polynomial P_n(x) by the (n+1)P_{n+1} = (2n+1)xP_n - nP_{n-1} recurrence."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    scalar = np.ndim(x) == 0
    arr = np.atleast_1d(_as_x_array(x))
    p = np.ones_like(arr)
    if n > 0:
        p_prev, p = p, arr.copy()
        for k in range(1, n):
            p, p_prev = ((2 * k + 1) * arr * p - k * p_prev) / (k + 1), p
    return float(p[0]) if scalar else p


def legendre_row(ell: int, x: np.ndarray) -> np.ndarray:
    """P_ell^m(x) for m = 0..ell as an (ell+1, len(x)) array.

    Runs the diagonal recurrence P_m^m = -(2m-1) sqrt(1-x^2) P_{m-1}^{m-1}
    followed by upward degree recurrences
    (n-m) P_n^m = (2n-1) x P_{n-1}^m - (n+m-1) P_{n-2}^m, which are stable and
    carry the Condon-Shortley sign.
    """
    if ell < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    s = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    out = np.empty((ell + 1, x.size), dtype=float)
    pmm = np.ones_like(x)
    for m in range(ell + 1):
        if m > 0:
            pmm = -(2 * m - 1) * s * pmm
        if m == ell:
            out[m] = pmm
            break
        p_prev = pmm
        p = (2 * m + 1) * x * pmm
        for n in range(m + 2, ell + 1):
            p, p_prev = ((2 * n - 1) * x * p - (n + m - 1) * p_prev) / (n - m), p
        out[m] = p
    return out


def assoc_legendre(n: int, m: int, x):
    """Associated Legendre P_n^m(x), Condon-Shortley convention."""
    if n < 0 or m < 0 or m > n:
        raise ValueError("need 0 <= m <= n")
    arr = _as_x_array(x)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    val = legendre_row(n, arr)[m]
    return float(val[0]) if scalar else val


def log_norm_sq(ell: int, m: int) -> float:
    """log of the squared surface L^2 norm of the degree-ell, order-m basis function.

    Zonal (m=0): 4*pi/(2l+1).  m>0: 2*pi/(2l+1) * (l+m)!/(l-m)!.
    Computed in log space so large l stays finite.
    """
    if m < 0 or m > ell:
        raise ValueError("need 0 <= m <= ell")
    base = math.log(2.0 * math.pi) - math.log(2 * ell + 1)
    if m == 0:
        return base + math.log(2.0)
    return base + math.lgamma(ell + m + 1) - math.lgamma(ell - m + 1)


@dataclass(frozen=True)
class BasisFunction:
    """Label of one real basis harmonic: kind is 'zonal', 'cos' or 'sin'."""

    ell: int
    m: int
    kind: str

    def index(self) -> int:
        if self.kind == "zonal":
            return 0
        return 2 * self.m - 1 if self.kind == "cos" else 2 * self.m


def basis(ell: int) -> list[BasisFunction]:
    """The 2*ell+1 basis labels for degree ell, in column order."""
    if ell < 0:
        raise ValueError("degree must be nonnegative")
    out = [BasisFunction(ell, 0, "zonal")]
    for m in range(1, ell + 1):
        out.append(BasisFunction(ell, m, "cos"))
        out.append(BasisFunction(ell, m, "sin"))
    return out


class QuadratureGrid:
    """Product quadrature on the sphere: Gauss-Legendre in cos(phi), uniform in theta.

    ell_max + 1 Gauss nodes integrate polynomials in cos(phi) up to degree
    2*ell_max + 1 exactly; 2*ell_max + 2 equispaced theta nodes handle
    trigonometric degree up to 2*ell_max + 1. The grid is therefore exact for
    products of two harmonics of degree <= ell_max. Weights sum to 4*pi.
    """

    def __init__(self, ell_max: int):
        if ell_max < 0:
            raise ValueError("ell_max must be nonnegative")
        self.ell_max = ell_max
        self.exact_degree = 2 * ell_max + 1
        nodes, weights = np.polynomial.legendre.leggauss(ell_max + 1)
        ntheta = 2 * ell_max + 2
        self.x = nodes  # cos(phi)
        self.theta = 2.0 * np.pi * np.arange(ntheta) / ntheta
        # full weight per (x_i, theta_t) node
        self.weights = np.repeat(weights * (2.0 * np.pi / ntheta), ntheta)
        sin_phi = np.sqrt(1.0 - nodes**2)
        xs = np.outer(sin_phi, np.cos(self.theta)).ravel()
        ys = np.outer(sin_phi, np.sin(self.theta)).ravel()
        zs = np.repeat(nodes, ntheta)
        self.points = np.column_stack([xs, ys, zs])

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weights @ values)


def basis_values(ell: int, points: np.ndarray, normalized: bool = True) -> np.ndarray:
    """Evaluate the degree-ell basis at an (N, 3) array of unit vectors.

    Returns an (N, 2*ell+1) matrix in `basis(ell)` column order. With
    normalized=True each column has unit surface L^2 norm.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must be an (N, 3) array")
    ct = np.clip(pts[:, 2], -1.0, 1.0)
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    rows = legendre_row(ell, ct)
    out = np.empty((pts.shape[0], 2 * ell + 1))
    scale0 = math.exp(-0.5 * log_norm_sq(ell, 0)) if normalized else 1.0
    out[:, 0] = rows[0] * scale0
    for m in range(1, ell + 1):
        scale = math.exp(-0.5 * log_norm_sq(ell, m)) if normalized else 1.0
        pm = rows[m] * scale
        out[:, 2 * m - 1] = pm * np.cos(m * theta)
        out[:, 2 * m] = pm * np.sin(m * theta)
    return out


@dataclass
class SphericalFunction:
    """Real harmonic of fixed degree, as coefficients over the normalized basis."""

    ell: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (2 * self.ell + 1,):
            raise ValueError("coefficient vector must have length 2*ell+1")

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        vals = basis_values(self.ell, pts) @ self.coeffs
        return vals if np.asarray(points).ndim == 2 else float(vals[0])

    def norm_sq(self) -> float:
        return float(self.coeffs @ self.coeffs)


def inner_product(f, g, grid: QuadratureGrid) -> float:
    """Surface inner product by quadrature; needs grid exactness >= deg f + deg g."""
    ell_f = getattr(f, "ell", None)
    ell_g = getattr(g, "ell", None)
    if ell_f is not None and ell_g is not None and ell_f + ell_g > grid.exact_degree:
        raise ValueError("grid is not exact for this product degree")
    return grid.integrate(f(grid.points) * g(grid.points))


def _log_catalan(m: int) -> float:
    # C_m = (2m)! / (m! (m+1)!)
    return math.lgamma(2 * m + 1) - math.lgamma(m + 1) - math.lgamma(m + 2)


def equator_value(ell: int, n: int) -> float:
    """Value at the equator of the unit-L^2-normalized order-n Legendre harmonic.

    This is P_ell^n(0) divided by the surface norm of p -> P_ell^n(cos phi).
    Parity makes it vanish for odd ell + n; otherwise it equals

        (-1)^((ell+n)/2) * sqrt((2l+1)(l+n+2)(l-n+2) C_{(l+n)/2} C_{(l-n)/2})
        / (2^(l+2) sqrt(pi))

    with Catalan numbers C, evaluated in log space.
    """
    if n < 0 or n > ell:
        raise ValueError("need 0 <= n <= ell")
    if (ell + n) % 2 == 1:
        return 0.0
    a, b = (ell + n) // 2, (ell - n) // 2
    log_val = 0.5 * (
        math.log(2 * ell + 1)
        + math.log(ell + n + 2)
        + math.log(ell - n + 2)
        + _log_catalan(a)
        + _log_catalan(b)
    ) - (ell + 2) * math.log(2.0) - 0.5 * math.log(math.pi)
    sign = -1.0 if a % 2 else 1.0
    return sign * math.exp(log_val)


def equator_envelope(ell: int, n: int) -> float:
    """Reference envelope sqrt(l) * (1+l+n)^(-1/4) * (1+l-n)^(-1/4) for |equator_value|."""
    if n < 0 or n > ell:
        raise ValueError("need 0 <= n <= ell")
    return math.sqrt(ell) * (1 + ell + n) ** -0.25 * (1 + ell - n) ** -0.25
