"""Oracle tests for Legendre evaluation, sphere quadrature, and equator values."""

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from heckesphere.harmonics import (
    QuadratureGrid,
    SphericalFunction,
    assoc_legendre,
    basis,
    basis_values,
    equator_envelope,
    equator_value,
    inner_product,
    legendre,
    legendre_row,
    log_norm_sq,
)

RATIONAL_SAMPLES = [Fraction(k, 13) for k in range(-12, 13)]  # 25 points in (-1,1)


def test_legendre_at_one():
    for n in range(61):
        assert legendre(n, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_legendre_simple_values():
    assert legendre(2, 0.0) == pytest.approx(-0.5, abs=1e-15)
    assert assoc_legendre(1, 1, 0.0) == pytest.approx(-1.0, abs=1e-15)


def test_domain_errors():
    with pytest.raises(ValueError):
        legendre(3, 1.5)
    with pytest.raises(ValueError):
        assoc_legendre(2, 3, 0.0)


@pytest.mark.parametrize("n", range(13))
def test_legendre_against_symbolic_rodrigues(n):
    x = sympy.symbols("x")
    expr = sympy.legendre(n, x)
    for r in RATIONAL_SAMPLES:
        exact = float(expr.subs(x, sympy.Rational(r.numerator, r.denominator)))
        assert legendre(n, float(r)) == pytest.approx(exact, abs=1e-12)


@pytest.mark.parametrize("n", range(1, 13))
def test_assoc_legendre_against_symbolic(n):
    # sympy's assoc_legendre carries the same Condon-Shortley sign
    x = sympy.symbols("x")
    for m in range(n + 1):
        expr = sympy.assoc_legendre(n, m, x)
        for r in RATIONAL_SAMPLES[::3]:
            exact = float(expr.subs(x, sympy.Rational(r.numerator, r.denominator)))
            assert assoc_legendre(n, m, float(r)) == pytest.approx(
                exact, abs=1e-12 * max(1.0, abs(exact))
            )


def test_legendre_row_matches_pointwise():
    xs = np.linspace(-0.95, 0.95, 7)
    rows = legendre_row(9, xs)
    for m in range(10):
        for i, xv in enumerate(xs):
            assert rows[m, i] == pytest.approx(assoc_legendre(9, m, xv), rel=1e-13)


def _double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def test_quadrature_total_mass():
    grid = QuadratureGrid(12)
    assert grid.weights.sum() == pytest.approx(4 * math.pi, rel=1e-14)


def test_quadrature_monomials_exact():
    # closed form: int x^a y^b z^c dsigma over S^2, zero unless all exponents even
    grid = QuadratureGrid(6)
    pts, w = grid.points, grid.weights
    for a in range(7):
        for b in range(7 - a):
            for c in range(7 - a - b):
                val = float(w @ (pts[:, 0] ** a * pts[:, 1] ** b * pts[:, 2] ** c))
                if a % 2 or b % 2 or c % 2:
                    expected = 0.0
                else:
                    expected = (
                        4
                        * math.pi
                        * _double_factorial(a - 1)
                        * _double_factorial(b - 1)
                        * _double_factorial(c - 1)
                        / _double_factorial(a + b + c + 1)
                    )
                assert val == pytest.approx(expected, abs=1e-12 * 4 * math.pi)


@pytest.mark.parametrize("ell", [0, 1, 2, 3, 5, 8, 25, 40])
def test_gram_matrix(ell):
    grid = QuadratureGrid(max(ell, 1))
    bv = basis_values(ell, grid.points, normalized=False)
    gram = (bv * grid.weights[:, None]).T @ bv
    off = gram - np.diag(np.diag(gram))
    assert np.max(np.abs(off)) < 1e-10 * max(1.0, np.max(np.abs(np.diag(gram))))
    col = 0
    for m in range(ell + 1):
        expected = math.exp(log_norm_sq(ell, m))
        reps = 1 if m == 0 else 2
        for _ in range(reps):
            assert gram[col, col] == pytest.approx(expected, rel=1e-10)
            col += 1

    bvn = basis_values(ell, grid.points, normalized=True)
    gram_n = (bvn * grid.weights[:, None]).T @ bvn
    assert np.allclose(gram_n, np.eye(2 * ell + 1), atol=1e-10)


def test_basis_labels():
    labels = basis(4)
    assert len(labels) == 9
    assert labels[0].kind == "zonal"
    kinds = [b.kind for b in labels[1:]]
    assert kinds == ["cos", "sin"] * 4
    for pos, b in enumerate(labels):
        assert b.index() == pos


def test_spherical_function_eval_and_parity():
    rng = np.random.default_rng(17)
    for ell in (3, 4, 7):
        f = SphericalFunction(ell, rng.standard_normal(2 * ell + 1))
        pts = rng.standard_normal((20, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        vals = f(pts)
        anti = f(-pts)
        assert np.allclose(anti, (-1.0) ** ell * vals, atol=1e-10)
        one = f(pts[0])
        assert one == pytest.approx(vals[0], rel=1e-14)


def test_inner_product_requires_exact_grid():
    f = SphericalFunction(6, np.eye(13)[0])
    with pytest.raises(ValueError):
        inner_product(f, f, QuadratureGrid(5))
    grid = QuadratureGrid(6)
    assert inner_product(f, f, grid) == pytest.approx(1.0, rel=1e-12)


def test_equator_value_parity_zeros_exact():
    for ell in range(0, 41):
        for n in range(ell + 1):
            if (ell + n) % 2 == 1:
                assert equator_value(ell, n) == 0.0


def test_equator_value_example():
    assert equator_value(1, 1) == pytest.approx(-math.sqrt(6) / (4 * math.sqrt(math.pi)), rel=1e-14)


def test_equator_value_against_quadrature_normalization():
    # independent route: normalize p -> P_ell^n(<p, e_z>) by its quadrature norm
    grid = QuadratureGrid(60)
    ct = np.clip(grid.points[:, 2], -1.0, 1.0)
    for ell in range(61):
        rows = legendre_row(ell, ct)
        p0_row = legendre_row(ell, np.array([0.0]))
        for n in range(ell + 1):
            if (ell + n) % 2 == 1:
                continue
            norm_sq = float(grid.weights @ rows[n] ** 2)
            oracle = float(p0_row[n, 0]) / math.sqrt(norm_sq)
            assert equator_value(ell, n) == pytest.approx(oracle, rel=1e-10)


def test_equator_value_envelope_window():
    for ell in range(1, 61):
        for n in range(ell % 2, ell + 1, 2):
            ratio = abs(equator_value(ell, n)) / equator_envelope(ell, n)
            assert 0.2 <= ratio <= 5.0, (ell, n, ratio)
