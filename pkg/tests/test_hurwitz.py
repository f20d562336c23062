"""Exact-arithmetic tests for the quaternion order layer."""

import math
from fractions import Fraction

import numpy as np
import pytest

from heckesphere.hurwitz import (
    HurwitzQuaternion,
    coset_representatives,
    enumerate_norm,
    norm_doubled_array,
    rotate,
    rotate_exact,
    rotation_matrices_for_norm,
    rotation_matrix,
    sigma_divisors,
    unit_rotation_matrices,
    units,
)

ONE = HurwitzQuaternion.from_integers(1, 0, 0, 0)
I = HurwitzQuaternion.from_integers(0, 1, 0, 0)
J = HurwitzQuaternion.from_integers(0, 0, 1, 0)
K = HurwitzQuaternion.from_integers(0, 0, 0, 1)


def random_element(rng) -> HurwitzQuaternion:
    d = rng.integers(-15, 16, size=4)
    if rng.integers(2):
        d = 2 * d + 1  # all-odd doubled coordinates
    else:
        d = 2 * d
    return HurwitzQuaternion(int(d[0]), int(d[1]), int(d[2]), int(d[3]))


def test_omega_is_a_unit():
    w = HurwitzQuaternion.omega()
    assert w.nrd() == 1
    assert w.trd() == 1


def test_quaternion_relations():
    assert I * J == K
    assert J * I == -K
    assert I * I == -ONE
    one_i = ONE + I
    one_j = ONE + J
    assert one_i.nrd() == 2
    assert (one_i * one_j).nrd() == 4


def test_conjugate_norm_identity():
    rng = np.random.default_rng(711)
    for _ in range(200):
        q = random_element(rng)
        prod = q * q.conjugate()
        assert prod == HurwitzQuaternion(2 * q.nrd(), 0, 0, 0)
        assert q.trd() == q.da


def test_norm_multiplicative():
    rng = np.random.default_rng(20260822)
    for _ in range(1000):
        p = random_element(rng)
        q = random_element(rng)
        assert (p * q).nrd() == p.nrd() * q.nrd()


def test_parity_validation():
    with pytest.raises(ValueError):
        HurwitzQuaternion(1, 0, 0, 0)  # mixed parity is not in the order


def test_unit_group():
    U = units()
    assert len(U) == 24
    uset = set(U)
    for name in (ONE, I, J, K):
        assert name in uset and -name in uset
    half = [u for u in U if u.da % 2 == 1]
    assert len(half) == 16
    for u in U:
        assert u.nrd() == 1
        assert u.conjugate() in uset  # inverse = conjugate at nrd 1
        for v in U:
            assert u * v in uset


def test_unit_rotation_matrices_form_tetrahedral_group():
    mats = unit_rotation_matrices()
    assert len(mats) == 12
    keys = {tuple(m.ravel()) for m in mats}
    assert len(keys) == 12
    assert tuple(np.eye(3, dtype=np.int64).ravel()) in keys
    for a in mats:
        assert round(float(np.linalg.det(a))) == 1
        for b in mats:
            assert tuple((a @ b).ravel()) in keys


@pytest.mark.parametrize("n,count", [(1, 24), (3, 96), (5, 144)])
def test_enumeration_examples(n, count):
    assert len(enumerate_norm(n)) == count


def test_counts_match_divisor_sum_and_box_scan():
    # independent route: plain parity-split box scan, |2a| <= 2 sqrt(n)
    nmax = 50
    half = int(2 * math.isqrt(nmax)) + 2
    even = np.arange(-half, half + 1, 2)
    odd = np.arange(-half + 1, half + 1, 2)
    totals = np.zeros(4 * (half + 1) ** 2 + 1, dtype=np.int64)
    for vals in (even, odd):
        g = np.meshgrid(vals, vals, vals, vals, indexing="ij")
        nrm = (g[0] ** 2 + g[1] ** 2 + g[2] ** 2 + g[3] ** 2) // 4
        totals += np.bincount(nrm.ravel(), minlength=totals.size)

    for n in range(1, nmax + 1, 2):
        expected = 24 * sigma_divisors(n)
        assert totals[n] == expected
        assert norm_doubled_array(n).shape[0] == expected


def test_enumeration_unit_stable():
    alphas = enumerate_norm(9)
    aset = set(alphas)
    for u in units():
        for a in alphas[:40]:
            assert u * a in aset


def test_rotate_generator_actions():
    v = (Fraction(3, 13), Fraction(4, 13), Fraction(12, 13))
    x, y, z = v
    assert rotate_exact(I, v) == (x, -y, -z)
    assert rotate_exact(J, v) == (-x, y, -z)
    assert rotate_exact(HurwitzQuaternion.omega(), v) == (z, x, y)
    assert rotate_exact(ONE, v) == v


def test_rotate_exact_is_exact_rational():
    rng = np.random.default_rng(5)
    for _ in range(50):
        q = random_element(rng)
        if q.is_zero():
            continue
        v = (Fraction(1, 3), Fraction(2, 3), Fraction(2, 3))
        w = rotate_exact(q, v)
        assert all(isinstance(c, Fraction) for c in w)
        assert sum(c * c for c in w) == 1


def test_rotate_preserves_orthonormal_triads():
    rng = np.random.default_rng(99)
    for _ in range(50):
        q = random_element(rng)
        if q.is_zero():
            continue
        m, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        if np.linalg.det(m) < 0:
            m[:, 0] = -m[:, 0]
        imgs = np.stack([rotate(q, m[:, c]) for c in range(3)], axis=1)
        assert np.allclose(imgs.T @ imgs, np.eye(3), atol=1e-12)
        assert np.linalg.det(imgs) > 0


def test_rotate_rejects_zero():
    with pytest.raises(ValueError):
        rotate(HurwitzQuaternion(0, 0, 0, 0), (1.0, 0.0, 0.0))


def test_rotation_matrix_consistent_with_rotate():
    rng = np.random.default_rng(31)
    for _ in range(25):
        q = random_element(rng)
        if q.is_zero():
            continue
        mat = rotation_matrix(q)
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        assert np.allclose(mat @ v, rotate(q, v), atol=1e-12)


def test_rotation_classes_for_norm():
    mats, counts = rotation_matrices_for_norm(3)
    assert counts.sum() == 96  # every quaternion accounted for
    assert mats.shape[0] == len({tuple(np.round(m, 9).ravel()) for m in mats})
    for m in mats:
        assert np.allclose(m @ m.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(m) > 0


@pytest.mark.parametrize("n", [1, 3, 5, 9, 15, 21, 25, 33])
def test_coset_representatives_partition(n):
    reps = coset_representatives(n)
    assert reps.shape[0] == sigma_divisors(n)
    seen = set()
    for row in reps:
        alpha = HurwitzQuaternion(*map(int, row))
        assert alpha.nrd() == n
        for u in units():
            seen.add(u * alpha)
    assert len(seen) == 24 * sigma_divisors(n)  # cosets are disjoint and cover


def test_rotation_matrices_norm_one_recover_units():
    mats, counts = rotation_matrices_for_norm(1)
    assert mats.shape[0] == 12
    assert counts.sum() == 24
    keys = {tuple(np.round(m).astype(np.int64).ravel()) for m in mats}
    unit_keys = {tuple(m.ravel()) for m in unit_rotation_matrices()}
    assert keys == unit_keys
