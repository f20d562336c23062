"""Averaging operators on unit-invariant harmonics and their joint eigenbasis.

The n-th operator sends f to (1/24) sum over norm-n order elements gamma of
f(gamma . z). It preserves each degree-l space, commutes with the whole
family, and is self-adjoint, so the unit-invariant subspace carries a joint
eigenbasis. Matrices are assembled by exact-degree quadrature on the ambient
orthonormal basis and then compressed to the invariant block.

Eigenbases are computed from the n=3 operator, with ties refined by n=5, 7,
11, 13 in turn; surviving ties signal a numerical problem and raise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .harmonics import QuadratureGrid, SphericalFunction, basis_values
from .hurwitz import rotation_matrices_for_norm

__all__ = [
    "invariant_dimension",
    "HeckeSpace",
    "HeckeEigenfunction",
    "space",
    "clear_space_cache",
]

TIE_GAP = 1e-6
TIE_LADDER = (3, 5, 7, 11, 13)


def invariant_dimension(ell: int) -> int:
    """dim of the unit-invariant subspace of degree-ell harmonics.

    Character sum over the rotation image of the unit group (order 12: the
    identity, 8 order-3 rotations, 3 half turns):
    (1/12) [ (2l+1) + 8*chi_3(l) + 3*(-1)^l ], chi_3 = (1, 0, -1)[l mod 3].
    """
    if ell < 0:
        raise ValueError("degree must be nonnegative")
    chi3 = (1, 0, -1)[ell % 3]
    num = (2 * ell + 1) + 8 * chi3 + 3 * (-1) ** ell
    assert num % 12 == 0
    return num // 12


@dataclass
class HeckeEigenfunction:
    """Joint eigenvector: ambient coefficients plus the eigenvalues seen so far."""

    ell: int
    coeffs: np.ndarray = field(repr=False)
    block_coords: np.ndarray = field(repr=False)
    lambdas: dict[int, float] = field(default_factory=dict)

    def function(self) -> SphericalFunction:
        return SphericalFunction(self.ell, self.coeffs)

    def norm_sq(self) -> float:
        return float(self.coeffs @ self.coeffs)


class HeckeSpace:
    """Per-degree workspace: grid, ambient basis table, invariant block, operators."""

    def __init__(self, ell: int):
        if ell < 0:
            raise ValueError("degree must be nonnegative")
        self.ell = ell
        self.grid = QuadratureGrid(max(ell, 1))
        self._basis = basis_values(ell, self.grid.points)
        self._basis_w = self._basis * self.grid.weights[:, None]
        self._matrices: dict[int, np.ndarray] = {}
        self.projector = self._ambient_operator(1)
        evals, evecs = np.linalg.eigh((self.projector + self.projector.T) / 2.0)
        keep = evals > 0.5
        self.dim = int(keep.sum())
        assert self.dim == invariant_dimension(ell), (ell, self.dim)
        self.invariant_basis = evecs[:, keep]  # (2l+1, dim), orthonormal columns
        self._eigs: list[HeckeEigenfunction] | None = None

    def _ambient_operator(self, n: int) -> np.ndarray:
        """Matrix of the n-th averaging operator on the ambient orthonormal basis."""
        mats, counts = rotation_matrices_for_norm(n)
        acc = np.zeros_like(self._basis)
        for r in range(mats.shape[0]):
            acc += counts[r] * basis_values(self.ell, self.grid.points @ mats[r].T)
        return (self._basis_w.T @ acc) / 24.0

    def hecke_matrix(self, n: int) -> np.ndarray:
        """Invariant-block matrix of the n-th operator (n odd)."""
        if n < 1 or n % 2 == 0:
            raise ValueError("only odd n are defined here")
        if self.dim == 0:
            raise ValueError(f"degree {self.ell} has no invariant harmonics")
        if n not in self._matrices:
            v = self.invariant_basis
            t = v.T @ self._ambient_operator(n) @ v
            skew = np.max(np.abs(t - t.T)) if t.size else 0.0
            assert skew < 1e-10, (self.ell, n, skew)
            self._matrices[n] = (t + t.T) / 2.0
        return self._matrices[n].copy()

    def invariance_residual(self, coeffs: np.ndarray) -> float:
        """How far an ambient coefficient vector is from the invariant subspace."""
        c = np.asarray(coeffs, dtype=float)
        return float(np.linalg.norm(self.projector @ c - c))

    def rayleigh(self, psi: HeckeEigenfunction, n: int) -> float:
        v = psi.block_coords
        return float(v @ self.hecke_matrix(n) @ v)

    def eigenvalue(self, psi: HeckeEigenfunction, n: int) -> float:
        if n not in psi.lambdas:
            psi.lambdas[n] = self.rayleigh(psi, n)
        return psi.lambdas[n]

    def eigenfunctions(self) -> list[HeckeEigenfunction]:
        """Joint eigenbasis, ordered by eigenvalue labels, sign-normalized."""
        if self._eigs is None:
            self._eigs = self._diagonalize()
        return self._eigs

    def _diagonalize(self) -> list[HeckeEigenfunction]:
        if self.dim == 0:
            return []
        block = np.eye(self.dim)
        labels: list[tuple[float, ...]] = [()] * self.dim
        used: list[int] = []
        for n in TIE_LADDER:
            clusters = _tied_clusters(labels)
            if not clusters:
                break
            tn = self.hecke_matrix(n)
            used.append(n)
            for idx in clusters:
                w = block[:, idx]
                sub = w.T @ tn @ w
                vals, vecs = np.linalg.eigh((sub + sub.T) / 2.0)
                block[:, idx] = w @ vecs
                for pos, i in enumerate(idx):
                    labels[i] = labels[i] + (float(vals[pos]),)
            # refresh labels of untouched columns so cluster detection stays aligned
            for i in range(self.dim):
                if len(labels[i]) < len(used):
                    v = block[:, i]
                    labels[i] = labels[i] + (float(v @ tn @ v),)
        if _tied_clusters(labels):
            raise RuntimeError(
                f"degree {self.ell}: eigenvalue labels still tied after operators {used}"
            )
        order = np.lexsort(np.array(labels).T[::-1]) if used else np.arange(self.dim)
        out = []
        for i in order:
            v = block[:, i]
            c = self.invariant_basis @ v
            c = c / np.linalg.norm(c)
            if c[int(np.argmax(np.abs(c)))] < 0:
                c = -c
            psi = HeckeEigenfunction(
                ell=self.ell,
                coeffs=c,
                block_coords=self.invariant_basis.T @ c,
                lambdas={},
            )
            for pos, n in enumerate(used):
                psi.lambdas[n] = labels[i][pos]
            out.append(psi)
        return out


def _tied_clusters(labels: list[tuple[float, ...]]) -> list[list[int]]:
    """Groups of indices whose label tuples coincide within the gap threshold."""
    order = sorted(range(len(labels)), key=lambda i: labels[i])
    clusters = []
    cur = [order[0]] if order else []
    for prev, nxt in zip(order, order[1:]):
        close = len(labels[prev]) == len(labels[nxt]) and all(
            abs(a - b) < TIE_GAP for a, b in zip(labels[prev], labels[nxt])
        )
        if close:
            cur.append(nxt)
        else:
            if len(cur) > 1:
                clusters.append(cur)
            cur = [nxt]
    if len(cur) > 1:
        clusters.append(cur)
    return clusters


_SPACES: dict[int, HeckeSpace] = {}


def space(ell: int) -> HeckeSpace:
    """Shared per-degree workspace (basis tables and small operator matrices)."""
    if ell not in _SPACES:
        _SPACES[ell] = HeckeSpace(ell)
    return _SPACES[ell]


def clear_space_cache():
    _SPACES.clear()
