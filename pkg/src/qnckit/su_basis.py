"""Traceless Hermitian generator bases normalized to Tr(G_i G_j) = n d_ij,
and the bidirectional map between density matrices and coefficient (Bloch)
vectors.

Generator order is fixed to (symmetric off-diagonal, antisymmetric
off-diagonal, diagonal), each block in lexicographic index order; for n = 2
this is exactly (sigma_x, sigma_y, sigma_z).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .matrix_core import DensityMatrix


@dataclass(frozen=True)
class GeneratorBasis:
    dim: int
    generators: np.ndarray  # (dim^2 - 1, dim, dim), read-only

    def __post_init__(self):
        g = np.asarray(self.generators, dtype=np.complex128)
        g.setflags(write=False)
        object.__setattr__(self, "generators", g)

    def __len__(self) -> int:
        return self.generators.shape[0]


@lru_cache(maxsize=None)
def generator_basis(n: int) -> GeneratorBasis:
    """Generalized Gell-Mann basis of su(n), rescaled so Tr(G_i G_j) = n d_ij.

    The standard construction gives Tr(G^2) = 2; every generator is scaled
    by sqrt(n/2), which leaves n = 2 as the plain Pauli triple.
    """
    if n < 2:
        raise ValueError(f"generator basis needs dimension >= 2, got {n}")
    mats = []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=np.complex128)
            m[i, j] = 1.0
            m[j, i] = 1.0
            mats.append(m)
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=np.complex128)
            m[i, j] = -1.0j
            m[j, i] = 1.0j
            mats.append(m)
    for l in range(1, n):
        d = np.zeros(n, dtype=np.complex128)
        d[:l] = 1.0
        d[l] = -l
        mats.append(np.diag(d) * np.sqrt(2.0 / (l * (l + 1))))
    scale = np.sqrt(n / 2.0)
    return GeneratorBasis(dim=n, generators=scale * np.stack(mats))


def bloch_vector(rho: DensityMatrix, basis: GeneratorBasis | None = None) -> np.ndarray:
    """Coefficient vector r_k = Tr(rho G_k), length n^2 - 1."""
    basis = basis if basis is not None else generator_basis(rho.dim)
    if basis.dim != rho.dim:
        raise ValueError(f"basis dimension {basis.dim} != state dimension {rho.dim}")
    return np.einsum("kij,ji->k", basis.generators, rho.matrix).real


def bloch_vector_matrix(m: np.ndarray, basis: GeneratorBasis) -> np.ndarray:
    """Same contraction for a raw Hermitian matrix (no state validation)."""
    return np.einsum("kij,...ji->...k", basis.generators, m).real


def from_bloch(r, basis: GeneratorBasis) -> np.ndarray:
    """Hermitian unit-trace matrix (1/n)(I + sum_k r_k G_k).

    Positivity is not guaranteed for arbitrary coefficient vectors; validate
    through DensityMatrix when a state is required.
    """
    r = np.asarray(r, dtype=np.float64)
    n = basis.dim
    if r.shape != (n * n - 1,):
        raise ValueError(f"expected {n * n - 1} components, got shape {r.shape}")
    return (np.eye(n, dtype=np.complex128) + np.tensordot(r, basis.generators, axes=1)) / n
