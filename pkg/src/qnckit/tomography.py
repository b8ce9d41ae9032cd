"""Exact state reconstruction from projective expectation statistics.

Each matrix entry is pinned by confining the measurement ket to a
two-dimensional basis subspace and querying three settings: the bare basis
state, the balanced real superposition, and the balanced imaginary
superposition.  The query budget is exactly n + 3*n*(n-1)/2 calls: one per
diagonal entry plus three per off-diagonal pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .matrix_core import ContractViolation, DensityMatrix, trace_norm
from .measurement import MeasurementParams, basis_params, ket_from_params, subspace_params

POSITIVITY_SLACK = 1e-8


@dataclass(frozen=True)
class ExpectationOracle:
    """Query function params -> Tr(M(params) rho) in [0, 1]."""

    dim: int
    query: Callable[[MeasurementParams], float]


@dataclass(frozen=True)
class ConditionalOracle:
    """Query function params(on A) -> Tr_A(M_A rho_AB), a Hermitian block."""

    dims: tuple[int, int]
    query: Callable[[MeasurementParams], np.ndarray]


def oracle_from_state(rho: DensityMatrix) -> ExpectationOracle:
    """Simulated oracle evaluating Tr(M rho) exactly."""
    mat = rho.matrix

    def query(p: MeasurementParams) -> float:
        v = ket_from_params(p)
        return float(np.real(np.vdot(v, mat @ v)))

    return ExpectationOracle(dim=rho.dim, query=query)


def conditional_oracle_from_state(rho: DensityMatrix) -> ConditionalOracle:
    """Simulated operator-valued oracle for a bipartite state."""
    n_a, n_b = rho.require_split()
    blocks = rho.matrix.reshape(n_a, n_b, n_a, n_b)

    def query(p: MeasurementParams) -> np.ndarray:
        v = ket_from_params(p)
        # Tr_A((M x I) rho) = sum_{a,a'} psi_a' conj(psi_a) <a|rho|a'>_A
        return np.einsum("a,c,abcd->bd", v.conj(), v, blocks)

    return ConditionalOracle(dims=(n_a, n_b), query=query)


def _pair_settings(i: int, j: int, n: int) -> tuple[MeasurementParams, MeasurementParams, MeasurementParams]:
    fam = subspace_params(i, j, n)
    bare = fam.params(0.0, 0.0)                       # |i>
    plus = fam.params(math.pi / 4.0, 0.0)             # (|i> + |j>)/sqrt(2)
    imag = fam.params(math.pi / 4.0, math.pi / 2.0)   # (|i> + i|j>)/sqrt(2)
    return bare, plus, imag


def reconstruct_state(oracle: ExpectationOracle, n: int) -> DensityMatrix:
    """Assemble the density matrix pinned by the subspace query protocol.

    Raises ContractViolation when the assembled matrix violates positivity
    beyond 1e-8 (inconsistent oracle).
    """
    rho = np.zeros((n, n), dtype=np.complex128)
    diag = np.zeros(n)
    for i in range(1, n + 1):
        diag[i - 1] = oracle.query(basis_params(i, n))
        rho[i - 1, i - 1] = diag[i - 1]
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            bare, plus, imag = _pair_settings(i, j, n)
            oracle.query(bare)  # protocol includes the bare setting per pair
            q_plus = oracle.query(plus)
            q_imag = oracle.query(imag)
            half = (diag[i - 1] + diag[j - 1]) / 2.0
            re = q_plus - half
            im = half - q_imag
            rho[i - 1, j - 1] = re + 1j * im
            rho[j - 1, i - 1] = re - 1j * im
    w = np.linalg.eigvalsh(rho)
    if w[0] < -POSITIVITY_SLACK:
        raise ContractViolation(
            f"assembled matrix is not positive (min eigenvalue {w[0]:.3e}); oracle inconsistent"
        )
    return DensityMatrix(rho)


def reconstruct_bipartite(oracle: ConditionalOracle, n_a: int, n_b: int) -> DensityMatrix:
    """Assemble a bipartite state from operator-valued A-side statistics.

    The bare query returns the diagonal block <i|rho|i>_A; the two balanced
    superpositions pin the Hermitian and anti-Hermitian combinations of the
    off-diagonal blocks.
    """
    blocks = np.zeros((n_a, n_a, n_b, n_b), dtype=np.complex128)
    for i in range(1, n_a + 1):
        blocks[i - 1, i - 1] = oracle.query(basis_params(i, n_a))
    for i in range(1, n_a + 1):
        for j in range(i + 1, n_a + 1):
            bare, plus, imag = _pair_settings(i, j, n_a)
            oracle.query(bare)
            n_plus = oracle.query(plus)
            n_imag = oracle.query(imag)
            half = (blocks[i - 1, i - 1] + blocks[j - 1, j - 1]) / 2.0
            sym = 2.0 * n_plus - 2.0 * half          # B_ij + B_ji
            anti = -1j * (2.0 * n_imag - 2.0 * half)  # B_ij - B_ji
            blocks[i - 1, j - 1] = (sym + anti) / 2.0
            blocks[j - 1, i - 1] = (sym - anti) / 2.0
    rho = blocks.transpose(0, 2, 1, 3).reshape(n_a * n_b, n_a * n_b)
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)
    if w[0] < -POSITIVITY_SLACK:
        raise ContractViolation(
            f"assembled matrix is not positive (min eigenvalue {w[0]:.3e}); oracle inconsistent"
        )
    return DensityMatrix(rho, split=(n_a, n_b))


def states_equal_by_statistics(
    o1: ExpectationOracle, o2: ExpectationOracle, n: int, grid_size: int = 0
) -> bool:
    """True iff the two statistics describe the same state (trace norm 1e-8).

    ``grid_size`` adds that many direct spot checks per subspace pair on a
    uniform grid of mixing angles before the reconstructions are compared.
    """
    if o1.dim != o2.dim or o1.dim != n:
        raise ValueError("oracle dimensions disagree")
    if grid_size > 0:
        mix = np.linspace(0.0, math.pi / 2.0, grid_size)
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                fam = subspace_params(i, j, n)
                for t in mix:
                    p = fam.params(float(t), 0.0)
                    if abs(o1.query(p) - o2.query(p)) > 1e-8:
                        return False
    r1 = reconstruct_state(o1, n)
    r2 = reconstruct_state(o2, n)
    return trace_norm(r1.matrix - r2.matrix) <= 1e-8
