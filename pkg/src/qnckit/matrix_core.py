"""Complex-matrix foundation: density matrices, tensor products, partial
traces, trace norms, entropy, and local-unitary operations.

All values are immutable after construction and every operation is a pure
function, so everything here is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10
WEIGHT_TOL = 1e-12


class ContractViolation(ValueError):
    """An input breaks a numerical contract (hermiticity, unitarity, ...)."""


def _as_complex_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite complex matrix.

    ``split`` optionally tags the state as bipartite with subsystem
    dimensions ``(n_a, n_b)``, ``n_a * n_b == dim``.  Inputs failing the
    hermiticity/trace/positivity contracts are rejected, not repaired.
    """

    matrix: np.ndarray
    split: tuple[int, int] | None = None

    def __post_init__(self):
        m = _as_complex_matrix(self.matrix)
        herm = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if herm > HERMITICITY_TOL:
            raise ContractViolation(f"not Hermitian: max |m - m^dag| = {herm:.3e}")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ContractViolation(f"trace is {tr:.12g}, expected 1")
        w = np.linalg.eigvalsh(m)
        if w[0] < -POSITIVITY_TOL:
            raise ContractViolation(f"not positive semidefinite: min eigenvalue = {w[0]:.3e}")
        if self.split is not None:
            n_a, n_b = self.split
            if n_a < 1 or n_b < 1 or n_a * n_b != m.shape[0]:
                raise ValueError(f"split {self.split} incompatible with dimension {m.shape[0]}")
            object.__setattr__(self, "split", (int(n_a), int(n_b)))
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def require_split(self) -> tuple[int, int]:
        if self.split is None:
            raise ValueError("operation requires a bipartite dimension split")
        return self.split

    @classmethod
    def from_ket(cls, ket, split: tuple[int, int] | None = None) -> "DensityMatrix":
        v = np.asarray(ket, dtype=np.complex128).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), split=split)

    @classmethod
    def maximally_mixed(cls, dim: int, split: tuple[int, int] | None = None) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=np.complex128) / dim, split=split)

    def with_split(self, n_a: int, n_b: int) -> "DensityMatrix":
        return DensityMatrix(self.matrix, split=(n_a, n_b))


def kron(a, b) -> np.ndarray:
    """Tensor product of two matrices (dimensions multiply)."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def partial_trace_matrix(m: np.ndarray, dims: tuple[int, int], traced: str) -> np.ndarray:
    """Partial trace of a raw (not necessarily normalized) bipartite matrix.

    ``traced`` names the subsystem summed out, ``"A"`` or ``"B"``.
    """
    n_a, n_b = dims
    r = np.asarray(m, dtype=np.complex128).reshape(n_a, n_b, n_a, n_b)
    if traced == "A":
        return np.einsum("abad->bd", r)
    if traced == "B":
        return np.einsum("abcb->ac", r)
    raise ValueError(f"traced subsystem must be 'A' or 'B', got {traced!r}")


def partial_trace(rho: DensityMatrix, traced: str) -> DensityMatrix:
    """Reduced state after tracing out subsystem ``traced`` ('A' or 'B')."""
    dims = rho.require_split()
    return DensityMatrix(partial_trace_matrix(rho.matrix, dims, traced))


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    a = _as_complex_matrix(m)
    herm = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if herm > HERMITICITY_TOL:
        raise ContractViolation(f"trace_norm requires a Hermitian input, deviation {herm:.3e}")
    return float(np.sum(np.abs(np.linalg.eigvalsh(a))))


def trace_norm_batch(stack: np.ndarray) -> np.ndarray:
    """Trace norms of a stack (..., n, n) of Hermitian matrices.

    No hermiticity check; callers pass matrices Hermitian by construction.
    For 2x2 inputs the eigenvalues h/2 +- sqrt(h^2/4 - det) are evaluated in
    closed form: the norm is 2 * max(|h|/2, sqrt(h^2/4 - det)).
    """
    if stack.shape[-1] == 2:
        half_tr = (stack[..., 0, 0].real + stack[..., 1, 1].real) / 2.0
        det = stack[..., 0, 0].real * stack[..., 1, 1].real - np.abs(stack[..., 0, 1]) ** 2
        s = np.sqrt(np.maximum(half_tr**2 - det, 0.0))
        return 2.0 * np.maximum(np.abs(half_tr), s)
    h = (stack + np.conj(np.swapaxes(stack, -1, -2))) / 2.0
    return np.sum(np.abs(np.linalg.eigvalsh(h)), axis=-1)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Base-2 entropy of the eigenvalue spectrum, with 0 log 0 := 0."""
    w = np.linalg.eigvalsh(rho.matrix)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def _check_unitary(u, dim: int, label: str) -> np.ndarray:
    a = _as_complex_matrix(u)
    if a.shape[0] != dim:
        raise ValueError(f"{label} has dimension {a.shape[0]}, expected {dim}")
    dev = np.max(np.abs(a.conj().T @ a - np.eye(dim)))
    if dev > HERMITICITY_TOL:
        raise ContractViolation(f"{label} is not unitary: max |u^dag u - I| = {dev:.3e}")
    return a


def apply_local_unitary(rho: DensityMatrix, u_a=None, u_b=None) -> DensityMatrix:
    """Conjugate a bipartite state by ``u_a (x) u_b`` (identity where None)."""
    n_a, n_b = rho.require_split()
    ua = np.eye(n_a, dtype=np.complex128) if u_a is None else _check_unitary(u_a, n_a, "u_a")
    ub = np.eye(n_b, dtype=np.complex128) if u_b is None else _check_unitary(u_b, n_b, "u_b")
    u = kron(ua, ub)
    return DensityMatrix(u @ rho.matrix @ u.conj().T, split=rho.split)


def mix_local_unitaries(rho: DensityMatrix, weights, unitaries, side: str = "A") -> DensityMatrix:
    """Convex mixture of one-sided unitary conjugations of ``rho``.

    ``weights`` must be nonnegative and sum to 1 within 1e-12; every
    unitary acts on the subsystem named by ``side``.
    """
    n_a, n_b = rho.require_split()
    lam = np.asarray(weights, dtype=np.float64)
    if lam.ndim != 1 or len(lam) != len(unitaries):
        raise ValueError("weights and unitaries must have matching lengths")
    if np.any(lam < -WEIGHT_TOL):
        raise ContractViolation(f"negative mixture weight: {lam.min():.3e}")
    if abs(lam.sum() - 1.0) > WEIGHT_TOL:
        raise ContractViolation(f"mixture weights sum to {lam.sum():.12g}, expected 1")
    if side not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    out = np.zeros_like(rho.matrix)
    for w, u in zip(lam, unitaries):
        if side == "A":
            full = kron(_check_unitary(u, n_a, "unitary"), np.eye(n_b))
        else:
            full = kron(np.eye(n_a), _check_unitary(u, n_b, "unitary"))
        out = out + w * (full @ rho.matrix @ full.conj().T)
    return DensityMatrix(out, split=rho.split)


def swap_split(rho: DensityMatrix) -> DensityMatrix:
    """Exchange the two subsystems of a bipartite state."""
    n_a, n_b = rho.require_split()
    m = rho.matrix.reshape(n_a, n_b, n_a, n_b).transpose(1, 0, 3, 2).reshape(rho.dim, rho.dim)
    return DensityMatrix(m, split=(n_b, n_a))


# ---------------------------------------------------------------------------
# Random sampling helpers (Haar unitaries, Ginibre states, isometries)
# ---------------------------------------------------------------------------

def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density_matrix(
    dim: int,
    rng: np.random.Generator,
    rank: int | None = None,
    split: tuple[int, int] | None = None,
) -> DensityMatrix:
    """Random mixed state of the given rank (full rank by default)."""
    k = dim if rank is None else rank
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, split=split)


def random_pure_density(
    dim: int, rng: np.random.Generator, split: tuple[int, int] | None = None
) -> DensityMatrix:
    """Haar-random pure state as a rank-one density matrix."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return DensityMatrix.from_ket(v, split=split)


def random_isometry(rows: int, cols: int, rng: np.random.Generator, real: bool = False) -> np.ndarray:
    """Random matrix with orthonormal columns (rows >= cols)."""
    if rows < cols:
        raise ValueError(f"isometry needs rows >= cols, got {rows} < {cols}")
    if real:
        z = rng.standard_normal((rows, cols)).astype(np.complex128)
    else:
        z = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    phase = np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1.0)), 1.0)
    return q * phase.conj()
