"""Pure-state decompositions, productization, and the entanglement gap E.

Every m-term pure-state decomposition of a rank-r mixed state arises from an
m x r matrix V with orthonormal columns acting on the eigendecomposition:
|psi_i~> = sum_j V_ij sqrt(lambda_j) |e_j>.  The productization of a
decomposition replaces each term by the product of its marginals; E is the
strength of the state minus the largest strength any productization attains
(a non-certified search, reported as such).  The entropy variant minimizes
the productization entropy instead.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .matrix_core import (
    ContractViolation,
    DensityMatrix,
    kron,
    partial_trace_matrix,
    random_isometry,
    von_neumann_entropy,
)
from .strength import IntegratorConfig, strength

RANK_TOL = 1e-10
ENTANGLEMENT_SCALE = 1.0  # the constant C multiplying the gap
_WEIGHT_DROP = 1e-12


@dataclass(frozen=True)
class Decomposition:
    """Weights and pure bipartite states summing to a source mixed state."""

    weights: np.ndarray
    states: tuple[DensityMatrix, ...]
    isometry: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class OptimizerConfig:
    """Derivative-free search settings for the decomposition optimization."""

    restarts: int = 16
    seed: int = 0
    m_max: int | None = None      # defaults to rank^2
    max_evals: int = 300          # objective evaluations per restart
    coarse_grid: int = 32         # inner-loop quadrature resolution


@dataclass(frozen=True)
class EntanglementResult:
    E: float
    G_rho: float
    G_best_product: float
    best: Decomposition
    m: int
    restarts: int
    iterations: int
    converged: bool


@dataclass(frozen=True)
class EntropyGapResult:
    E_s: float
    S_rho: float
    S_best_product: float
    best: Decomposition
    m: int
    restarts: int
    iterations: int
    converged: bool


def _eigensystem(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs above the rank threshold, descending."""
    w, v = np.linalg.eigh(rho.matrix)
    keep = w > RANK_TOL
    w, v = w[keep][::-1], v[:, keep][:, ::-1]
    return w, v


def decomposition_from_isometry(rho: DensityMatrix, v: np.ndarray) -> Decomposition:
    """Decomposition generated by a column-orthonormal matrix ``v``.

    ``v`` must have exactly rank(rho) columns; weights are the squared norms
    of the unnormalized kets, and terms with negligible weight are dropped.
    """
    split = rho.require_split()
    lam, vecs = _eigensystem(rho)
    r = lam.size
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 2 or v.shape[1] != r:
        raise ValueError(f"isometry must have {r} columns for a rank-{r} state, got {v.shape}")
    if v.shape[0] < r:
        raise ValueError(f"isometry needs at least {r} rows, got {v.shape[0]}")
    dev = np.max(np.abs(v.conj().T @ v - np.eye(r)))
    if dev > 1e-10:
        raise ContractViolation(f"columns are not orthonormal: max deviation {dev:.3e}")
    scaled = vecs * np.sqrt(lam)          # (dim, r)
    tilde = scaled @ v.T                  # (dim, m), column i = unnormalized ket i
    gamma = np.sum(np.abs(tilde) ** 2, axis=0)
    keep = gamma > _WEIGHT_DROP
    gamma = gamma[keep]
    kets = tilde[:, keep] / np.sqrt(gamma)
    gamma = gamma / gamma.sum()
    states = tuple(DensityMatrix.from_ket(kets[:, i], split=split) for i in range(kets.shape[1]))
    return Decomposition(weights=gamma, states=states, isometry=v)


def productize(d: Decomposition) -> DensityMatrix:
    """Separable state sum_i gamma_i (Tr_B rho_i) x (Tr_A rho_i)."""
    split = d.states[0].require_split()
    out = np.zeros((split[0] * split[1],) * 2, dtype=np.complex128)
    for g, st in zip(d.weights, d.states):
        a = partial_trace_matrix(st.matrix, split, "B")
        b = partial_trace_matrix(st.matrix, split, "A")
        out = out + g * kron(a, b)
    return DensityMatrix(out, split=split)


def _isometry_from_vector(x: np.ndarray, m: int, r: int) -> np.ndarray:
    z = (x[: m * r] + 1j * x[m * r :]).reshape(m, r)
    q, rr = np.linalg.qr(z)
    d = np.diagonal(rr)
    phase = np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1.0)), 1.0)
    return q * phase.conj()


def _vector_from_isometry(v: np.ndarray) -> np.ndarray:
    return np.concatenate([v.real.ravel(), v.imag.ravel()])


def _search(
    rho: DensityMatrix,
    objective,
    opt: OptimizerConfig,
    maximize: bool,
) -> tuple[float, Decomposition, int, int, bool]:
    """Shared restart loop over term counts and isometry starts.

    ``objective`` maps a Decomposition to a float; returns the best value,
    the best decomposition, restart and iteration counts, and whether any
    restart improved on the eigendecomposition start.
    """
    lam, _ = _eigensystem(rho)
    r = lam.size
    m_max = opt.m_max if opt.m_max is not None else r * r
    if m_max < r:
        raise ValueError(f"m_max {m_max} below rank {r}")
    sign = -1.0 if maximize else 1.0

    def score(v: np.ndarray) -> tuple[float, Decomposition]:
        d = decomposition_from_isometry(rho, v)
        return objective(d), d

    identity = np.eye(r, dtype=np.complex128)
    base_val, base_dec = score(identity)
    best_val, best_dec = base_val, base_dec
    total_iters = 0
    restarts_run = 0

    if r == 1:
        # a pure state has a unique decomposition; nothing to search
        return best_val, best_dec, 0, 0, False

    seeds = np.random.SeedSequence(opt.seed).spawn(max(m_max - r + 1, 1) * opt.restarts)
    seed_idx = 0
    is_two_qubit = rho.require_split() == (2, 2)

    for m in range(r, m_max + 1):
        def fun(x, m=m):
            val, _ = score(_isometry_from_vector(x, m, r))
            return sign * val

        starts = [np.eye(m, r, dtype=np.complex128)]
        for k in range(opt.restarts):
            rng = np.random.default_rng(seeds[seed_idx])
            seed_idx += 1
            real = is_two_qubit and (k % 2 == 1)
            starts.append(random_isometry(m, r, rng, real=real))
        for x0_mat in starts:
            x0 = _vector_from_isometry(x0_mat)
            res = minimize(
                fun,
                x0,
                method="Nelder-Mead",
                options={"maxfev": opt.max_evals, "xatol": 1e-4, "fatol": 1e-7},
            )
            restarts_run += 1
            total_iters += int(res.nfev)
            val, dec = score(_isometry_from_vector(res.x, m, r))
            if sign * val < sign * best_val:
                best_val, best_dec = val, dec
    improved = sign * best_val < sign * base_val - 1e-12
    return best_val, best_dec, restarts_run, total_iters, improved


def entanglement_E(
    rho: DensityMatrix,
    integrator_cfg: IntegratorConfig | None = None,
    optimizer_cfg: OptimizerConfig | None = None,
    scale: float = ENTANGLEMENT_SCALE,
) -> EntanglementResult:
    """Strength gap E = C * (G(rho) - sup over productizations of G).

    The supremum is approached by derivative-free search over decomposition
    isometries with seeded random restarts; the reported optimum is a lower
    bound on the supremum, hence E is an upper bound on the true gap.  The
    inner loop scores candidates on a coarse quadrature grid; the final
    report re-evaluates the winner and G(rho) at the full resolution.
    """
    rho.require_split()
    fine = integrator_cfg or IntegratorConfig()
    opt = optimizer_cfg or OptimizerConfig()
    coarse = replace(fine, grid=opt.coarse_grid)

    g_rho = strength(rho, fine)

    def objective(d: Decomposition) -> float:
        return strength(productize(d), coarse, with_error=False).value

    _, best_dec, restarts, iters, improved = _search(rho, objective, opt, maximize=True)
    g_best = strength(productize(best_dec), fine)
    return EntanglementResult(
        E=scale * (g_rho.value - g_best.value),
        G_rho=g_rho.value,
        G_best_product=g_best.value,
        best=best_dec,
        m=len(best_dec.states),
        restarts=restarts,
        iterations=iters,
        converged=improved,
    )


def entanglement_Es(
    rho: DensityMatrix,
    optimizer_cfg: OptimizerConfig | None = None,
) -> EntropyGapResult:
    """Entropy gap: minimize S(productization) over decompositions,
    reporting E_s = min - S(rho)."""
    rho.require_split()
    opt = optimizer_cfg or OptimizerConfig()
    s_rho = von_neumann_entropy(rho)

    def objective(d: Decomposition) -> float:
        return von_neumann_entropy(productize(d))

    best_val, best_dec, restarts, iters, improved = _search(rho, objective, opt, maximize=False)
    return EntropyGapResult(
        E_s=best_val - s_rho,
        S_rho=s_rho,
        S_best_product=best_val,
        best=best_dec,
        m=len(best_dec.states),
        restarts=restarts,
        iterations=iters,
        converged=improved,
    )


def entanglement_result_to_dict(res: EntanglementResult) -> dict:
    return {
        "E": res.E,
        "G_rho": res.G_rho,
        "G_best_product": res.G_best_product,
        "m": res.m,
        "restarts": res.restarts,
        "converged": res.converged,
    }


def entropy_result_to_dict(res: EntropyGapResult) -> dict:
    return {
        "E": res.E_s,
        "S_rho": res.S_rho,
        "S_best_product": res.S_best_product,
        "m": res.m,
        "restarts": res.restarts,
        "converged": res.converged,
    }
