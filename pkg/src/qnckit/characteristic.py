"""Conditional states under local projective measurement and the
characteristic response function of nonlocal correlation.

For a bipartite state rho and a projector M(params) on side A, the
conditional state of B is Tr_A((M x I) rho) / p with success probability
p = Tr((M x I) rho).  The response component along each measurement
parameter x is

    F_x = ||d(rho_B^M)/dx||_1 / ||dM/dx||_1

computed analytically via the quotient rule (the common dx cancels).
Components at parameterization poles (vanishing ||dM/dx||_1) are set to 0
and flagged; samples with p below the cutoff are marked undefined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrix_core import DensityMatrix, trace_norm_batch
from .measurement import MeasurementParams, Projector, ket_and_gradients_batch
from .su_basis import bloch_vector_matrix, generator_basis

EPS_P = 1e-12
POLE_TOL = 1e-12


@dataclass(frozen=True)
class CharSample:
    """Characteristic-function data at one measurement point.

    ``components`` holds the 2(n_A - 1) response ratios ordered
    (theta_1..theta_{n_A-1}, phi_1..phi_{n_A-1}); ``pole_mask`` marks
    components zeroed at parameterization poles; ``defined`` is False when
    the outcome probability is below the cutoff.
    """

    params: MeasurementParams
    p: float
    cond_state: DensityMatrix | None
    components: np.ndarray
    magnitude: float
    defined: bool
    pole_mask: np.ndarray


@dataclass(frozen=True)
class CharBatch:
    """Vectorized characteristic-function samples over a parameter batch."""

    thetas: np.ndarray       # (G, n_A - 1)
    phis: np.ndarray         # (G, n_A - 1)
    p: np.ndarray            # (G,)
    raw_cond: np.ndarray     # (G, n_B, n_B), unnormalized Tr_A(M rho)
    components: np.ndarray   # (G, 2(n_A - 1))
    magnitude: np.ndarray    # (G,)
    defined: np.ndarray      # (G,) bool
    pole_mask: np.ndarray    # (G, 2(n_A - 1)) bool


def conditional_state(
    rho: DensityMatrix, m: Projector, eps_p: float = EPS_P
) -> tuple[float, DensityMatrix | None]:
    """Outcome probability and conditional B state for projector ``m`` on A."""
    n_a, n_b = rho.require_split()
    if m.dim != n_a:
        raise ValueError(f"projector dimension {m.dim} != n_A = {n_a}")
    blocks = rho.matrix.reshape(n_a, n_b, n_a, n_b)
    raw = np.einsum("ca,abcd->bd", m.matrix, blocks)
    p = float(np.trace(raw).real)
    if p <= eps_p:
        return p, None
    return p, DensityMatrix(raw / p)


def char_batch(
    rho: DensityMatrix,
    thetas: np.ndarray,
    phis: np.ndarray,
    eps_p: float = EPS_P,
) -> CharBatch:
    """Evaluate p, the raw conditional blocks, and all response components
    for a batch of measurement parameters on side A."""
    n_a, n_b = rho.require_split()
    t = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    f = np.atleast_2d(np.asarray(phis, dtype=np.float64))
    if t.shape[-1] != n_a - 1 or f.shape != t.shape:
        raise ValueError(f"expected angle arrays of shape (G, {n_a - 1})")

    psi, dpsi = ket_and_gradients_batch(t, f)
    m_op = np.einsum("gi,gj->gij", psi, psi.conj())
    dm_op = np.einsum("gxi,gj->gxij", dpsi, psi.conj()) + np.einsum(
        "gi,gxj->gxij", psi, dpsi.conj()
    )

    blocks = rho.matrix.reshape(n_a, n_b, n_a, n_b)
    raw = np.einsum("gca,abcd->gbd", m_op, blocks)
    draw = np.einsum("gxca,abcd->gxbd", dm_op, blocks)

    p = np.einsum("gbb->g", raw).real
    dp = np.einsum("gxbb->gx", draw).real
    defined = p > eps_p
    safe_p = np.where(defined, p, 1.0)

    dcond = draw / safe_p[:, None, None, None] - raw[:, None, :, :] * (
        dp / safe_p[:, None] ** 2
    )[:, :, None, None]

    tn_dm = trace_norm_batch(dm_op)
    tn_dc = trace_norm_batch(dcond)

    pole = tn_dm < POLE_TOL
    comps = np.where(pole, 0.0, tn_dc / np.where(pole, 1.0, tn_dm))
    comps = np.where(defined[:, None], comps, 0.0)
    magnitude = np.linalg.norm(comps, axis=-1)
    return CharBatch(
        thetas=t,
        phis=f,
        p=p,
        raw_cond=raw,
        components=comps,
        magnitude=magnitude,
        defined=defined,
        pole_mask=pole,
    )


def _sample_from_batch(rho: DensityMatrix, batch: CharBatch, g: int) -> CharSample:
    n_a, _ = rho.require_split()
    params = MeasurementParams(
        dim=n_a, thetas=tuple(batch.thetas[g]), phis=tuple(batch.phis[g])
    )
    cond = None
    if batch.defined[g]:
        cond = DensityMatrix(batch.raw_cond[g] / batch.p[g])
    return CharSample(
        params=params,
        p=float(batch.p[g]),
        cond_state=cond,
        components=batch.components[g].copy(),
        magnitude=float(batch.magnitude[g]),
        defined=bool(batch.defined[g]),
        pole_mask=batch.pole_mask[g].copy(),
    )


def char_components(rho: DensityMatrix, params: MeasurementParams, eps_p: float = EPS_P) -> CharSample:
    """Characteristic sample at a single measurement point (trace-norm form)."""
    n_a, _ = rho.require_split()
    if params.dim != n_a:
        raise ValueError(f"parameter dimension {params.dim} != n_A = {n_a}")
    batch = char_batch(rho, np.array([params.thetas]), np.array([params.phis]), eps_p=eps_p)
    return _sample_from_batch(rho, batch, 0)


def char_components_bloch(
    rho: DensityMatrix, params: MeasurementParams, eps_p: float = EPS_P
) -> CharSample:
    """Bloch-norm form |d r_B / dx| / |d r_M / dx|, exact for 2x2 subsystems.

    Agrees with the trace-norm form because the trace norm of a traceless
    Hermitian 2x2 matrix equals the Euclidean norm of its coefficient vector
    in the Pauli basis.
    """
    n_a, n_b = rho.require_split()
    if n_a != 2 or n_b != 2:
        raise ValueError("Bloch form requires a two-qubit split")
    if params.dim != 2:
        raise ValueError("parameter dimension must be 2")
    basis_a = generator_basis(2)
    basis_b = generator_basis(2)

    t = np.array([params.thetas])
    f = np.array([params.phis])
    psi, dpsi = ket_and_gradients_batch(t, f)
    m_op = np.einsum("gi,gj->gij", psi, psi.conj())
    dm_op = np.einsum("gxi,gj->gxij", dpsi, psi.conj()) + np.einsum(
        "gi,gxj->gxij", psi, dpsi.conj()
    )
    blocks = rho.matrix.reshape(2, 2, 2, 2)
    raw = np.einsum("gca,abcd->gbd", m_op, blocks)
    draw = np.einsum("gxca,abcd->gxbd", dm_op, blocks)
    p = np.einsum("gbb->g", raw).real
    dp = np.einsum("gxbb->gx", draw).real
    defined = p > eps_p
    safe_p = np.where(defined, p, 1.0)
    dcond = draw / safe_p[:, None, None, None] - raw[:, None, :, :] * (
        dp / safe_p[:, None] ** 2
    )[:, :, None, None]

    dr_m = np.linalg.norm(bloch_vector_matrix(dm_op, basis_a), axis=-1)
    dr_b = np.linalg.norm(bloch_vector_matrix(dcond, basis_b), axis=-1)
    pole = dr_m < POLE_TOL
    comps = np.where(pole, 0.0, dr_b / np.where(pole, 1.0, dr_m))
    comps = np.where(defined[:, None], comps, 0.0)

    cond = DensityMatrix(raw[0] / p[0]) if defined[0] else None
    return CharSample(
        params=params,
        p=float(p[0]),
        cond_state=cond,
        components=comps[0],
        magnitude=float(np.linalg.norm(comps[0])),
        defined=bool(defined[0]),
        pole_mask=pole[0],
    )


def grid_axes(n: int, resolution: int, closed: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Per-parameter grid axes over the box: thetas in [0, pi], phis in
    [0, 2*pi].  ``closed=False`` uses midpoints, which avoids the
    parameterization poles."""
    if closed:
        th = np.linspace(0.0, math.pi, resolution)
        ph = np.linspace(0.0, 2.0 * math.pi, resolution)
    else:
        th = (np.arange(resolution) + 0.5) * math.pi / resolution
        ph = (np.arange(resolution) + 0.5) * 2.0 * math.pi / resolution
    return th, ph


def char_surface(
    rho: DensityMatrix,
    grid: int,
    closed: bool = True,
    eps_p: float = EPS_P,
    as_batch: bool = False,
):
    """Characteristic samples over a regular grid of the parameter box.

    Ordering is row-major over (theta_1, .., theta_m, phi_1, .., phi_m).
    Returns a list of CharSample, or the raw CharBatch when ``as_batch``.
    """
    n_a, _ = rho.require_split()
    m = n_a - 1
    if grid ** (2 * m) > 1 << 22:
        raise ValueError(
            f"grid {grid} over {2 * m} parameters needs {grid ** (2 * m)} points; "
            "use Monte-Carlo sampling for measured sides above dimension 2"
        )
    th, ph = grid_axes(n_a, grid, closed=closed)
    axes = [th] * m + [ph] * m
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = [a.ravel() for a in mesh]
    thetas = np.stack(flat[:m], axis=-1)
    phis = np.stack(flat[m:], axis=-1)
    batch = char_batch(rho, thetas, phis, eps_p=eps_p)
    if as_batch:
        return batch
    return [_sample_from_batch(rho, batch, g) for g in range(thetas.shape[0])]


def surface_to_csv(batch: CharBatch, n_a: int) -> str:
    """CSV serialization: theta_1..theta_m, phi_1..phi_m, p, F_theta_1..,
    F_phi_1.., F_mag, defined(0/1); floats at 17 significant digits."""
    m = n_a - 1
    cols = (
        [f"theta_{k}" for k in range(1, m + 1)]
        + [f"phi_{k}" for k in range(1, m + 1)]
        + ["p"]
        + [f"F_theta_{k}" for k in range(1, m + 1)]
        + [f"F_phi_{k}" for k in range(1, m + 1)]
        + ["F_mag", "defined"]
    )
    lines = [",".join(cols)]
    for g in range(batch.p.shape[0]):
        vals = (
            [f"{v:.17g}" for v in batch.thetas[g]]
            + [f"{v:.17g}" for v in batch.phis[g]]
            + [f"{batch.p[g]:.17g}"]
            + [f"{v:.17g}" for v in batch.components[g]]
            + [f"{batch.magnitude[g]:.17g}", str(int(batch.defined[g]))]
        )
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


def pure_state_component(alpha: float, theta: float) -> float:
    """Closed-form response component of the Schmidt-form two-qubit pure
    state cos(a)|00> + sin(a) e^{i g}|11>: both components equal

        2 |sin 2a| / (2 + cos 2(theta - a) + cos 2(theta + a)).
    """
    den = 2.0 + math.cos(2.0 * (theta - alpha)) + math.cos(2.0 * (theta + alpha))
    return 2.0 * abs(math.sin(2.0 * alpha)) / den


def schmidt_pure_state(alpha: float, gamma: float = 0.0) -> DensityMatrix:
    """Two-qubit pure state cos(a)|00> + sin(a) e^{i g}|11>."""
    ket = np.zeros(4, dtype=np.complex128)
    ket[0] = math.cos(alpha)
    ket[3] = math.sin(alpha) * np.exp(1j * gamma)
    return DensityMatrix.from_ket(ket, split=(2, 2))
