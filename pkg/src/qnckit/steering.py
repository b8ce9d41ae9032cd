"""Steering surfaces of the conditional Bloch vector, main-normal constancy
as a separability test for real 2x2 correlations, and polytope diagnostics
for classically A-correlated states.

The probability-weighted surface s(theta, phi) = p * r_B is computed from
the unnormalized conditional block Tr_A(M rho) directly, so it stays finite
where p -> 0.  The main normal is the normalized cross product of the two
grid tangents (central differences); normals are compared as lines, since
orientation flips across parameterization seams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from .characteristic import EPS_P
from .matrix_core import DensityMatrix
from .measurement import ket_and_gradients_batch, params_from_ket, sample_params_batch
from .su_basis import generator_basis

NORMAL_DEGENERACY_TOL = 1e-10
DEGENERATE_FRACTION_LIMIT = 0.5
HULL_SLACK = 1e-9


@dataclass(frozen=True)
class SteeringSurface:
    """Grid of conditional-state data for a 2x2 state measured on A.

    ``r_b`` is NaN where the outcome probability is below the cutoff;
    ``normals`` is NaN where the tangent cross product degenerates.
    """

    thetas: np.ndarray        # (K_t,)
    phis: np.ndarray          # (K_p,)
    p: np.ndarray             # (K_t, K_p)
    r_b: np.ndarray           # (K_t, K_p, 3)
    s: np.ndarray             # (K_t, K_p, 3), p * r_b, always finite
    normals: np.ndarray       # (K_t, K_p, 3), unit where defined
    normal_defined: np.ndarray
    p_defined: np.ndarray


@dataclass(frozen=True)
class SeparabilityVerdict:
    verdict: str                 # separable-real | not-separable-real | inconclusive
    max_normal_deviation: float  # radians, sign-insensitive
    degenerate_fraction: float


@dataclass(frozen=True)
class PolytopeReport:
    m: int
    vertices: np.ndarray          # (m, 3) component Bloch vectors
    hull_vertex_count: int
    max_hull_violation: float
    all_inside: bool
    vertex_attainment: np.ndarray  # (m,) min distance of any sample to each vertex
    max_plane_deviation: float     # max |y| over samples (0 for the real family)
    sample_count: int


def _conditional_cloud(
    rho: DensityMatrix, thetas: np.ndarray, phis: np.ndarray, eps_p: float = EPS_P
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """p, s = p*r_B, and r_B (NaN where undefined) for batched A parameters."""
    n_a, n_b = rho.require_split()
    if n_b != 2:
        raise ValueError(f"steering clouds need a two-dimensional B side, got n_B = {n_b}")
    psi, _ = ket_and_gradients_batch(thetas, phis)
    m_op = np.einsum("gi,gj->gij", psi, psi.conj())
    blocks = rho.matrix.reshape(n_a, 2, n_a, 2)
    raw = np.einsum("gca,abcd->gbd", m_op, blocks)
    p = np.einsum("gbb->g", raw).real
    paulis = generator_basis(2).generators
    s = np.einsum("kij,gji->gk", paulis, raw).real
    defined = p > eps_p
    r_b = np.where(defined[:, None], s / np.where(defined, p, 1.0)[:, None], np.nan)
    return p, s, r_b


def steering_surface(rho: DensityMatrix, grid: int, eps_p: float = EPS_P) -> SteeringSurface:
    """Conditional-state surface of a 2x2 state over a closed parameter grid."""
    n_a, n_b = rho.require_split()
    if (n_a, n_b) != (2, 2):
        raise ValueError(f"steering surfaces need a 2x2 split, got {(n_a, n_b)}")
    th = np.linspace(0.0, math.pi, grid)
    ph = np.linspace(0.0, 2.0 * math.pi, grid)
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    p, s, r_b = _conditional_cloud(rho, tt.ravel()[:, None], pp.ravel()[:, None], eps_p)
    p = p.reshape(grid, grid)
    s = s.reshape(grid, grid, 3)
    r_b = r_b.reshape(grid, grid, 3)
    ds_dt, ds_dp = np.gradient(s, th, ph, axis=(0, 1))
    cross = np.cross(ds_dt, ds_dp)
    norm = np.linalg.norm(cross, axis=-1)
    defined = norm >= NORMAL_DEGENERACY_TOL
    normals = np.where(defined[..., None], cross / np.where(defined, norm, 1.0)[..., None], np.nan)
    return SteeringSurface(
        thetas=th,
        phis=ph,
        p=p,
        r_b=r_b,
        s=s,
        normals=normals,
        normal_defined=defined,
        p_defined=p > eps_p,
    )


def main_normal_constancy(surface: SteeringSurface, tol: float = 1e-6) -> SeparabilityVerdict:
    """Verdict from the constancy of the main normal across the surface.

    The reference is the first defined normal in row-major order; deviations
    are angles between lines.  When at least half the grid has no defined
    normal the surface has collapsed to a curve or point and the criterion
    cannot speak: inconclusive.
    """
    defined = surface.normal_defined
    total = defined.size
    degenerate_fraction = 1.0 - float(np.count_nonzero(defined)) / total
    if degenerate_fraction >= DEGENERATE_FRACTION_LIMIT:
        return SeparabilityVerdict(
            verdict="inconclusive",
            max_normal_deviation=0.0,
            degenerate_fraction=degenerate_fraction,
        )
    normals = surface.normals[defined]
    ref = normals[0]
    dots = np.clip(np.abs(normals @ ref), 0.0, 1.0)
    max_dev = float(np.max(np.arccos(dots)))
    verdict = "separable-real" if max_dev <= tol else "not-separable-real"
    return SeparabilityVerdict(
        verdict=verdict,
        max_normal_deviation=max_dev,
        degenerate_fraction=degenerate_fraction,
    )


def lambda_closed_form(theta: float, phi: float, alpha_k: float, phi_k: float) -> float:
    """Closed-form overlap candidate with a positive cross term:

        cos^2(theta - alpha_k) + sin(2 theta) sin(2 alpha_k) sin^2((phi - phi_k)/2)

    Kept as a comparison oracle; the direct overlap of the corresponding
    kets carries the cross term with the opposite sign, and the property
    tests record exactly that difference.
    """
    return (
        math.cos(theta - alpha_k) ** 2
        + math.sin(2.0 * theta) * math.sin(2.0 * alpha_k) * math.sin((phi - phi_k) / 2.0) ** 2
    )


def _canonical_b_kets(m: int) -> list[np.ndarray]:
    return [
        np.array([math.cos(i * math.pi / m), math.sin(i * math.pi / m)], dtype=np.complex128)
        for i in range(1, m + 1)
    ]


def _component_kets(m: int, a_kets, b_kets) -> tuple[np.ndarray, np.ndarray]:
    if a_kets is None:
        a_arr = np.eye(m, dtype=np.complex128)
    else:
        a_arr = np.array([np.asarray(k, dtype=np.complex128).ravel() for k in a_kets])
        if a_arr.shape != (m, m):
            raise ValueError(f"need {m} A-side kets of dimension {m}")
        gram = a_arr.conj() @ a_arr.T
        if np.max(np.abs(gram - np.eye(m))) > 1e-10:
            raise ValueError("A-side component states must be orthonormal")
    if b_kets is None:
        b_arr = np.array(_canonical_b_kets(m))
    else:
        b_arr = np.array([np.asarray(k, dtype=np.complex128).ravel() for k in b_kets])
        if b_arr.shape != (m, 2):
            raise ValueError(f"need {m} B-side qubit kets")
        b_arr = b_arr / np.linalg.norm(b_arr, axis=1)[:, None]
    return a_arr, b_arr


def polytope_state(m: int, weights=None, a_kets=None, b_kets=None) -> DensityMatrix:
    """Classically A-correlated m x 2 state sum_i a_i |i><i| x |b_i><b_i|.

    Defaults: orthonormal A components are the computational basis and the
    B components are |b_i> = cos(i pi / m)|0> + sin(i pi / m)|1>, i = 1..m,
    whose conditional Bloch vectors trace an m-gon.
    """
    if m < 2:
        raise ValueError(f"need m >= 2 components, got {m}")
    a = np.full(m, 1.0 / m) if weights is None else np.asarray(weights, dtype=np.float64)
    if a.shape != (m,) or np.any(a < 0) or abs(a.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be m nonnegative numbers summing to 1")
    a_arr, b_arr = _component_kets(m, a_kets, b_kets)
    out = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    for i in range(m):
        out += a[i] * np.kron(np.outer(a_arr[i], a_arr[i].conj()), np.outer(b_arr[i], b_arr[i].conj()))
    return DensityMatrix(out, split=(m, 2))


def polytope_vertices(m: int, b_kets=None) -> np.ndarray:
    """Bloch vectors of the B components; the default family gives
    (sin 2i pi/m, 0, cos 2i pi/m)."""
    _, b_arr = _component_kets(m, None, b_kets)
    return np.stack(
        [
            2.0 * (b_arr[:, 0].conj() * b_arr[:, 1]).real,
            2.0 * (b_arr[:, 0].conj() * b_arr[:, 1]).imag,
            np.abs(b_arr[:, 0]) ** 2 - np.abs(b_arr[:, 1]) ** 2,
        ],
        axis=-1,
    )


def polytope_diagnostics(
    m: int,
    weights=None,
    a_kets=None,
    b_kets=None,
    samples: int = 10_000,
    seed: int = 0,
) -> PolytopeReport:
    """Sample conditional Bloch vectors of the component state and check the
    convex-hull containment, vertex attainment, and hull vertex count."""
    rho = polytope_state(m, weights, a_kets, b_kets)
    a_arr, _ = _component_kets(m, a_kets, b_kets)
    rng = np.random.default_rng(seed)
    thetas, phis = sample_params_batch(m, rng, samples)
    # deterministic component-aligned settings attain each vertex exactly
    for i in range(m):
        bp = params_from_ket(a_arr[i])
        thetas = np.vstack([thetas, np.array(bp.thetas)])
        phis = np.vstack([phis, np.array(bp.phis)])
    p, s, r_b = _conditional_cloud(rho, thetas, phis)
    pts = r_b[p > EPS_P]
    verts = polytope_vertices(m, b_kets)

    if m == 2:
        # two vertices: the hull is the segment between them
        a, b = verts[0], verts[1]
        axis = b - a
        length2 = float(axis @ axis)
        t = ((pts - a) @ axis) / length2
        off_axis = np.linalg.norm(pts - a - np.outer(t, axis), axis=1)
        max_violation = float(max(np.max(off_axis), np.max(t - 1.0), np.max(-t)))
        max_plane_dev = float(np.max(off_axis))
        hull_vertex_count = 2
    else:
        center = verts.mean(axis=0)
        _, sing, vt = np.linalg.svd(verts - center)
        if sing[-1] <= 1e-9:
            # coplanar vertex set: hull in the plane, plus out-of-plane slack
            plane = vt[:2]
            hull = ConvexHull((verts - center) @ plane.T)
            proj = (pts - center) @ plane.T
            viol = proj @ hull.equations[:, :2].T + hull.equations[:, 2]
            max_plane_dev = float(np.max(np.abs((pts - center) @ vt[2])))
            max_violation = float(max(np.max(viol), max_plane_dev))
        else:
            hull = ConvexHull(verts)
            viol = pts @ hull.equations[:, :3].T + hull.equations[:, 3]
            max_violation = float(np.max(viol))
            max_plane_dev = 0.0
        hull_vertex_count = int(len(hull.vertices))
    attain = np.array([np.min(np.linalg.norm(pts - v, axis=1)) for v in verts])
    return PolytopeReport(
        m=m,
        vertices=verts,
        hull_vertex_count=hull_vertex_count,
        max_hull_violation=max_violation,
        all_inside=bool(max_violation <= HULL_SLACK and max_plane_dev <= HULL_SLACK),
        vertex_attainment=attain,
        max_plane_deviation=max_plane_dev,
        sample_count=int(pts.shape[0]),
    )


def steering_cloud(
    rho: DensityMatrix, samples: int, seed: int = 0, eps_p: float = EPS_P
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Measure-weighted sample cloud (thetas, phis, p, s, r_b) for an
    n_A x 2 state; used for point-cloud CSV output when n_A > 2."""
    n_a, _ = rho.require_split()
    rng = np.random.default_rng(seed)
    thetas, phis = sample_params_batch(n_a, rng, samples)
    p, s, r_b = _conditional_cloud(rho, thetas, phis, eps_p)
    return thetas, phis, p, s, r_b


def surface_to_csv(surface: SteeringSurface) -> str:
    """CSV rows theta, phi, p, rBx, rBy, rBz, sx, sy, sz, nx, ny, nz,
    defined(0/1); 17 significant digits, NaN for undefined vector fields."""
    lines = ["theta,phi,p,rBx,rBy,rBz,sx,sy,sz,nx,ny,nz,defined"]
    kt, kp = surface.p.shape
    for i in range(kt):
        for j in range(kp):
            fields = (
                [f"{surface.thetas[i]:.17g}", f"{surface.phis[j]:.17g}", f"{surface.p[i, j]:.17g}"]
                + [f"{v:.17g}" for v in surface.r_b[i, j]]
                + [f"{v:.17g}" for v in surface.s[i, j]]
                + [f"{v:.17g}" for v in surface.normals[i, j]]
                + [str(int(surface.p_defined[i, j] and surface.normal_defined[i, j]))]
            )
            lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def cloud_to_csv(thetas, phis, p, s, r_b) -> str:
    """Point-cloud CSV in the surface column layout: the first theta/phi of
    each sampled parameter set is recorded, normals are NaN (a point cloud
    over a higher-dimensional parameter manifold has no main normal)."""
    lines = ["theta,phi,p,rBx,rBy,rBz,sx,sy,sz,nx,ny,nz,defined"]
    for g in range(p.shape[0]):
        defined = np.isfinite(r_b[g, 0])
        fields = (
            [f"{thetas[g, 0]:.17g}", f"{phis[g, 0]:.17g}", f"{p[g]:.17g}"]
            + [f"{v:.17g}" for v in r_b[g]]
            + [f"{v:.17g}" for v in s[g]]
            + ["nan", "nan", "nan", str(int(defined))]
        )
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"
