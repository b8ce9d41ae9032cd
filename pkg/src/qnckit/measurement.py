"""Hyperspherical parameterization of rank-one projectors, their analytic
parameter derivatives, the integration measure over the parameter box, and
measure-weighted sampling.

A unit ket in dimension n is built from n-1 mixing angles theta in [0, pi]
and n-1 phases phi in [0, 2*pi]:

    a_1 = cos(theta_1)
    a_k = sin(theta_1)...sin(theta_{k-1}) * cos(theta_k) * exp(i phi_{k-1})
    a_n = sin(theta_1)...sin(theta_{n-1}) * exp(i phi_{n-1})

One phase per amplitude, the first amplitude real.  This convention is
surjective onto rays and reduces to the standard Bloch parameterization at
n = 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrix_core import HERMITICITY_TOL

IDEMPOTENCY_TOL = 1e-10
_RANGE_SLACK = 1e-9


@dataclass(frozen=True)
class MeasurementParams:
    """Angle sets (theta_1..theta_{n-1}, phi_1..phi_{n-1}) of a projector."""

    dim: int
    thetas: tuple[float, ...]
    phis: tuple[float, ...]

    def __post_init__(self):
        m = self.dim - 1
        if self.dim < 2:
            raise ValueError(f"parameter dimension must be >= 2, got {self.dim}")
        th = tuple(float(t) for t in self.thetas)
        ph = tuple(float(p) for p in self.phis)
        if len(th) != m or len(ph) != m:
            raise ValueError(f"expected {m} thetas and {m} phis for dim {self.dim}")
        if any(t < -_RANGE_SLACK or t > math.pi + _RANGE_SLACK for t in th):
            raise ValueError("theta outside [0, pi]")
        if any(p < -_RANGE_SLACK or p > 2 * math.pi + _RANGE_SLACK for p in ph):
            raise ValueError("phi outside [0, 2*pi]")
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "phis", ph)


@dataclass(frozen=True)
class Projector:
    """Rank-one Hermitian idempotent: M = |psi><psi|, Tr M = 1."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"projector shape {m.shape} does not match dim {self.dim}")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise ValueError("projector is not Hermitian")
        if np.max(np.abs(m @ m - m)) > IDEMPOTENCY_TOL:
            raise ValueError("projector is not idempotent")
        if abs(np.trace(m).real - 1.0) > IDEMPOTENCY_TOL:
            raise ValueError("projector is not rank one (trace != 1)")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def _amplitudes_batch(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Kets for batched angle arrays of shape (..., n-1); returns (..., n)."""
    t = np.asarray(thetas, dtype=np.float64)
    p = np.asarray(phis, dtype=np.float64)
    m = t.shape[-1]
    n = m + 1
    sins = np.sin(t)
    coss = np.cos(t)
    # prefix[..., k] = product of sin(t_0..t_{k-1}); prefix[..., 0] = 1
    prefix = np.ones(t.shape[:-1] + (m + 1,), dtype=np.float64)
    np.cumprod(sins, axis=-1, out=prefix[..., 1:])
    phase = np.exp(1j * p)
    a = np.empty(t.shape[:-1] + (n,), dtype=np.complex128)
    a[..., 0] = coss[..., 0]
    if n > 2:
        a[..., 1 : n - 1] = prefix[..., 1 : n - 1] * coss[..., 1:] * phase[..., : n - 2]
    a[..., n - 1] = prefix[..., m] * phase[..., m - 1]
    return a


def ket_and_gradients_batch(
    thetas: np.ndarray, phis: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Kets plus analytic parameter gradients for batched angles.

    Returns ``(psi, dpsi)`` with shapes ``(..., n)`` and ``(..., 2(n-1), n)``;
    derivative axis ordered theta_1..theta_{n-1}, phi_1..phi_{n-1}.  Each
    angle appears at most once per amplitude, so derivatives are computed by
    swapping the corresponding factor inside the product (division-free,
    well defined at the poles).
    """
    t = np.asarray(thetas, dtype=np.float64)
    p = np.asarray(phis, dtype=np.float64)
    m = t.shape[-1]
    n = m + 1
    lead = t.shape[:-1]
    sins = np.sin(t)
    coss = np.cos(t)
    phase = np.exp(1j * p)

    prefix = np.ones(lead + (m + 1,), dtype=np.float64)
    np.cumprod(sins, axis=-1, out=prefix[..., 1:])

    # tail[k] = trailing factor of amplitude k: cos(t_k) (times its phase)
    # for interior slots, bare phase for the last slot, plain cos for k = 0.
    tail = np.ones(lead + (n,), dtype=np.complex128)
    tail[..., 0] = coss[..., 0]
    if n > 2:
        tail[..., 1 : n - 1] = coss[..., 1:] * phase[..., : n - 2]
    tail[..., n - 1] = phase[..., m - 1]

    psi = prefix * tail

    dpsi = np.zeros(lead + (2 * m, n), dtype=np.complex128)
    for i in range(m):
        mod = sins.copy()
        mod[..., i] = coss[..., i]
        modprefix = np.ones(lead + (m + 1,), dtype=np.float64)
        np.cumprod(mod, axis=-1, out=modprefix[..., 1:])
        diag_phase = 1.0 if i == 0 else phase[..., i - 1]
        dpsi[..., i, i] = -prefix[..., i] * sins[..., i] * diag_phase
        dpsi[..., i, i + 1 :] = modprefix[..., i + 1 :] * tail[..., i + 1 :]
    for j in range(m):
        dpsi[..., m + j, j + 1] = 1j * psi[..., j + 1]
    return psi, dpsi


def ket_from_params(p: MeasurementParams) -> np.ndarray:
    """Unit ket of the projector parameterized by ``p``."""
    return _amplitudes_batch(np.array(p.thetas), np.array(p.phis))


def projector_from_params(p: MeasurementParams) -> Projector:
    v = ket_from_params(p)
    return Projector(dim=p.dim, matrix=np.outer(v, v.conj()))


def projector_derivative(p: MeasurementParams, kind: str, index: int) -> np.ndarray:
    """Analytic dM/dx for x = theta_index or phi_index (1-based index).

    Hermitian and traceless; exactly zero at parameterization poles where
    the differentiated amplitude block vanishes.
    """
    m = p.dim - 1
    if index < 1 or index > m:
        raise ValueError(f"parameter index must be in 1..{m}, got {index}")
    psi, dpsi = ket_and_gradients_batch(np.array(p.thetas), np.array(p.phis))
    if kind == "theta":
        d = dpsi[index - 1]
    elif kind == "phi":
        d = dpsi[m + index - 1]
    else:
        raise ValueError(f"kind must be 'theta' or 'phi', got {kind!r}")
    return np.outer(d, psi.conj()) + np.outer(psi, d.conj())


def measure_weight(p: MeasurementParams | np.ndarray, dim: int | None = None) -> float | np.ndarray:
    """Density prod_l sin(theta_l)^(n-l-1) of the parameter-box measure."""
    if isinstance(p, MeasurementParams):
        t = np.asarray(p.thetas)
        n = p.dim
    else:
        t = np.asarray(p, dtype=np.float64)
        if dim is None:
            raise ValueError("dim is required when passing raw theta arrays")
        n = dim
    exponents = n - np.arange(1, n) - 1  # n-l-1 for l = 1..n-1
    w = np.prod(np.sin(t) ** exponents, axis=-1)
    return float(w) if np.ndim(w) == 0 else w


def omega_volume(n: int) -> float:
    """Total measure of the parameter box [0,pi]^(n-1) x [0,2pi]^(n-1).

    Closed form: (2*pi)^(n-1) * prod_l int_0^pi sin^(n-l-1) theta dtheta.
    """
    if n < 2:
        raise ValueError(f"omega_volume needs n >= 2, got {n}")
    vol = (2.0 * math.pi) ** (n - 1)
    for l in range(1, n):
        e = n - l - 1
        vol *= math.sqrt(math.pi) * math.gamma((e + 1) / 2) / math.gamma(e / 2 + 1)
    return vol


def sample_params_batch(
    n: int, rng: np.random.Generator, count: int
) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``count`` parameter sets with density proportional to the
    parameter-box measure; returns (thetas, phis) of shape (count, n-1)."""
    m = n - 1
    thetas = np.empty((count, m))
    for l in range(m):
        e = n - (l + 1) - 1
        if e == 0:
            thetas[:, l] = rng.uniform(0.0, math.pi, size=count)
        else:
            a = (e + 1) / 2.0
            x = 2.0 * rng.beta(a, a, size=count) - 1.0
            thetas[:, l] = np.arccos(x)
    phis = rng.uniform(0.0, 2.0 * math.pi, size=(count, m))
    return thetas, phis


def sample_params(n: int, rng: np.random.Generator) -> MeasurementParams:
    """Single measure-weighted draw; deterministic for a fixed generator state."""
    t, p = sample_params_batch(n, rng, 1)
    return MeasurementParams(dim=n, thetas=tuple(t[0]), phis=tuple(p[0]))


def basis_params(i: int, n: int) -> MeasurementParams:
    """Parameters whose ket is exactly the computational basis state |i>
    (1-based index)."""
    if not 1 <= i <= n:
        raise ValueError(f"basis index must be in 1..{n}, got {i}")
    thetas = [math.pi / 2] * (n - 1)
    if i <= n - 1:
        thetas[i - 1] = 0.0
    return MeasurementParams(dim=n, thetas=tuple(thetas), phis=(0.0,) * (n - 1))


@dataclass(frozen=True)
class SubspaceFamily:
    """Parameter assignments confining the ket to span{|i>, |j>}.

    Pinned angles are zeros and pi/2 values; the two free parameters are the
    mixing angle theta_i and the relative phase phi_{j-1}, so the family
    sweeps an effective qubit cos(t)|i> + sin(t) e^{i phase}|j>.
    """

    dim: int
    i: int
    j: int
    theta_assignments: dict[int, float]  # 1-based index -> pinned value
    phi_assignments: dict[int, float]
    free_theta: int
    free_phi: int

    def params(self, mixing_angle: float, relative_phase: float = 0.0) -> MeasurementParams:
        m = self.dim - 1
        thetas = [0.0] * m
        phis = [0.0] * m
        for k, v in self.theta_assignments.items():
            thetas[k - 1] = v
        for k, v in self.phi_assignments.items():
            phis[k - 1] = v
        thetas[self.free_theta - 1] = float(mixing_angle)
        phis[self.free_phi - 1] = float(relative_phase) % (2.0 * math.pi)
        return MeasurementParams(dim=self.dim, thetas=tuple(thetas), phis=tuple(phis))


def subspace_params(i: int, j: int, n: int) -> SubspaceFamily:
    """Two-dimensional subspace family for basis states |i>, |j| (1-based,
    i < j): the returned assignments zero every amplitude outside {i, j}."""
    if not (1 <= i < j <= n):
        raise ValueError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    theta_assignments: dict[int, float] = {}
    for k in range(1, n):
        if k == i:
            continue  # free mixing angle
        if k < j:
            theta_assignments[k] = math.pi / 2.0
        elif k == j:
            theta_assignments[k] = 0.0  # cos factor 1, kills all later amplitudes
        else:
            theta_assignments[k] = math.pi / 2.0
    phi_assignments = {k: 0.0 for k in range(1, n) if k != j - 1}
    return SubspaceFamily(
        dim=n,
        i=i,
        j=j,
        theta_assignments=theta_assignments,
        phi_assignments=phi_assignments,
        free_theta=i,
        free_phi=j - 1,
    )


def params_from_ket(ket) -> MeasurementParams:
    """Invert the parameterization for a target ket (as a ray).

    The returned parameters reproduce the input up to a global phase; the
    mixing angles land in [0, pi/2] and phases carry the amplitude args.
    """
    b = np.asarray(ket, dtype=np.complex128).ravel()
    n = b.size
    if n < 2:
        raise ValueError("ket must have dimension >= 2")
    b = b / np.linalg.norm(b)
    if abs(b[0]) > 1e-15:
        b = b * np.exp(-1j * np.angle(b[0]))
    thetas = []
    phis = []
    remaining = 1.0
    for k in range(n - 1):
        if remaining > 1e-15:
            c = min(1.0, abs(b[k]) / remaining)
        else:
            c = 0.0
        t = math.acos(c)
        thetas.append(t)
        remaining *= math.sin(t)
    for k in range(1, n):
        phis.append(float(np.angle(b[k]) % (2.0 * math.pi)) if abs(b[k]) > 1e-15 else 0.0)
    return MeasurementParams(dim=n, thetas=tuple(thetas), phis=tuple(phis))
