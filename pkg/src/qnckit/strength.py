"""Measure-averaged strength of the characteristic response function.

The directed strength along A -> B is

    G = (sqrt(n_A) / Omega) * integral of |F| * Tr(rho_A M) d(Omega)

over the measurement parameter box with the weight prod sin(theta_l)^(n-l-1);
the integrand is always evaluated as p * |F| in one expression, which stays
bounded where p -> 0 (undefined samples contribute 0).  The symmetric
strength averages the two directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .characteristic import EPS_P, char_batch
from .matrix_core import DensityMatrix, swap_split
from .measurement import omega_volume, sample_params_batch

_CHUNK = 1 << 15


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration backend selection.

    ``mode`` is "quadrature", "monte-carlo", or "auto" (quadrature for a
    two-dimensional measured side, Monte Carlo above that, where the
    parameter box has four or more dimensions).
    """

    mode: str = "auto"
    grid: int = 128
    samples: int = 100_000
    seed: int = 0
    eps_p: float = EPS_P

    def __post_init__(self):
        if self.mode not in ("auto", "quadrature", "monte-carlo"):
            raise ValueError(f"unknown integrator mode {self.mode!r}")
        if self.grid < 2 or self.samples < 2:
            raise ValueError("grid and sample counts must be positive")

    def resolve_mode(self, n_meas: int) -> str:
        if self.mode != "auto":
            return self.mode
        return "quadrature" if n_meas == 2 else "monte-carlo"


@dataclass(frozen=True)
class StrengthResult:
    value: float
    error_estimate: float
    direction: str  # "AB" | "BA" | "sym"


def integrand_batch(
    rho: DensityMatrix, thetas: np.ndarray, phis: np.ndarray, eps_p: float = EPS_P
) -> np.ndarray:
    """p * |F| for a batch of A-side measurement parameters (0 when undefined)."""
    out = np.empty(thetas.shape[0])
    for lo in range(0, thetas.shape[0], _CHUNK):
        hi = min(lo + _CHUNK, thetas.shape[0])
        b = char_batch(rho, thetas[lo:hi], phis[lo:hi], eps_p=eps_p)
        out[lo:hi] = np.where(b.defined, b.p * b.magnitude, 0.0)
    return out


@lru_cache(maxsize=64)
def _gauss_grid(n_meas: int, grid: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flattened tensor-product Gauss-Legendre grid over the parameter box
    with the theta measure weight folded into the point weights."""
    x, w = np.polynomial.legendre.leggauss(grid)
    nodes, weights = [], []
    for l in range(1, n_meas):  # theta axes
        t = (x + 1.0) * (math.pi / 2.0)
        wt = w * (math.pi / 2.0) * np.sin(t) ** (n_meas - l - 1)
        nodes.append(t)
        weights.append(wt)
    for _ in range(1, n_meas):  # phi axes
        nodes.append((x + 1.0) * math.pi)
        weights.append(w * math.pi)
    m = n_meas - 1
    mesh = np.meshgrid(*nodes, indexing="ij")
    wmesh = np.meshgrid(*weights, indexing="ij")
    total_w = np.ones_like(wmesh[0])
    for wm in wmesh:
        total_w = total_w * wm
    thetas = np.stack([a.ravel() for a in mesh[:m]], axis=-1)
    phis = np.stack([a.ravel() for a in mesh[m:]], axis=-1)
    for a in (thetas, phis, total_w):
        a.setflags(write=False)
    return thetas, phis, total_w.ravel()


def _quadrature_value(rho: DensityMatrix, n_meas: int, grid: int, eps_p: float) -> float:
    if grid ** (2 * (n_meas - 1)) > 1 << 22:
        raise ValueError(
            f"quadrature grid {grid} over {2 * (n_meas - 1)} parameters is too large; "
            "use Monte-Carlo mode for measured sides above dimension 2"
        )
    thetas, phis, w = _gauss_grid(n_meas, grid)
    f = integrand_batch(rho, thetas, phis, eps_p=eps_p)
    integral = float(np.sum(w * f))
    return math.sqrt(n_meas) / omega_volume(n_meas) * integral


def strength_directed(
    rho: DensityMatrix,
    direction: str = "AB",
    cfg: IntegratorConfig | None = None,
    with_error: bool = True,
) -> StrengthResult:
    """Directed strength; ``direction`` is "AB" (measure A) or "BA".

    ``with_error=False`` skips the half-resolution refinement delta
    (quadrature mode only); search loops that merely rank candidates use it.
    """
    cfg = cfg or IntegratorConfig()
    if direction == "AB":
        state = rho
    elif direction == "BA":
        state = swap_split(rho)
    else:
        raise ValueError(f"direction must be 'AB' or 'BA', got {direction!r}")
    n_meas = state.require_split()[0]
    mode = cfg.resolve_mode(n_meas)
    if mode == "quadrature":
        value = _quadrature_value(state, n_meas, cfg.grid, cfg.eps_p)
        err = 0.0
        if with_error:
            coarse = _quadrature_value(state, n_meas, max(cfg.grid // 2, 2), cfg.eps_p)
            err = abs(value - coarse)
        return StrengthResult(value=value, error_estimate=err, direction=direction)
    rng = np.random.default_rng(cfg.seed)
    thetas, phis = sample_params_batch(n_meas, rng, cfg.samples)
    f = integrand_batch(state, thetas, phis, eps_p=cfg.eps_p)
    scale = math.sqrt(n_meas)
    value = scale * float(np.mean(f))
    stderr = scale * float(np.std(f)) / math.sqrt(cfg.samples)
    return StrengthResult(value=value, error_estimate=stderr, direction=direction)


def strength(
    rho: DensityMatrix, cfg: IntegratorConfig | None = None, with_error: bool = True
) -> StrengthResult:
    """Symmetrized strength: the average of the two directed values, with
    the direction errors combined in quadrature."""
    cfg = cfg or IntegratorConfig()
    ab = strength_directed(rho, "AB", cfg, with_error=with_error)
    ba = strength_directed(rho, "BA", cfg, with_error=with_error)
    err = math.sqrt(ab.error_estimate**2 + ba.error_estimate**2) / 2.0
    return StrengthResult(value=(ab.value + ba.value) / 2.0, error_estimate=err, direction="sym")


def result_to_dict(res: StrengthResult, cfg: IntegratorConfig) -> dict:
    return {
        "value": res.value,
        "error": res.error_estimate,
        "direction": res.direction,
        "config": {
            "mode": cfg.mode,
            "grid": cfg.grid,
            "samples": cfg.samples,
            "seed": cfg.seed,
            "eps_p": cfg.eps_p,
        },
    }
