"""Viscous reference solver on the extended real line.

Evolves d_t n + d_x (g_ext(x) n - n^2) = eps d_x^2 n with the same Godunov
convective flux as the hyperbolic solver (so eps -> 0 degenerates to it
exactly) plus a centered second difference, with homogeneous Dirichlet
values at the far ends of the extended grid.  Restriction of the vanishing
viscosity limit to the half-line cross-validates the hyperbolic solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit

from .fields import CellField, GridSpec
from .godunov import SPEED_FLOOR, SolverError, _godunov_flux_scalar
from .model import FluxModel

__all__ = [
    "ViscousConfig",
    "viscous_stable_dt",
    "viscous_step",
    "run_viscous",
    "restrict",
]


@dataclass
class ViscousConfig:
    """Diffusive regularization on an extended grid covering [-1, 2R]."""

    epsilon: float
    model: FluxModel = field(default_factory=FluxModel)
    x_min: float = -2.0
    x_max: Optional[float] = None  # defaults to 2R + 2
    cells: int = 2000
    cfl: float = 0.3  # explicit diffusion plus convection: keep the sum of
    # CFL fractions below 1 so the update stays monotone

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.x_max is None:
            self.x_max = 2.0 * self.model.support_radius + 2.0
        if self.x_min > -1.0 or self.x_max < 2.0 * self.model.support_radius:
            raise ValueError("extended grid must cover [-1, 2R] with margin")

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.x_min, self.x_max, self.cells)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _viscous_max_speed(n, gi):
    m = n.size
    s = SPEED_FLOOR
    for i in range(m + 1):
        nl = n[i - 1] if i > 0 else 0.0  # Dirichlet ghosts
        nr = n[i] if i < m else 0.0
        a = abs(gi[i] - 2.0 * nl)
        if a > s:
            s = a
        a = abs(gi[i] - 2.0 * nr)
        if a > s:
            s = a
    return s


@njit(cache=True)
def _viscous_fluxes(n, gi, out):
    m = n.size
    out[0] = _godunov_flux_scalar(0.0, n[0], gi[0])
    for i in range(1, m):
        out[i] = _godunov_flux_scalar(n[i - 1], n[i], gi[i])
    out[m] = _godunov_flux_scalar(n[m - 1], 0.0, gi[m])


@njit(cache=True)
def _viscous_update(n, gi, dx, eps, dt, flux, out):
    m = n.size
    _viscous_fluxes(n, gi, flux)
    r = dt / dx
    d = eps * dt / (dx * dx)
    for i in range(m):
        left = n[i - 1] if i > 0 else 0.0
        right = n[i + 1] if i < m - 1 else 0.0
        out[i] = n[i] - r * (flux[i + 1] - flux[i]) + d * (right - 2.0 * n[i] + left)


@njit(cache=True)
def _advance_viscous(n, gi, dx, eps, cfl, t, t_stop):
    m = n.size
    flux = np.empty(m + 1)
    work = np.empty(m)
    steps = 0
    eps_t = 1e-12 * (1.0 if t_stop < 1.0 else t_stop)
    while t_stop - t > eps_t:
        s = _viscous_max_speed(n, gi)
        dt_conv = dx / s
        dt_diff = dx * dx / (2.0 * eps)
        dt = cfl * (dt_conv if dt_conv < dt_diff else dt_diff)
        if t + dt >= t_stop:
            dt = t_stop - t
        _viscous_update(n, gi, dx, eps, dt, flux, work)
        for i in range(m):
            n[i] = work[i]
        t += dt
        steps += 1
    return steps


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def _interface_g_extended(config: ViscousConfig) -> np.ndarray:
    return np.asarray(config.model.g_extended(config.grid.interfaces()), dtype=float)


def viscous_stable_dt(state: CellField, epsilon: float, cfl: float,
                      model: Optional[FluxModel] = None,
                      t_remaining: float = np.inf) -> float:
    """dt = cfl * min(dx / S, dx^2 / (2 eps)) with S from the extended g."""
    if not 0.0 < cfl < 1.0:
        raise ValueError(f"cfl must lie in (0, 1), got {cfl}")
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if np.any(state.values < -SPEED_FLOOR):
        raise SolverError("state has negative cells")
    if model is None:
        model = FluxModel()
    gi = np.asarray(model.g_extended(state.grid.interfaces()), dtype=float)
    s = _viscous_max_speed(state.values, gi)
    dx = state.grid.dx
    return min(cfl * min(dx / s, dx * dx / (2.0 * epsilon)), t_remaining)


def viscous_step(state: CellField, dt: float, epsilon: float,
                 model: Optional[FluxModel] = None) -> CellField:
    """One explicit convection-diffusion update with Dirichlet far ends."""
    if model is None:
        model = FluxModel()
    gi = np.asarray(model.g_extended(state.grid.interfaces()), dtype=float)
    n = state.values
    flux = np.empty(n.size + 1)
    out = np.empty(n.size)
    _viscous_update(n, gi, state.grid.dx, epsilon, dt, flux, out)
    if out.min() < min(float(n.min()), 0.0) - 1e-12:
        raise SolverError(f"stability breached at dt={dt}")
    return CellField(state.grid, out)


def run_viscous(config: ViscousConfig, initial: CellField, snapshot_times):
    """Advance the viscous problem, snapshotting at the given instants.

    Returns (times, snapshots) with snapshots as plain arrays on the
    extended grid.
    """
    grid = config.grid
    if initial.grid != grid:
        raise ValueError("initial state must live on the configured extended grid")
    snapshot_times = sorted(float(t) for t in snapshot_times)
    if not snapshot_times or snapshot_times[0] > 0.0:
        snapshot_times = [0.0] + snapshot_times
    gi = _interface_g_extended(config)
    n = initial.values.copy()
    times = [0.0]
    snapshots = [n.copy()]
    t = 0.0
    for target in snapshot_times:
        if target <= 0.0:
            continue
        _advance_viscous(n, gi, grid.dx, config.epsilon, config.cfl, t, target)
        t = target
        if not np.all(np.isfinite(n)):
            raise SolverError(f"non-finite viscous state at t={t}")
        times.append(t)
        snapshots.append(n.copy())
    return times, snapshots


def embed(halfline: CellField, config: ViscousConfig) -> CellField:
    """Zero-extend a half-line field onto the configured extended grid."""
    ext = config.grid
    offset = _aligned_offset(ext, halfline.grid)
    values = np.zeros(ext.cells)
    values[offset:offset + halfline.grid.cells] = halfline.values
    return CellField(ext, values)


def restrict(extended: CellField, halfline_grid: GridSpec) -> CellField:
    """Copy the cells overlapping the half-line grid (bit-exact)."""
    offset = _aligned_offset(extended.grid, halfline_grid)
    return CellField(
        halfline_grid,
        extended.values[offset:offset + halfline_grid.cells].copy(),
    )


def _aligned_offset(ext: GridSpec, sub: GridSpec) -> int:
    if abs(ext.dx - sub.dx) > 1e-12 * max(ext.dx, sub.dx):
        raise ValueError(f"grids are incommensurate: dx {ext.dx} vs {sub.dx}")
    shift = (sub.x_min - ext.x_min) / ext.dx
    offset = round(shift)
    if abs(shift - offset) > 1e-9:
        raise ValueError("sub-grid is not aligned with the extended grid")
    if offset < 0 or offset + sub.cells > ext.cells:
        raise ValueError("sub-grid does not fit inside the extended grid")
    return offset
