"""First-order Godunov evolution of the conservation law on the half-line.

Left boundary (x = 0) is a free outflow boundary realized by a copy ghost
cell, which yields the exact out-flux -n(t,0)^2 since g(0) = 0.  The right
boundary uses a zero ghost value (no inflow).  The scheme is monotone under
the CFL bound, so discrete comparison, L1 contraction, positivity and the
entropy inequality all hold at the grid level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit

from . import model
from .fields import CellField, ConservationLedger, GridSpec, StepRecord

__all__ = [
    "SolverError",
    "Trajectory",
    "numerical_flux",
    "stable_dt",
    "step",
    "sample_initial",
    "run",
    "PRESETS",
]

SPEED_FLOOR = 1e-12


class SolverError(RuntimeError):
    """Raised when a step breaks the discrete max principle (CFL breach)."""


# ---------------------------------------------------------------------------
# numba kernels (hot path)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _godunov_flux_scalar(nl, nr, gi):
    if nl <= nr:
        fl = gi * nl - nl * nl
        fr = gi * nr - nr * nr
        return fl if fl < fr else fr
    ns = 0.5 * gi  # sonic point of the concave flux
    if ns < nr:
        ns = nr
    elif ns > nl:
        ns = nl
    return gi * ns - ns * ns


@njit(cache=True)
def _interface_fluxes(n, gi, out):
    m = n.size
    out[0] = _godunov_flux_scalar(n[0], n[0], gi[0])  # copy ghost (outflow)
    for i in range(1, m):
        out[i] = _godunov_flux_scalar(n[i - 1], n[i], gi[i])
    out[m] = _godunov_flux_scalar(n[m - 1], 0.0, gi[m])  # zero-inflow ghost


@njit(cache=True)
def _max_speed(n, gi):
    m = n.size
    s = SPEED_FLOOR
    for i in range(m + 1):
        nl = n[i - 1] if i > 0 else n[0]
        nr = n[i] if i < m else 0.0
        a = abs(gi[i] - 2.0 * nl)
        if a > s:
            s = a
        a = abs(gi[i] - 2.0 * nr)
        if a > s:
            s = a
    return s


@njit(cache=True)
def _advance(n, gi, dx, cfl, t, t_stop):
    """Advance in place to t_stop.  Returns (steps, condensate_inc,
    right_accum_inc); the boundary-flux integrals use compensated sums so
    the ledger closes to rounding over millions of steps."""
    m = n.size
    flux = np.empty(m + 1)
    comp = np.zeros(m)  # per-cell compensation for the state update
    cond = 0.0
    cond_c = 0.0
    racc = 0.0
    racc_c = 0.0
    steps = 0
    eps_t = 1e-12 * (1.0 if t_stop < 1.0 else t_stop)
    while t_stop - t > eps_t:
        s = _max_speed(n, gi)
        dt = cfl * dx / s
        if t + dt >= t_stop:
            dt = t_stop - t
        _interface_fluxes(n, gi, flux)
        r = dt / dx
        for i in range(m):
            y = -r * (flux[i + 1] - flux[i]) - comp[i]
            tmp = n[i] + y
            comp[i] = (tmp - n[i]) - y
            n[i] = tmp
        y = -dt * flux[0] - cond_c
        tmp = cond + y
        cond_c = (tmp - cond) - y
        cond = tmp
        y = dt * flux[m] - racc_c
        tmp = racc + y
        racc_c = (tmp - racc) - y
        racc = tmp
        t += dt
        steps += 1
    return steps, cond, racc


@njit(cache=True)
def _advance_pair(a, b, gi, dx, cfl, t, t_stop):
    """Advance two states with a shared step schedule, tracking the worst
    per-step comparison violation max(a - b) and the worst per-step L1
    expansion.  Both should be <= 0 up to rounding for nested data."""
    m = a.size
    fa = np.empty(m + 1)
    fb = np.empty(m + 1)
    max_cmp = -np.inf
    max_l1_inc = -np.inf
    l1_old = 0.0
    for i in range(m):
        l1_old += abs(a[i] - b[i])
    l1_old *= dx
    eps_t = 1e-12 * (1.0 if t_stop < 1.0 else t_stop)
    steps = 0
    while t_stop - t > eps_t:
        sa = _max_speed(a, gi)
        sb = _max_speed(b, gi)
        s = sa if sa > sb else sb
        dt = cfl * dx / s
        if t + dt >= t_stop:
            dt = t_stop - t
        _interface_fluxes(a, gi, fa)
        _interface_fluxes(b, gi, fb)
        r = dt / dx
        l1_new = 0.0
        for i in range(m):
            a[i] -= r * (fa[i + 1] - fa[i])
            b[i] -= r * (fb[i + 1] - fb[i])
            d = a[i] - b[i]
            if d > max_cmp:
                max_cmp = d
            l1_new += abs(d)
        l1_new *= dx
        if l1_new - l1_old > max_l1_inc:
            max_l1_inc = l1_new - l1_old
        l1_old = l1_new
        t += dt
        steps += 1
    return steps, max_cmp, max_l1_inc


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def numerical_flux(n_left, n_right, g_iface):
    """Godunov interface flux for f(n) = g n - n^2 (concave in n).

    min of f over [n_left, n_right] when n_left <= n_right, otherwise the
    max, attained at the sonic point g/2 clamped to the interval.
    """
    nl = np.asarray(n_left, dtype=float)
    nr = np.asarray(n_right, dtype=float)
    gi = np.asarray(g_iface, dtype=float)
    fl = gi * nl - nl * nl
    fr = gi * nr - nr * nr
    ns = np.clip(0.5 * gi, np.minimum(nl, nr), np.maximum(nl, nr))
    out = np.where(nl <= nr, np.minimum(fl, fr), gi * ns - ns * ns)
    return float(out) if out.ndim == 0 else out


def _interface_g(grid: GridSpec) -> np.ndarray:
    return model.g_interior(grid.interfaces())


def stable_dt(state: CellField, cfl: float, t_remaining: float = math.inf) -> float:
    """CFL time step: cfl * dx / max |wave speed|, capped by t_remaining."""
    if not 0.0 < cfl < 1.0:
        raise ValueError(f"cfl must lie in (0, 1), got {cfl}")
    if np.any(state.values < -SPEED_FLOOR):
        raise SolverError("state has negative cells")
    s = _max_speed(state.values, _interface_g(state.grid))
    return min(cfl * state.grid.dx / s, t_remaining)


def step(state: CellField, dt: float):
    """One conservative update.  Returns (new state, StepRecord).

    The caller is responsible for dt <= stable_dt; a post-hoc max-principle
    breach raises SolverError.
    """
    grid = state.grid
    n = state.values
    gi = _interface_g(grid)
    flux = np.empty(n.size + 1)
    _interface_fluxes(n, gi, flux)
    new = n - (dt / grid.dx) * (flux[1:] - flux[:-1])

    # Positivity is preserved exactly; the sup can grow where g decreases
    # (compression), at rate at most max(-g') per unit time.
    lo = min(float(n.min()), 0.0) - 1e-12
    g_drop = float(np.maximum(gi[:-1] - gi[1:], 0.0).max()) / grid.dx
    hi = max(float(n.max()), 0.0) * (1.0 + dt * g_drop) + 1e-12
    if new.min() < lo or new.max() > hi:
        raise SolverError(
            f"update left the invariant region (dt={dt}): "
            f"range [{new.min()}, {new.max()}] vs [{lo}, {hi}]"
        )
    record = StepRecord(dt=dt, left_outflux=float(flux[0]), right_influx=float(flux[-1]))
    return CellField(grid, new), record


# ---------------------------------------------------------------------------
# initial data presets
# ---------------------------------------------------------------------------

_GAUSS4_NODES = np.array(
    [-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526]
)
_GAUSS4_WEIGHTS = np.array(
    [0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538]
)


def _box_averages(grid: GridSpec, left, right, height):
    edges = grid.interfaces()
    overlap = np.clip(np.minimum(edges[1:], right) - np.maximum(edges[:-1], left), 0.0, None)
    return height * overlap / grid.dx


def _bump_averages(grid: GridSpec, center, width, height):
    # polynomial bump h (1 - s^2)^2 on |s| <= 1, s = (x - center)/width
    edges = grid.interfaces()
    s = np.clip((edges - center) / width, -1.0, 1.0)
    anti = s - (2.0 / 3.0) * s**3 + 0.2 * s**5
    return height * width * (anti[1:] - anti[:-1]) / grid.dx


def _bose_einstein_averages(grid: GridSpec, mu, cutoff):
    edges = grid.interfaces()
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * grid.dx
    x = mid[:, None] + half * _GAUSS4_NODES[None, :]
    vals = np.where(x > 0.0, x * x / np.expm1(np.maximum(x, 1e-300) + mu), 0.0)
    vals = np.where(x <= cutoff, vals, 0.0)
    return 0.5 * (vals @ _GAUSS4_WEIGHTS)


def sample_initial(preset: str, grid: GridSpec, **params) -> CellField:
    """Exact (or high-order, for bose_einstein) cell averages of a preset."""
    x_lo, x_hi = grid.x_min, grid.x_max
    if preset == "equilibrium" or preset == "scaled_equilibrium":
        alpha = params.pop("alpha")
        scale = params.pop("scale", 1.0) if preset == "scaled_equilibrium" else 1.0
        _reject_extras(preset, params)
        if x_hi < 2.0 or x_lo > 0.0:
            raise ValueError("equilibrium presets need the grid to cover [0, 2]")
        if scale < 0.0:
            raise ValueError(f"scale must be non-negative, got {scale}")
        values = model.equilibrium_cell_averages(alpha, grid.interfaces(), scale)
    elif preset == "box":
        left, right, height = params.pop("left"), params.pop("right"), params.pop("height")
        _reject_extras(preset, params)
        if not (x_lo <= left < right <= x_hi):
            raise ValueError(f"box [{left}, {right}] must lie inside [{x_lo}, {x_hi}]")
        if height < 0.0:
            raise ValueError(f"height must be non-negative, got {height}")
        values = _box_averages(grid, left, right, height)
    elif preset == "bump":
        center, width, height = params.pop("center"), params.pop("width"), params.pop("height")
        _reject_extras(preset, params)
        if width <= 0.0 or height < 0.0:
            raise ValueError("bump needs width > 0 and height >= 0")
        if center - width < x_lo or center + width > x_hi:
            raise ValueError("bump support must lie inside the grid")
        values = _bump_averages(grid, center, width, height)
    elif preset == "bose_einstein":
        mu, cutoff = params.pop("mu"), params.pop("cutoff")
        _reject_extras(preset, params)
        if mu < 0.0:
            raise ValueError(f"mu must be non-negative, got {mu}")
        if not (x_lo < cutoff <= x_hi):
            raise ValueError(f"cutoff must lie in ({x_lo}, {x_hi}], got {cutoff}")
        values = _bose_einstein_averages(grid, mu, cutoff)
    else:
        raise ValueError(f"unknown preset {preset!r}; valid presets: {sorted(PRESETS)}")
    return CellField(grid, values)


def _reject_extras(preset, params):
    if params:
        raise ValueError(f"unexpected parameters for preset {preset!r}: {sorted(params)}")


PRESETS = {
    "equilibrium": ("alpha",),
    "scaled_equilibrium": ("scale", "alpha"),
    "box": ("left", "right", "height"),
    "bump": ("center", "width", "height"),
    "bose_einstein": ("mu", "cutoff"),
}


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    """Snapshots at requested instants plus the running photon ledger."""

    grid: GridSpec
    times: list[float] = field(default_factory=list)
    snapshots: list[np.ndarray] = field(default_factory=list)
    ledger: Optional[ConservationLedger] = None
    records: Optional[list[StepRecord]] = None
    steps: int = 0

    def snapshot_field(self, index: int) -> CellField:
        return CellField(self.grid, self.snapshots[index].copy())


def run(config, record_steps: bool = False) -> Trajectory:
    """Advance a scenario from t = 0 to t_end, emitting snapshots at the
    configured instants (hit exactly by capping dt)."""
    grid = GridSpec(0.0, config.x_max, config.cells)
    state = sample_initial(config.preset, grid, **config.params)
    return run_from(
        state,
        snapshot_times=config.snapshot_times,
        cfl=config.cfl,
        record_steps=record_steps,
    )


def run_from(
    initial: CellField,
    snapshot_times,
    cfl: float = 0.45,
    record_steps: bool = False,
) -> Trajectory:
    """Advance an explicit initial state, snapshotting at the given instants."""
    snapshot_times = sorted(float(t) for t in snapshot_times)
    if snapshot_times and snapshot_times[0] < 0.0:
        raise ValueError("snapshot times must be non-negative")
    if not snapshot_times or snapshot_times[0] > 0.0:
        snapshot_times = [0.0] + snapshot_times
    if not 0.0 < cfl < 1.0:
        raise ValueError(f"cfl must lie in (0, 1), got {cfl}")

    grid = initial.grid
    n = initial.values.copy()
    gi = _interface_g(grid)
    n0_number = grid.dx * float(n.sum())
    ledger = ConservationLedger(initial_number=n0_number, current_number=n0_number)
    traj = Trajectory(grid=grid, ledger=ledger, records=[] if record_steps else None)

    t = 0.0
    traj.times.append(0.0)
    traj.snapshots.append(n.copy())
    for target in snapshot_times:
        if target <= 0.0:
            continue
        if record_steps:
            state = CellField(grid, n)
            while target - t > 1e-12 * max(1.0, target):
                dt = stable_dt(state, cfl, t_remaining=target - t)
                state, rec = step(state, dt)
                traj.records.append(rec)
                ledger.condensate_mass += dt * (-rec.left_outflux)
                ledger.right_flux_accum += dt * rec.right_influx
                t += dt
                traj.steps += 1
            n = state.values
        else:
            steps, cond_inc, racc_inc = _advance(n, gi, grid.dx, cfl, t, target)
            ledger.condensate_mass += cond_inc
            ledger.right_flux_accum += racc_inc
            traj.steps += steps
        t = target
        if not np.all(np.isfinite(n)):
            raise SolverError(f"non-finite state at t={t}")
        ledger.current_number = grid.dx * float(n.sum())
        traj.times.append(t)
        traj.snapshots.append(n.copy())
    return traj


def run_pair(a: CellField, b: CellField, t_end: float, cfl: float = 0.45):
    """Evolve two states with a shared step schedule.

    Returns (final a, final b, max per-step cellwise a - b, max per-step
    increase of the L1 distance).  Used by the comparison and contraction
    checks.
    """
    if a.grid != b.grid:
        raise ValueError("pair runs need a common grid")
    va, vb = a.values.copy(), b.values.copy()
    gi = _interface_g(a.grid)
    _, max_cmp, max_l1_inc = _advance_pair(va, vb, gi, a.grid.dx, cfl, 0.0, t_end)
    return CellField(a.grid, va), CellField(a.grid, vb), max_cmp, max_l1_inc
