"""Shared grid/field/ledger types used by the solvers and diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSpec",
    "CellField",
    "StepRecord",
    "ConservationLedger",
    "TimeSeriesRecord",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform cell-centered grid on [x_min, x_max]."""

    x_min: float
    x_max: float
    cells: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError(f"x_max must exceed x_min, got [{self.x_min}, {self.x_max}]")
        if self.cells < 8:
            raise ValueError(f"need at least 8 cells, got {self.cells}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.cells

    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.cells) + 0.5) * self.dx

    def interfaces(self) -> np.ndarray:
        return self.x_min + np.arange(self.cells + 1) * self.dx


@dataclass
class CellField:
    """Piecewise-constant grid function (cell averages of the density)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.cells,):
            raise ValueError(
                f"values must have shape ({self.grid.cells},), got {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")

    def copy(self) -> "CellField":
        return CellField(self.grid, self.values.copy())


@dataclass(frozen=True)
class StepRecord:
    """Boundary fluxes realized by one conservative update."""

    dt: float
    left_outflux: float  # signed flux at x = x_min; <= 0 for physical states
    right_influx: float  # signed flux at x = x_max


@dataclass
class ConservationLedger:
    """Running photon balance: interior mass, condensate out-flux at the
    left boundary, and accumulated right-boundary flux.

    Closure: initial = current + condensate - right_flux_accum, up to
    floating-point accumulation.
    """

    initial_number: float
    current_number: float
    condensate_mass: float = 0.0
    right_flux_accum: float = 0.0

    def residual(self) -> float:
        return (
            self.current_number
            + self.condensate_mass
            - self.right_flux_accum
            - self.initial_number
        )


@dataclass(frozen=True)
class TimeSeriesRecord:
    """Per-snapshot diagnostics row."""

    t: float
    photon_number: float
    condensate_mass: float
    total_variation: float
    min_forward_slope: float
    alpha_fit: float
    l1_to_alpha_fit: float
    lower_bound: float
