"""Solver-plus-verification laboratory for a hyperbolic photon-number model
with a zero-energy condensate out-flux at the left boundary."""

from .config import ScenarioConfig, parse_config
from .fields import CellField, ConservationLedger, GridSpec, StepRecord, TimeSeriesRecord
from .godunov import SolverError, Trajectory, numerical_flux, run, run_from, sample_initial, stable_dt, step
from .model import (
    FluxModel,
    alpha_from_number,
    equilibrium_number,
    equilibrium_value,
    flux,
    slope_bound,
    supersolution,
    support_curve,
    wave_speed,
)
from .viscous import ViscousConfig, restrict, run_viscous, viscous_stable_dt, viscous_step

__all__ = [
    "CellField",
    "ConservationLedger",
    "FluxModel",
    "GridSpec",
    "ScenarioConfig",
    "SolverError",
    "StepRecord",
    "TimeSeriesRecord",
    "Trajectory",
    "ViscousConfig",
    "alpha_from_number",
    "equilibrium_number",
    "equilibrium_value",
    "flux",
    "numerical_flux",
    "parse_config",
    "restrict",
    "run",
    "run_from",
    "run_viscous",
    "sample_initial",
    "slope_bound",
    "stable_dt",
    "step",
    "supersolution",
    "support_curve",
    "viscous_stable_dt",
    "viscous_step",
    "wave_speed",
]

__version__ = "0.1.0"
