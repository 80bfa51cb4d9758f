"""Viscous reference solver: embedding, stability, tail control, and
agreement with the hyperbolic solver as the viscosity vanishes."""

import numpy as np
import pytest

from photonbec.fields import CellField, GridSpec
from photonbec.godunov import run_from, sample_initial
from photonbec.model import FluxModel
from photonbec.viscous import (
    ViscousConfig,
    embed,
    restrict,
    run_viscous,
    viscous_stable_dt,
    viscous_step,
)


def make_config(eps=1e-2, cells=600):
    # extended grid [-2, 6] around the default support radius R = 2
    return ViscousConfig(epsilon=eps, cells=cells)


class TestConfig:
    def test_default_extent(self):
        config = make_config()
        assert config.x_min == -2.0
        assert config.x_max == 6.0  # 2R + 2

    def test_validation(self):
        with pytest.raises(ValueError):
            ViscousConfig(epsilon=0.0)
        with pytest.raises(ValueError):
            ViscousConfig(epsilon=1e-2, x_min=0.0)  # must cover -1
        with pytest.raises(ValueError):
            ViscousConfig(epsilon=1e-2, x_max=3.0)  # must cover 2R


class TestEmbedRestrict:
    def test_round_trip(self):
        config = make_config(cells=800)  # dx = 0.01
        half = GridSpec(0.0, 4.0, 400)
        field = sample_initial("box", half, left=0.5, right=1.5, height=1.0)
        extended = embed(field, config)
        assert extended.grid == config.grid
        assert extended.values.sum() == pytest.approx(field.values.sum())
        back = restrict(extended, half)
        assert np.array_equal(back.values, field.values)

    def test_incommensurate_grids_rejected(self):
        config = make_config(cells=800)
        half = GridSpec(0.0, 4.0, 300)  # dx mismatch
        field = sample_initial("box", half, left=0.5, right=1.5, height=1.0)
        with pytest.raises(ValueError, match="incommensurate"):
            embed(field, config)

    def test_misaligned_subgrid_rejected(self):
        config = make_config(cells=800)
        shifted = GridSpec(0.005, 4.005, 400)  # same dx, half-cell shift
        with pytest.raises(ValueError):
            restrict(CellField(config.grid, np.zeros(800)), shifted)


class TestStepping:
    def test_stable_dt_diffusion_limited(self):
        config = make_config(eps=1.0, cells=800)
        state = CellField(config.grid, np.zeros(800))
        dx = config.grid.dx
        expected = 0.3 * dx * dx / 2.0  # dx^2/(2 eps) beats dx/S here
        assert viscous_stable_dt(state, 1.0, 0.3) == pytest.approx(expected)

    def test_stable_dt_validation(self):
        state = CellField(make_config().grid, np.zeros(600))
        with pytest.raises(ValueError):
            viscous_stable_dt(state, -1.0, 0.3)
        with pytest.raises(ValueError):
            viscous_stable_dt(state, 1e-2, 1.5)

    def test_pure_diffusion_of_mass(self):
        # one step: interior diffusion conserves mass away from the ends
        config = make_config(cells=800)
        state = embed(
            sample_initial("box", GridSpec(0.0, 4.0, 400), left=1.0, right=1.5, height=1.0),
            config,
        )
        dt = viscous_stable_dt(state, config.epsilon, config.cfl,
                               model=config.model)
        after = viscous_step(state, dt, config.epsilon, model=config.model)
        assert after.values.min() >= -1e-14
        assert after.values.sum() * config.grid.dx == pytest.approx(
            state.values.sum() * config.grid.dx, abs=1e-12)

    def test_smoothing(self):
        config = make_config(cells=800)
        state = embed(
            sample_initial("box", GridSpec(0.0, 4.0, 400), left=1.0, right=1.5, height=1.0),
            config,
        )
        _, snaps = run_viscous(config, state, [0.2])
        jumps = np.abs(np.diff(snaps[-1])).max()
        assert jumps < 0.5 * np.abs(np.diff(state.values)).max()

    def test_right_tail_stays_small(self):
        # data supported in [0, R]: mass beyond R + 0.5 stays below 1e-3
        config = make_config(eps=1e-2, cells=1600)  # dx = 0.005
        half = GridSpec(0.0, 4.0, 800)
        initial = embed(
            sample_initial("box", half, left=0.5, right=1.9, height=1.2), config)
        times, snaps = run_viscous(config, initial, [1.0, 3.0, 5.0])
        x = config.grid.centers()
        for snap in snaps:
            tail = config.grid.dx * snap[x > 2.5].sum()
            assert tail <= 1e-3


def test_vanishing_viscosity_approaches_godunov():
    half = GridSpec(0.0, 4.0, 800)
    initial = sample_initial("box", half, left=0.5, right=1.5, height=1.0)
    reference = run_from(initial, [0.5]).snapshot_field(-1)
    gaps = []
    for eps in (2e-2, 5e-3):
        config = ViscousConfig(epsilon=eps, cells=1600)
        _, snaps = run_viscous(config, embed(initial, config), [0.5])
        viscous = restrict(CellField(config.grid, snaps[-1]), half)
        gaps.append(half.dx * float(np.abs(viscous.values - reference.values).sum()))
    assert gaps[1] < gaps[0]
    assert gaps[1] < 0.1


def test_larger_radius_model():
    fm = FluxModel(support_radius=4.0)
    config = ViscousConfig(epsilon=1e-2, model=fm, x_min=-2.0, x_max=10.0, cells=1200)
    assert config.grid.x_max == 10.0
    initial = CellField(config.grid, np.zeros(1200))
    times, snaps = run_viscous(config, initial, [0.1])
    assert np.all(snaps[-1] == 0.0)  # zero state is stationary
