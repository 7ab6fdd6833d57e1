"""Tests for the coupler optimization and the robustness sweeps."""

import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from wchip.circuit import build_transform, canonical_w_circuit
from wchip.elements import two_pair_state
from wchip.errors import GridTooLarge, ParamOutOfRange, ValidationError
from wchip.fock import apply_mode_transform
from wchip.herald import Branch, herald
from wchip.optimize import (
    OptimizationResult,
    SweepSpec,
    herald_objective,
    maximize,
    sweep,
)

from oracles import OPTIMAL_R, herald_prefactor


def test_objective_equals_herald_probability():
    rng = np.random.default_rng(20)
    for _ in range(5):
        r1, r2, r3 = rng.uniform(0.1, 0.9, size=3)
        state = apply_mode_transform(
            two_pair_state(0), build_transform(canonical_w_circuit(r1, r2, r3))
        )
        assert herald_objective(r1, r2, r3) == pytest.approx(
            herald(state, Branch.T1).probability, abs=1e-15
        )


def test_objective_tracks_prefactor():
    assert herald_objective(0.3, 0.6, 0.8) == pytest.approx(
        12.0 * herald_prefactor(0.3, 0.6, 0.8), rel=1e-9
    )


def test_objective_vanishes_on_cube_faces():
    assert herald_objective(0.0, 0.5, 0.5) == 0.0
    assert herald_objective(0.5, 1.0, 0.5) == 0.0


def test_objective_gates_parameters():
    with pytest.raises(ParamOutOfRange):
        herald_objective(-0.1, 0.5, 0.5)


def test_per_axis_optima_match_scalar_minimizer():
    # cross-check the analytic targets with an independent 1-d optimizer on
    # each factor of the separable objective
    factors = (
        lambda r: r * (1 - r * r) ** 1.5,
        lambda r: r * (1 - r * r),
        lambda r: r * math.sqrt(1 - r * r),
    )
    for factor, target in zip(factors, OPTIMAL_R):
        res = minimize_scalar(lambda r: -factor(r), bounds=(0, 1), method="bounded")
        assert res.x == pytest.approx(target, abs=1e-6)


class TestMaximize:
    def test_finds_the_known_optimum(self):
        res = maximize(1e-4, grid_step=0.1, grid_bounds=(0.2, 0.9))
        assert isinstance(res, OptimizationResult)
        assert res.r1 == pytest.approx(OPTIMAL_R[0], abs=1e-3)
        assert res.r2 == pytest.approx(OPTIMAL_R[1], abs=1e-3)
        assert res.r3 == pytest.approx(OPTIMAL_R[2], abs=1e-3)
        assert res.value == pytest.approx(3 / 64, abs=1e-6)

    def test_is_deterministic(self):
        a = maximize(1e-3, grid_step=0.15, grid_bounds=(0.2, 0.8))
        b = maximize(1e-3, grid_step=0.15, grid_bounds=(0.2, 0.8))
        assert a == b

    def test_refinement_beats_the_coarse_grid(self):
        res = maximize(1e-5, grid_step=0.2, grid_bounds=(0.2, 0.8))
        grid_best = max(
            herald_objective(r1, r2, r3)
            for r1 in (0.2, 0.4, 0.6, 0.8)
            for r2 in (0.2, 0.4, 0.6, 0.8)
            for r3 in (0.2, 0.4, 0.6, 0.8)
        )
        assert res.value >= grid_best

    def test_parameter_gates(self):
        with pytest.raises(ParamOutOfRange):
            maximize(0.0)
        with pytest.raises(ParamOutOfRange):
            maximize(1e-4, grid_step=0.7)
        with pytest.raises(ParamOutOfRange):
            maximize(1e-4, grid_bounds=(0.9, 0.1))


class TestSweep:
    def test_axes_are_validated(self):
        with pytest.raises(ValidationError):
            SweepSpec(r1=(), r2=(0.5,), r3=(0.5,))
        with pytest.raises(ParamOutOfRange):
            SweepSpec(r1=(1.5,), r2=(0.5,), r3=(0.5,))
        with pytest.raises(ValidationError):
            SweepSpec(r1=(0.5,), r2=(0.5,), r3=(0.5,), metric="coupling")

    def test_cell_cap(self):
        axis = tuple(np.linspace(0.1, 0.9, 101))
        spec = SweepSpec(r1=axis, r2=axis, r3=axis)
        with pytest.raises(GridTooLarge):
            sweep(spec)

    def test_rows_are_lexicographic_and_match_objective(self):
        spec = SweepSpec(r1=(0.3, 0.5), r2=(0.4, 0.6), r3=(0.7,))
        table = sweep(spec)
        assert table.columns == ("r1", "r2", "r3", "ad2_extinction", "herald_probability")
        assert len(table.rows) == 4
        assert [row[:2] for row in table.rows] == [
            (0.3, 0.4),
            (0.3, 0.6),
            (0.5, 0.4),
            (0.5, 0.6),
        ]
        for r1, r2, r3, _, value in table.rows:
            assert value == pytest.approx(herald_objective(r1, r2, r3), abs=1e-15)

    def test_csv_is_deterministic_text(self):
        spec = SweepSpec(r1=(0.5,), r2=(0.5,), r3=(0.5,))
        assert sweep(spec).to_csv() == sweep(spec).to_csv()
        assert sweep(spec).to_csv().startswith("r1,r2,r3,ad2_extinction,")

    def test_fidelity_metric_ideal_router(self):
        spec = SweepSpec(
            r1=(OPTIMAL_R[0],), r2=(OPTIMAL_R[1],), r3=(OPTIMAL_R[2],),
            metric="w_fidelity",
        )
        (row,) = sweep(spec).rows
        assert row[-1] == pytest.approx(1.0, abs=1e-12)

    def test_fidelity_metric_degrades_as_one_over_one_plus_extinction(self):
        # a blue photon leaking to a color-blind T1 detector heralds the
        # wrong-color branch; its weight relative to the true branch is the
        # extinction, hence F = 1 / (1 + eps)
        eps_axis = (0.0, 0.1, 0.25, 0.5, 1.0)
        spec = SweepSpec(
            r1=(OPTIMAL_R[0],), r2=(OPTIMAL_R[1],), r3=(OPTIMAL_R[2],),
            ad2_extinction=eps_axis,
            metric="w_fidelity",
        )
        table = sweep(spec)
        for row, eps in zip(table.rows, eps_axis):
            assert row[-1] == pytest.approx(1.0 / (1.0 + eps), abs=1e-12)

    def test_fidelity_metric_off_optimum_stays_in_unit_interval(self):
        spec = SweepSpec(
            r1=(0.3, 0.7), r2=(0.4,), r3=(0.6,), ad2_extinction=(0.2,),
            metric="w_fidelity",
        )
        for *_, value in sweep(spec).rows:
            assert 0.0 <= value <= 1.0
