# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import math

import numpy as np
import pytest

from elastoslab.diagnostics import (
    CSV_COLUMNS,
    Measurement,
    constraint_report,
    energy_kappa,
    energy_limit,
    good_unknown_residual,
    hodge_check,
    noncollinear_gain_check,
    normal_trace_check,
    reconstruct_tangential,
    record_state,
    stability_margins,
    tangential_system,
)
from elastoslab.errors import DegenerateMinor
from elastoslab.evolution import initial_state
from elastoslab.grid import Grid, MatrixField, from_function
from elastoslab.initial_data import (
    BoundaryPartition,
    assemble_initial_data,
    make_G0,
    make_velocity,
    random_band_limited,
)
from elastoslab.mollifier import make_kernel


def rest_state(n=16, partition=None):
    grid = Grid(n, n, n)
    initial = assemble_initial_data(make_velocity(grid, "zero"), "canonical")
    state = initial_state(initial, make_kernel(0.2, grid))
    if partition is not None:
        state.partition = partition
    return state


def test_measurement():
    assert Measurement(1.0, 2.0).ratio == 0.5
    assert Measurement(0.0, 0.0).ratio == 0.0
    assert Measurement(1.0, 0.0).ratio == math.inf


def test_energies_at_rest():
    state = rest_state()
    E_limit, parts_limit = energy_limit(state)
    E_kappa, parts_kappa = energy_kappa(state)

    assert parts_limit["v"] == 0.0
    assert parts_limit["boundary"] == 0.0
    assert abs(E_limit - E_kappa) < 1e-12 * E_limit
    # ||Id||_4^2 = int |x|^2 + int |grad x|^2 = 4
    assert abs(parts_limit["eta"] - 4.0) < 1e-10


def test_energies_with_rt_faces():
    state = rest_state(partition=BoundaryPartition("RT", "RT"))
    E_limit, parts_limit = energy_limit(state)
    E_kappa, parts_kappa = energy_kappa(state)

    assert parts_limit["boundary"] == 0.0
    assert parts_kappa["boundary"] == 0.0
    assert E_limit == E_kappa


def test_record_state():
    state = rest_state()
    record = record_state(state, step=3)

    assert record.step == 3
    assert record.M0 == record.E_kappa
    assert record.apriori.ok
    assert len(record.row()) == len(CSV_COLUMNS)
    assert record.to_json()["step"] == 3
    assert math.isnan(record.margins["rt_top"])
    assert record.margins["nc_bottom"] == 1.0


def test_constraints_at_rest():
    report = constraint_report(rest_state())

    for name, value in report.items():
        assert value < 1e-6, name


def test_stability_margins_use_the_pressure():
    from elastoslab.evolution import solve_state_pressure

    state = rest_state()
    solve_state_pressure(state)
    margins = stability_margins(state)

    assert abs(margins["rt_bottom"]) < 1e-10
    assert margins["nc_top"] == 1.0


def test_hodge_check():
    grid = Grid(16, 16, 16)
    omega = random_band_limited(grid, seed=2, modes=1, rank=1)

    for s in (1, 2):
        measurement = hodge_check(omega, s)
        assert 0 < measurement.ratio < math.inf
    with pytest.raises(ValueError):
        hodge_check(omega, 5)


def test_normal_trace_single_mode():
    grid = Grid(16, 16, 16)
    omega = from_function(grid, lambda x1, x2, x3: [0 * x1, 0 * x1, np.sin(2 * np.pi * x1) + 0 * x3], rank=1)
    exact = 2 * np.pi * (1 + 4 * np.pi ** 2) ** -0.25

    assert abs(normal_trace_check(omega).lhs / exact - 1) < 1e-10


def test_tangential_round_trip():
    grid = Grid(8, 8, 8)
    rng = np.random.default_rng(0)
    G0 = make_G0(grid, "sheared", amplitude=0.2)
    d1 = rng.standard_normal((3,) + grid.surface_shape)
    d2 = rng.standard_normal((3,) + grid.surface_shape)

    for face in ("bottom", "top"):
        r1, r2 = reconstruct_tangential(G0, face, tangential_system(G0, face, d1, d2))
        assert np.max(np.abs(r1 - d1)) < 1e-12
        assert np.max(np.abs(r2 - d2)) < 1e-12


def test_tangential_other_minor():
    grid = Grid(8, 8, 8)
    rng = np.random.default_rng(1)
    values = np.zeros((3, 3) + grid.shape)
    values[0, 2] = 1.0
    values[1, 1] = 1.0
    G0 = MatrixField(grid, values)
    d1 = rng.standard_normal((3,) + grid.surface_shape)
    d2 = rng.standard_normal((3,) + grid.surface_shape)
    r1, r2 = reconstruct_tangential(G0, "top", tangential_system(G0, "top", d1, d2))

    assert np.allclose(r1, d1, atol=1e-12)
    assert np.allclose(r2, d2, atol=1e-12)


def test_tangential_degenerate():
    grid = Grid(8, 8, 8)
    values = np.zeros((3, 3) + grid.shape)
    values[0, 0] = 1.0
    values[1, 0] = 2.0

    with pytest.raises(DegenerateMinor):
        reconstruct_tangential(MatrixField(grid, values), "bottom", np.zeros((3, 3) + grid.surface_shape))


def test_noncollinear_gain_at_rest():
    measurement = noncollinear_gain_check(rest_state())

    assert measurement.lhs == 0.0
    assert measurement.rhs > 0.0


def test_good_unknown_identity_at_rest():
    state = rest_state()
    f = random_band_limited(state.grid, seed=9, modes=1, rank=0)

    for i in (1, 2, 3):
        assert good_unknown_residual(state, f, i, axis=1 + i % 2) < 1e-8


def test_good_unknown_constant():
    state = rest_state()
    f = from_function(state.grid, lambda x1, x2, x3: 1.0 + 0 * x1)

    assert good_unknown_residual(state, f, 2) < 1e-12


def test_record_drifts():
    state = rest_state()
    record = record_state(state)

    assert record.drifts == {"J_minus_1_drift": 0.0, "div_A_v_drift": 0.0, "F_identity_drift": 0.0}
    baseline = dict(record.residuals)
    baseline["J_minus_1"] = 0.5
    later = record_state(state, step=1, M0=record.M0, baseline=baseline)
    assert later.to_json()["J_minus_1_drift"] == 0.5
    assert later.to_json()["F_identity_drift"] == 0.0
    assert len(later.row()) == len(CSV_COLUMNS)
