# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import numpy as np
import pytest

from elastoslab.errors import InvalidRecipe, StabilityViolation
from elastoslab.geometry import a_divergence, deformation_gradient, jacobian_and_cofactor, plain_divergence
from elastoslab.grid import Grid, MatrixField, VectorField, from_function
from elastoslab.initial_data import (
    BoundaryPartition,
    assemble_initial_data,
    check_noncollinearity,
    initial_pressure,
    make_displacement,
    make_G0,
    make_velocity,
    noncollinearity_margin,
    project_divergence_free,
)


def test_velocity_recipes_are_divergence_free():
    grid = Grid(16, 16, 16)

    for recipe in ("zero", "shear", "standard", "roll"):
        v = make_velocity(grid, recipe, 0.5)
        assert grid.l2_norm(plain_divergence(v).values) < 1e-10


def test_unknown_recipes():
    grid = Grid(8, 8, 8)

    with pytest.raises(InvalidRecipe):
        make_velocity(grid, "vortex")
    with pytest.raises(InvalidRecipe):
        make_displacement(grid, "bump", 0.1)
    with pytest.raises(InvalidRecipe):
        make_G0(grid, "twisted")


def test_random_velocity_amplitude():
    grid = Grid(16, 16, 16)
    v = make_velocity(grid, "random", 0.02, seed=4)

    assert abs(v.max_abs() - 0.02) < 1e-14
    assert np.array_equal(v.values, make_velocity(grid, "random", 0.02, seed=4).values)


def test_G0_recipes():
    grid = Grid(16, 16, 16)
    canonical = make_G0(grid, "canonical")

    assert canonical.constraint_residual() < 1e-14
    assert np.allclose(canonical.values[:, :, 3, 5, 7], [[1, 0, 0], [0, 1, 0], [0, 0, 0]])
    for recipe in ("sheared", "columnar"):
        G0 = make_G0(grid, recipe, amplitude=0.1)
        assert G0.is_valid()
        assert G0.recipe == recipe


def test_noncollinearity_margin():
    grid = Grid(16, 16, 8)

    assert abs(noncollinearity_margin(make_G0(grid, "canonical").G0, "top") - 1.0) < 1e-14
    columnar = make_G0(grid, "columnar", amplitude=0.1)
    assert abs(noncollinearity_margin(columnar.G0, "bottom") - 0.9) < 1e-10


def test_noncollinearity_rotation_invariance():
    grid = Grid(8, 8, 8)
    G0 = make_G0(grid, "sheared", amplitude=0.2).G0
    angle = 0.7
    R = np.array([[np.cos(angle), -np.sin(angle), 0], [np.sin(angle), np.cos(angle), 0], [0, 0, 1]])
    rotated = np.einsum("lj,kj...->kl...", R, G0.values)

    before = noncollinearity_margin(G0, "top")
    after = noncollinearity_margin(MatrixField(grid, rotated), "top")
    assert abs(before - after) < 1e-12


def test_collinear_rows_fail():
    grid = Grid(8, 8, 8)
    values = np.zeros((3, 3) + grid.shape)
    values[0, 0] = 1.0
    values[1, 0] = 2.0
    check = check_noncollinearity(MatrixField(grid, values), "top", 0.1)

    assert not check
    assert check.margin == 0.0


def test_initial_pressure():
    grid = Grid(16, 16, 16)
    G0 = make_G0(grid, "canonical")

    assert np.max(np.abs(initial_pressure(make_velocity(grid, "zero"), G0).values)) < 1e-12
    q0 = initial_pressure(make_velocity(grid, "shear", 1.0), G0)
    assert np.max(np.abs(q0.values)) < 1e-10


def test_partition():
    partition = BoundaryPartition("RT", "NC", lam=0.2)

    assert partition.regime("bottom") == "RT"
    assert partition.faces("NC") == ["top"]
    assert partition.to_json() == {"bottom": "RT", "top": "NC", "lambda": 0.2, "delta": 0.1}
    with pytest.raises(ValueError):
        BoundaryPartition("XX", "NC")
    with pytest.raises(ValueError):
        BoundaryPartition(lam=0.0)


def test_assemble_equilibrium():
    grid = Grid(16, 16, 16)
    initial = assemble_initial_data(make_velocity(grid, "zero"), "canonical")

    assert initial.margins["top"]["nc"] == 1.0
    assert abs(initial.margins["bottom"]["rt"]) < 1e-12
    assert initial.residuals["div_v0"] == 0.0
    assert initial.residuals["q0_trace"] == 0.0
    assert np.max(np.abs(initial.eta0.displacement.values)) == 0.0


def test_assemble_rejects_rt_at_rest():
    grid = Grid(16, 16, 16)

    with pytest.raises(StabilityViolation) as info:
        assemble_initial_data(make_velocity(grid, "zero"), "canonical", BoundaryPartition("RT", "RT"))
    assert info.value.face == "bottom"
    assert info.value.regime == "RT"


def test_assemble_mixed_partition():
    grid = Grid(16, 16, 16)
    partition = BoundaryPartition("RT", "NC", lam=0.1)
    initial = assemble_initial_data(make_velocity(grid, "roll", 1.0), "canonical", partition, project=False)

    # the mean pressure profile x3 (1 - x3) / 2 gives 1/2, the cos(4 pi x1) mode
    # takes away at most tanh(2 pi) / (4 pi)
    assert 0.4 < initial.margins["bottom"]["rt"] < 0.45
    assert initial.margins["top"]["nc"] == 1.0


def test_displacement_wave():
    grid = Grid(16, 16, 16)
    eta = make_displacement(grid, "wave", 0.02)

    assert abs(eta.displacement.max_abs() - 0.02 * 0.25) < 1e-3
    assert np.max(np.abs(eta.displacement.values[..., 0])) == 0.0
    assert np.max(np.abs(eta.displacement.values[..., -1])) == 0.0


def test_projection_removes_a_gradient():
    grid = Grid(16, 16, 16)
    v = from_function(
        grid,
        lambda x1, x2, x3: [
            2 * np.pi * np.cos(2 * np.pi * x1) * np.sin(np.pi * x3),
            0 * x1,
            np.pi * np.sin(2 * np.pi * x1) * np.cos(np.pi * x3),
        ],
        rank=1,
    )
    out = project_divergence_free(v)

    assert grid.l2_norm(plain_divergence(v).values) > 10.0
    assert grid.l2_norm(plain_divergence(out).values) < 1e-8
    # the projection is orthogonal, so it only shrinks the field
    assert grid.l2_norm(out.values) < grid.l2_norm(v.values)


def test_projection_keeps_divergence_free_fields():
    grid = Grid(16, 16, 16)

    for recipe in ("shear", "standard", "roll"):
        v = make_velocity(grid, recipe, 0.5)
        out = project_divergence_free(v)
        assert np.max(np.abs(out.values - v.values)) < 1e-10
    zero = VectorField.zeros(grid)
    assert np.max(np.abs(project_divergence_free(zero).values)) == 0.0


def test_projection_of_random_field():
    grid = Grid(16, 16, 12)
    rng = np.random.default_rng(2)
    v = VectorField(grid, rng.standard_normal((3,) + grid.shape))
    out = project_divergence_free(v)

    assert grid.l2_norm(plain_divergence(out).values) < 1e-8
    twice = project_divergence_free(out)
    assert np.max(np.abs(twice.values - out.values)) < 1e-8


def test_wave_preserves_volume():
    grid = Grid(16, 16, 16)
    eta = make_displacement(grid, "wave", 0.05)
    J, A = jacobian_and_cofactor(deformation_gradient(eta))

    assert np.max(np.abs(J.values - 1.0)) < 1e-12


def test_assemble_with_wave_is_div_a_free():
    grid = Grid(16, 16, 16)
    eta = make_displacement(grid, "wave", 0.02)
    initial = assemble_initial_data(make_velocity(grid, "standard", 0.02), "canonical", displacement=eta)
    J, A = jacobian_and_cofactor(deformation_gradient(eta))

    assert initial.residuals["div_v0"] < 1e-12
    assert initial.residuals["div_A_v0"] < 1e-10
    assert grid.l2_norm(a_divergence(A, initial.v0).values) < 1e-10
    # the push-forward only changes the first component
    raw = make_velocity(grid, "standard", 0.02)
    assert np.max(np.abs(initial.v0.values[1:] - raw.values[1:])) < 1e-12
