# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import numpy as np
import pytest

from elastoslab.errors import SingularMap
from elastoslab.geometry import (
    FlowMap,
    deformation_from_flowmap,
    deformation_gradient,
    directional,
    elastic_force,
    jacobian_and_cofactor,
    matrix_curl,
    piola_residual,
    plain_curl,
    plain_divergence,
)
from elastoslab.grid import Grid, MatrixField, VectorField, from_function
from elastoslab.initial_data import make_G0


def wave(grid, eps=0.01):
    return FlowMap(
        from_function(grid, lambda x1, x2, x3: [eps * np.sin(2 * np.pi * x1) * x3 * (1 - x3), 0 * x1, 0 * x1], rank=1)
    )


def test_identity_flowmap():
    grid = Grid(8, 8, 8)
    eta = FlowMap.identity(grid)
    J, A = jacobian_and_cofactor(deformation_gradient(eta))

    assert np.allclose(J.values, 1.0)
    assert np.allclose(A.values, np.eye(3)[:, :, None, None, None])
    assert piola_residual(eta) < 1e-12


def test_identity_norms():
    eta = FlowMap.identity(Grid(8, 8, 8))

    # int |x|^2 = 1, int |grad x|^2 = 3
    assert abs(eta.sobolev_norm(0) - 1.0) < 1e-12
    assert abs(eta.sobolev_norm(1) - 2.0) < 1e-12


def test_flowmap_rejects_nan():
    grid = Grid(8, 8, 8)
    values = np.zeros((3,) + grid.shape)
    values[0, 0, 0, 0] = np.nan

    with pytest.raises(ValueError):
        FlowMap(VectorField(grid, values))


def test_collapsed_map_is_singular():
    grid = Grid(8, 8, 8)
    eta = FlowMap(from_function(grid, lambda x1, x2, x3: [0 * x1, 0 * x1, -x3], rank=1))

    with pytest.raises(SingularMap):
        jacobian_and_cofactor(deformation_gradient(eta))


def test_directional_canonical():
    grid = Grid(16, 16, 8)
    G0 = make_G0(grid, "canonical")
    f = from_function(grid, lambda x1, x2, x3: np.sin(2 * np.pi * x1) + 0 * x3)
    W = directional(G0, f).values

    assert np.max(np.abs(W[0] - 2 * np.pi * np.cos(2 * np.pi * grid.x1))) < 1e-10
    assert np.max(np.abs(W[1:])) < 1e-10

    # (G0^T.grad Id)_ij = G0_ji
    W = directional(G0, FlowMap.identity(grid)).values
    assert np.allclose(W, np.swapaxes(G0.values, 0, 1))


def test_elastic_force_equilibrium():
    grid = Grid(8, 8, 8)
    G0 = make_G0(grid, "canonical")

    assert np.max(np.abs(elastic_force(G0, FlowMap.identity(grid)).values)) < 1e-12


def test_elastic_force_wave():
    grid = Grid(16, 16, 8)
    eta = FlowMap(
        from_function(grid, lambda x1, x2, x3: [0.01 * np.sin(2 * np.pi * x1) + 0 * x3, 0 * x1, 0 * x1], rank=1)
    )
    force = elastic_force(make_G0(grid, "canonical"), eta).values

    exact = -4 * np.pi ** 2 * 0.01 * np.sin(2 * np.pi * grid.x1)
    assert np.max(np.abs(force[0] - exact)) < 1e-10
    assert np.max(np.abs(force[1:])) < 1e-12


def test_elastic_force_is_restoring():
    grid = Grid(16, 16, 16)
    eta = wave(grid)
    force = elastic_force(make_G0(grid, "canonical"), eta).values

    assert float(np.sum(grid.integrate(force * eta.displacement.values))) < 0.0


def test_deformation_from_flowmap():
    grid = Grid(16, 16, 8)
    G0 = make_G0(grid, "canonical")
    eta = FlowMap(
        from_function(grid, lambda x1, x2, x3: [0.1 * np.sin(2 * np.pi * x1) + 0 * x3, 0 * x1, 0 * x1], rank=1)
    )

    assert np.allclose(deformation_from_flowmap(FlowMap.identity(grid), G0).values, G0.values)
    F = deformation_from_flowmap(eta, G0).values
    assert np.max(np.abs(F[0, 0] - 1 - 0.2 * np.pi * np.cos(2 * np.pi * grid.x1))) < 1e-10
    assert np.allclose(F[1, 1], 1.0)
    assert np.max(np.abs(F[2])) < 1e-12
    assert np.max(np.abs(F[:, 2])) < 1e-12


def test_curl_of_gradient_vanishes():
    grid = Grid(16, 16, 16)
    phi = from_function(grid, lambda x1, x2, x3: np.sin(2 * np.pi * x1) * np.cos(2 * np.pi * x2) * x3 ** 2)
    gradient = VectorField(grid, grid.gradient(phi.values))

    assert np.max(np.abs(plain_curl(gradient).values)) < 1e-8
    divergence = plain_divergence(plain_curl(VectorField(grid, np.stack([phi.values] * 3))))
    assert np.max(np.abs(divergence.values)) < 1e-8


def test_matrix_curl_of_gradient_vanishes():
    grid = Grid(16, 16, 16)
    u = from_function(
        grid,
        lambda x1, x2, x3: [
            np.sin(2 * np.pi * x1) * np.cos(np.pi * x3),
            np.cos(2 * np.pi * x2) * x3 ** 2,
            np.sin(2 * np.pi * (x1 + x2)) * np.sin(np.pi * x3),
        ],
        rank=1,
    )
    G = MatrixField(grid, grid.gradient(u.values))

    assert np.max(np.abs(matrix_curl(G).values)) < 1e-9


def test_matrix_curl_entries():
    grid = Grid(8, 8, 8)
    values = np.zeros((3, 3) + grid.shape)
    values[0, 1] = grid.x3
    curl = matrix_curl(MatrixField(grid, values)).values

    assert np.allclose(curl[2, 1, 0], 1.0, atol=1e-10)
    assert np.allclose(curl[1, 2, 0], -1.0, atol=1e-10)
    curl[2, 1, 0] = 0.0
    curl[1, 2, 0] = 0.0
    assert np.max(np.abs(curl)) < 1e-10


def test_piola_identity_holds():
    grid = Grid(16, 16, 16)

    assert piola_residual(wave(grid, 0.05)) < 1e-3
