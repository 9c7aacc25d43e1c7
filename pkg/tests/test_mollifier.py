# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import numpy as np
import pytest

from elastoslab.errors import KernelUnresolved
from elastoslab.geometry import FlowMap
from elastoslab.grid import Grid, ScalarField, surface_from_function
from elastoslab.mollifier import (
    commutator,
    commutator_norm,
    kappa_slope,
    loss_constant,
    make_kernel,
    mollify,
    operator_norm,
)


def test_kernel():
    grid = Grid(32, 32, 8)
    kernel = make_kernel(0.1, grid)

    assert abs(kernel.mass() - 1.0) < 1e-12
    assert operator_norm(kernel) <= 1 + 1e-8
    assert len(kernel.support) > 1


def test_kernel_rejects_kappa():
    grid = Grid(8, 8, 8)

    with pytest.raises(ValueError):
        make_kernel(0.3, grid)
    with pytest.raises(ValueError):
        make_kernel(0.0, grid)
    with pytest.raises(KernelUnresolved):
        make_kernel(0.1, grid)


def test_spectral_and_direct_agree():
    grid = Grid(16, 16, 8)
    kernel = make_kernel(0.2, grid)
    rng = np.random.default_rng(1)
    h = surface_from_function(grid, "bottom", lambda x1, x2: rng.standard_normal(grid.surface_shape))

    spectral = mollify(h, kernel)
    direct = mollify(h, kernel, method="direct")
    assert np.max(np.abs(spectral.values - direct.values)) < 1e-10

    with pytest.raises(ValueError):
        mollify(h, kernel, method="fft")


def test_mollify_keeps_constants_and_layers():
    grid = Grid(16, 16, 8)
    kernel = make_kernel(0.2, grid)
    f = ScalarField(grid, np.ones(grid.shape) * grid.x3)

    assert np.allclose(mollify(f, kernel).values, f.values)
    eta = mollify(FlowMap.identity(grid), kernel)
    assert isinstance(eta, FlowMap)
    assert np.max(np.abs(eta.displacement.values)) == 0.0


def test_commutator_with_constant_vanishes():
    grid = Grid(16, 16, 8)
    kernel = make_kernel(0.2, grid)
    g = surface_from_function(grid, "top", lambda x1, x2: np.sin(2 * np.pi * x1) * np.cos(2 * np.pi * x2))

    assert np.max(np.abs(commutator(kernel, 3.0, g).values)) < 1e-12
    assert commutator_norm(kernel, np.full(grid.surface_shape, 2.0)) < 1e-10


def test_loss_constant_grows_as_kappa_shrinks():
    grid = Grid(64, 64, 8)
    values = [loss_constant(make_kernel(kappa, grid), 0) for kappa in (0.2, 0.1, 0.05)]

    assert values[0] < values[1] < values[2]


def test_kappa_slope():
    assert abs(kappa_slope([1.0, 2.0, 4.0], [1.0, 4.0, 16.0]) - 2.0) < 1e-12
