# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

"""
Initial data: velocity and deformation recipes, the initial pressure,
and the Rayleigh-Taylor and non-collinearity conditions on the faces.
"""

import math

import numpy as np

from .config import get_tolerance
from .elliptic import solve_laplace_dirichlet
from .errors import InvalidRecipe, StabilityViolation
from .geometry import (
    FlowMap,
    InitialDeformation,
    a_divergence,
    deformation_gradient,
    jacobian_and_cofactor,
    plain_curl,
    plain_divergence,
)
from .grid import (
    FACES,
    NORMAL_SIGN,
    MatrixField,
    ScalarField,
    VectorField,
    face_index,
    from_function,
    vertical_matrix,
)

REGIMES = ("RT", "NC")
VELOCITY_RECIPES = ("zero", "shear", "standard", "roll", "random")
DISPLACEMENT_RECIPES = ("none", "wave")
G0_RECIPES = ("canonical", "sheared", "columnar")


class MarginCheck:
    """
    Outcome of a stability check on one face.
    """

    def __init__(self, passed, margin, face=None, floor=None):
        self.passed = bool(passed)
        self.margin = float(margin)
        self.face = face
        self.floor = floor

    def __repr__(self):
        return "<MarginCheck %s face=%s margin=%.6g floor=%s>" % (
            "pass" if self.passed else "FAIL",
            self.face,
            self.margin,
            self.floor,
        )

    def __bool__(self):
        return self.passed


class BoundaryPartition:
    """
    Assignment of each face to the Rayleigh-Taylor ("RT") or the
    non-collinearity ("NC") regime.

    Args:
        * bottom: (str) "RT" or "NC"
        * top: (str) "RT" or "NC"
        * lam: (float) Rayleigh-Taylor floor, > 0
        * delta: (float) non-collinearity floor, > 0
    """

    def __init__(self, bottom="NC", top="NC", lam=0.1, delta=0.1):
        for face, regime in (("bottom", bottom), ("top", top)):
            if regime not in REGIMES:
                raise ValueError("Invalid regime for %s: %r; should be one of %r" % (face, regime, REGIMES))
        if not lam > 0:
            raise ValueError("Invalid lambda: %r; should be > 0" % (lam,))
        if not delta > 0:
            raise ValueError("Invalid delta: %r; should be > 0" % (delta,))
        self.assignment = {"bottom": bottom, "top": top}
        self.lam = float(lam)
        self.delta = float(delta)

    def __repr__(self):
        return "<BoundaryPartition bottom=%s, top=%s, lambda=%s, delta=%s>" % (
            self.assignment["bottom"],
            self.assignment["top"],
            self.lam,
            self.delta,
        )

    def regime(self, face):
        return self.assignment[face]

    def faces(self, regime):
        return [face for face in FACES if self.assignment[face] == regime]

    def to_json(self):
        return {
            "bottom": self.assignment["bottom"],
            "top": self.assignment["top"],
            "lambda": self.lam,
            "delta": self.delta,
        }


class InitialData:
    """
    A validated initial datum.

    Args:
        * v0: (VectorField)
        * G0: (InitialDeformation)
        * q0: (ScalarField) initial pressure
        * partition: (BoundaryPartition)
        * margins: (dict) face -> {"rt": float, "nc": float}
        * eta0: (FlowMap) initial flow map, identity unless displaced
        * residuals: (dict) measured constraint residuals
    """

    def __init__(self, v0, G0, q0, partition, margins, eta0=None, residuals=None):
        self.v0 = v0
        self.G0 = G0
        self.q0 = q0
        self.partition = partition
        self.margins = margins
        self.grid = v0.grid
        self.eta0 = eta0 if eta0 is not None else FlowMap.identity(self.grid)
        self.residuals = residuals or {}

    def __repr__(self):
        return "<InitialData %r, G0=%s>" % (self.partition, self.G0.recipe)

    def to_json(self):
        return {
            "partition": self.partition.to_json(),
            "margins": self.margins,
            "residuals": self.residuals,
            "g0": self.G0.recipe,
        }


def random_band_limited(grid, seed=0, modes=2, rank=1, decay=1.0):
    """
    A smooth random field: a few horizontal Fourier modes times a few
    vertical cosines and sines, with coefficients decaying in the
    wavenumber.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    x1, x2, x3 = grid.coordinates()
    values = np.zeros((3,) * rank + grid.shape)
    for index in np.ndindex(*((3,) * rank)):
        component = np.zeros(grid.shape)
        for k1 in range(-modes, modes + 1):
            for k2 in range(-modes, modes + 1):
                theta = 2 * np.pi * (k1 * x1 + k2 * x2)
                for m in range(modes + 1):
                    scale = decay / (1.0 + k1 * k1 + k2 * k2 + m * m)
                    a, b, c, d = rng.standard_normal(4) * scale
                    component += (a * np.cos(theta) + b * np.sin(theta)) * (
                        c * np.cos(m * np.pi * x3) + d * np.sin(m * np.pi * x3)
                    )
        values[index] = component
    return from_function(grid, lambda *x: values, rank=rank)


def make_velocity(grid, recipe="zero", amplitude=0.02, seed=12345):
    """
    Raw initial velocity from a named recipe; every recipe except
    "random" is exactly divergence-free on the grid.
    """
    a = float(amplitude)
    if recipe == "zero":
        return VectorField.zeros(grid)
    elif recipe == "shear":
        return from_function(grid, lambda x1, x2, x3: [a * np.sin(2 * np.pi * x2), 0 * x1, 0 * x1], rank=1)
    elif recipe == "standard":
        return from_function(
            grid,
            lambda x1, x2, x3: [
                a * np.sin(2 * np.pi * x2) * np.cos(np.pi * x3),
                a * np.sin(2 * np.pi * x1) * np.cos(np.pi * x3),
                a * np.cos(2 * np.pi * x1) * np.cos(2 * np.pi * x2),
            ],
            rank=1,
        )
    elif recipe == "roll":
        # curl of the stream function -a sin(2 pi x1) x3 / (2 pi) e2
        potential = from_function(
            grid,
            lambda x1, x2, x3: [0 * x1, -a * np.sin(2 * np.pi * x1) * x3 / (2 * np.pi), 0 * x1],
            rank=1,
        )
        return plain_curl(potential)
    elif recipe == "random":
        potential = random_band_limited(grid, seed=seed, modes=2, rank=1)
        velocity = plain_curl(potential)
        return velocity * (a / max(velocity.max_abs(), 1e-300))
    raise InvalidRecipe("unknown velocity recipe: %r; should be one of %r" % (recipe, VELOCITY_RECIPES))


def make_displacement(grid, recipe="none", amplitude=0.0):
    """
    Initial flow-map displacement eta(0) - Id.

    The "wave" shifts x1 by eps sin(2 pi x2) x3 (1 - x3): grad eta is
    unipotent, so J = 1 exactly and the faces stay fixed.
    """
    eps = float(amplitude)
    if recipe == "none" or eps == 0.0:
        if recipe not in DISPLACEMENT_RECIPES:
            raise InvalidRecipe("unknown displacement recipe: %r" % (recipe,))
        return FlowMap.identity(grid)
    elif recipe == "wave":
        displacement = from_function(
            grid,
            lambda x1, x2, x3: [eps * np.sin(2 * np.pi * x2) * x3 * (1 - x3), 0 * x1, 0 * x1],
            rank=1,
        )
        return FlowMap(displacement)
    raise InvalidRecipe("unknown displacement recipe: %r; should be one of %r" % (recipe, DISPLACEMENT_RECIPES))


def project_divergence_free(v):
    """
    Remove from v its component along the range of the adjoint of the
    discrete divergence, orthogonally in the trapezoid-weighted L2
    product. The continuous counterpart is v - grad(phi) with phi = 0 on
    the faces; the normal velocity on the faces stays free.

    The result has zero discrete divergence to round-off at every node,
    faces included. Horizontal modes with a vanishing symbol keep only
    the vertical mean of their third component.
    """
    grid = v.grid
    D1 = vertical_matrix(grid.n3, 1) / grid.h3
    weights = grid.trapezoid_weights()
    s1 = grid.derivative_symbol(1, 0)
    s2 = grid.derivative_symbol(0, 1)
    spectrum = np.fft.fft2(v.values, axes=(-3, -2))
    div = s1[:, :, None] * spectrum[0] + s2[:, :, None] * spectrum[1] + spectrum[2] @ D1.T
    horizontal = np.abs(s1) ** 2 + np.abs(s2) ** 2
    stiffness = (D1 / weights) @ D1.T
    mass = np.diag(1.0 / weights)
    multiplier = np.zeros_like(div)
    for value in np.unique(horizontal):
        if value == 0.0:
            continue
        mask = horizontal == value
        multiplier[mask] = np.linalg.solve(stiffness + value * mass, div[mask].T).T
    spectrum[0] -= np.conj(s1)[:, :, None] * multiplier / weights
    spectrum[1] -= np.conj(s2)[:, :, None] * multiplier / weights
    spectrum[2] -= (multiplier @ D1) / weights
    flat = horizontal == 0.0
    spectrum[2][flat] = (spectrum[2][flat] @ weights)[:, None] * np.ones(grid.n3 + 1)
    return VectorField(grid, np.fft.ifft2(spectrum, axes=(-3, -2)).real)


def push_forward(w, eta):
    """
    The Lagrangian velocity (grad eta) w. When eta preserves volume and
    div w = 0, the result is divergence-free in the A-weighted sense.
    """
    F = deformation_gradient(eta).values
    return VectorField(w.grid, np.einsum("ik...,k...->i...", F, w.values))


def _sheared(grid, amplitude):
    a = float(amplitude)
    return lambda x1, x2, x3: [
        [1 + 0 * x1, a * np.sin(2 * np.pi * x2), 0 * x1],
        [a * np.sin(2 * np.pi * x1), 1 + 0 * x1, 0 * x1],
        [0 * x1, 0 * x1, 0 * x1],
    ]


def make_G0(grid, recipe="canonical", amplitude=0.1, psi=None, tau=None):
    """
    Build the initial deformation matrix from a recipe.

    Args:
        * grid: (Grid)
        * recipe: (str) "canonical", "sheared" or "columnar"
        * amplitude: (float) size of the non-constant part
        * psi: (ScalarField or callable) stream function for "columnar";
          defaults to amplitude * sin(2 pi x1) sin(2 pi x2) / (2 pi)

    Column 1 of the columnar recipe is e1 + (d2 psi, -d1 psi, 0); column 2
    is e2. Columns are divergence-free and row 3 vanishes.
    Raises InvalidRecipe for unknown recipes and when the constraint
    residuals exceed tau_con.
    """
    tau = get_tolerance("tau_con") if tau is None else tau
    if recipe == "canonical":
        values = np.zeros((3, 3) + grid.shape)
        values[0, 0] = 1.0
        values[1, 1] = 1.0
        G0 = MatrixField(grid, values)
    elif recipe == "sheared":
        G0 = from_function(grid, _sheared(grid, amplitude), rank=2)
    elif recipe == "columnar":
        if psi is None:
            a = float(amplitude)
            psi = from_function(
                grid, lambda x1, x2, x3: a * np.sin(2 * np.pi * x1) * np.sin(2 * np.pi * x2) / (2 * np.pi)
            )
        elif callable(psi):
            psi = from_function(grid, psi)
        values = np.zeros((3, 3) + grid.shape)
        values[0, 0] = 1.0 + grid.derivative(psi.values, 2)
        values[1, 0] = -grid.derivative(psi.values, 1)
        values[1, 1] = 1.0
        G0 = MatrixField(grid, values)
    else:
        raise InvalidRecipe("unknown G0 recipe: %r; should be one of %r" % (recipe, G0_RECIPES))
    deformation = InitialDeformation(G0, recipe=recipe)
    residual = deformation.constraint_residual()
    if not residual <= tau:
        raise InvalidRecipe("G0 recipe %r violates its constraints: residual %.3g > %.3g" % (recipe, residual, tau))
    return deformation


def initial_pressure(v0, G0):
    """
    Solve -Lap q0 = d_j v_i d_i v_j - d_j G0_ik d_i G0_jk with q0 = 0 on the faces.
    """
    grid = v0.grid
    gv = grid.gradient(v0.values)  # gv[i, j] = d_j v_i
    G = G0.values if isinstance(G0, InitialDeformation) else G0.values
    gG = grid.gradient(G)  # gG[i, k, j] = d_j G_ik
    rhs = np.einsum("ij...,ji...->...", gv, gv) - np.einsum("ikj...,jki...->...", gG, gG)
    return solve_laplace_dirichlet(ScalarField(grid, rhs)).field


def rayleigh_taylor_margin(q, face):
    """
    min over the face of -grad q . N with N = -e3 (bottom), +e3 (top).
    """
    index = face_index(q.grid, face)
    dq = q.grid.vertical(q.values, 1)[..., index]
    return float(np.min(-NORMAL_SIGN[face] * dq))


def check_rayleigh_taylor(q, face, lam):
    margin = rayleigh_taylor_margin(q, face)
    return MarginCheck(margin >= lam, margin, face=face, floor=lam)


def noncollinearity_margin(G0, face, pair=(1, 2)):
    """
    min over the face of |G0_i x G0_j| for rows i, j (1-based).
    """
    index = face_index(G0.grid, face)
    G = G0.values[..., index]
    first, second = G[pair[0] - 1], G[pair[1] - 1]
    cross = np.cross(first, second, axis=0)
    return float(np.min(np.sqrt(np.sum(cross ** 2, axis=0))))


def check_noncollinearity(G0, face, delta, pair=(1, 2)):
    margin = noncollinearity_margin(G0, face, pair)
    return MarginCheck(margin >= delta, margin, face=face, floor=delta)


def _div_a_residual(v0, displacement):
    if displacement is None:
        return v0.grid.l2_norm(plain_divergence(v0).values)
    J, A = jacobian_and_cofactor(deformation_gradient(displacement))
    return v0.grid.l2_norm(a_divergence(A, v0).values)


def assemble_initial_data(v_raw, recipe="canonical", partition=None, displacement=None, project=True, amplitude=0.1):
    """
    Project the velocity, push it forward through the initial flow map,
    build G0, solve for q0, measure both margins on both faces and
    validate the requested partition.

    Args:
        * v_raw: (VectorField) raw initial velocity
        * recipe: (str or InitialDeformation) G0 recipe or a built G0
        * partition: (BoundaryPartition) defaults to NC on both faces
        * displacement: (FlowMap) optional initial flow map
        * project: (bool) apply project_divergence_free to v_raw
        * amplitude: (float) G0 recipe amplitude

    With a displacement, v0 = (grad eta0) P(v_raw), which is div_A-free
    when eta0 preserves volume.

    Raises StabilityViolation naming the first failing face.
    """
    grid = v_raw.grid
    partition = partition if partition is not None else BoundaryPartition()
    w0 = project_divergence_free(v_raw) if project else v_raw
    v0 = push_forward(w0, displacement) if displacement is not None else w0
    G0 = recipe if isinstance(recipe, InitialDeformation) else make_G0(grid, recipe, amplitude=amplitude)
    q0 = initial_pressure(v0, G0)
    margins = {}
    for face in FACES:
        margins[face] = {
            "rt": rayleigh_taylor_margin(q0, face),
            "nc": noncollinearity_margin(G0.G0, face),
        }
    for face in FACES:
        regime = partition.regime(face)
        if regime == "RT":
            passed = margins[face]["rt"] >= partition.lam
        else:
            passed = margins[face]["nc"] >= partition.delta
        if not passed:
            raise StabilityViolation(face, margins[face]["rt"], margins[face]["nc"], regime=regime)
    residuals = {
        "div_v0": grid.l2_norm(plain_divergence(w0).values),
        "div_A_v0": _div_a_residual(v0, displacement),
        "div_G0T": G0.divergence_residual(),
        "G0_boundary": G0.boundary_residual(),
        "q0_trace": math.sqrt(sum(grid.boundary_norm(q0.values[..., face_index(grid, f)], 0) ** 2 for f in FACES)),
    }
    return InitialData(v0, G0, q0, partition, margins, eta0=displacement, residuals=residuals)
