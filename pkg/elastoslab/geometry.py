# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

"""
Flow-map kinematics.

Conventions: (grad w)_{kj} = d_j w_k, so for a flow map the deformation
gradient is F_ij = d_j eta_i. The initial deformation G0 is stored as a
matrix whose k-th row is the vector G0_k = (G0_k1, G0_k2, G0_k3); its
third row vanishes on both faces.
"""

import math

import numpy as np

from .config import get_tolerance
from .errors import SingularMap
from .grid import FACES, Field, MatrixField, ScalarField, VectorField, face_index

IDENTITY = np.eye(3)


class FlowMap:
    """
    eta = Id + displacement, with a displacement periodic in x1 and x2.

    Args:
        * displacement: (VectorField) eta - Id
    """

    def __init__(self, displacement):
        if not isinstance(displacement, VectorField):
            raise ValueError("Invalid displacement: %r; should be a VectorField" % (displacement,))
        if not np.all(np.isfinite(displacement.values)):
            raise ValueError("Invalid displacement: non-finite values")
        self.displacement = displacement
        self.grid = displacement.grid

    def __repr__(self):
        return "<FlowMap on %r, |d|_inf=%.3g>" % (self.grid, self.displacement.max_abs())

    @classmethod
    def identity(cls, grid):
        return cls(VectorField.zeros(grid))

    def positions(self):
        return self.grid.coordinates() + self.displacement.values

    def advance(self, velocity, dt):
        return FlowMap(self.displacement + dt * velocity)

    def sobolev_norm(self, s):
        """
        H^s norm of eta itself; the identity part is integrated in
        closed form since x1 and x2 are not periodic.
        """
        grid = self.grid
        d = self.displacement.values
        total = 1.0 + float(np.sum(grid.integrate(d ** 2)))  # int |x|^2 = 1
        # cross terms 2 int x_i d_i; int_0^1 x exp(2 pi i k x) dx = 1/(2 pi i k)
        for i, n in ((0, grid.n1), (1, grid.n2)):
            profile = d[i].mean(axis=1 - i)
            coefficients = np.fft.fft(profile, axis=0) / n
            k = np.fft.fftfreq(n, d=1.0 / n)
            moments = np.where(k == 0, 0.5 + 0j, 1.0 / (2j * np.pi * np.where(k == 0, 1, k)))
            layer = np.real(moments @ coefficients)
            total += 2.0 * float(layer @ grid.trapezoid_weights())
        total += 2.0 * float(np.sum(grid.integrate(grid.x3 * d[2])))
        if s >= 1:
            gradient = grid.gradient(d) + IDENTITY[:, :, None, None, None]
            total += float(np.sum(grid.integrate(gradient ** 2)))
        if s >= 2:
            # higher derivatives see only the displacement
            full = grid.sobolev_norm(d, s) ** 2
            total += full - grid.sobolev_norm(d, 1) ** 2
        return math.sqrt(max(total, 0.0))


class InitialDeformation:
    """
    The parameter matrix G0 together with its constraint residuals.

    Args:
        * G0: (MatrixField) rows G0_k = (G0_k1, G0_k2, G0_k3)
        * recipe: (str) how it was built
    """

    def __init__(self, G0, recipe=None):
        if not isinstance(G0, MatrixField):
            raise ValueError("Invalid G0: %r; should be a MatrixField" % (G0,))
        self.G0 = G0
        self.grid = G0.grid
        self.recipe = recipe

    def __repr__(self):
        return "<InitialDeformation %s on %r>" % (self.recipe, self.grid)

    @property
    def values(self):
        return self.G0.values

    def divergence_residual(self):
        """
        ||div G0^T||: d_k G0_ki for every column i.
        """
        grid = self.grid
        values = sum(grid.derivative(self.values[k], k + 1) for k in range(3))
        return grid.l2_norm(values)

    def boundary_residual(self):
        """
        max |G0_3l| over both faces.
        """
        return max(
            float(np.max(np.abs(self.values[2, :, ..., face_index(self.grid, face)])))
            for face in FACES
        )

    def constraint_residual(self):
        return max(self.divergence_residual(), self.boundary_residual())

    def is_valid(self, tau=None):
        tau = get_tolerance("tau_con") if tau is None else tau
        return self.constraint_residual() <= tau

    def max_abs(self):
        return self.G0.max_abs()


def _matrix_values(G0):
    return G0.values if isinstance(G0, (InitialDeformation, MatrixField)) else np.asarray(G0)


def deformation_gradient(eta):
    """
    F_ij = d_j eta_i with the identity part added analytically.
    """
    grid = eta.grid
    values = grid.gradient(eta.displacement.values) + IDENTITY[:, :, None, None, None]
    return MatrixField(grid, values)


def jacobian_and_cofactor(F, eps_j=None):
    """
    J = det F and A = F^{-T} = adj(F)^T / J.

    The columns of A are A[:, j] = (f_{j+1} x f_{j+2}) / J with f_j the
    columns of F.
    """
    eps_j = get_tolerance("eps_j") if eps_j is None else eps_j
    values = F.values
    f1, f2, f3 = values[:, 0], values[:, 1], values[:, 2]
    c23 = np.cross(f2, f3, axis=0)
    c31 = np.cross(f3, f1, axis=0)
    c12 = np.cross(f1, f2, axis=0)
    J = np.sum(f1 * c23, axis=0)
    worst = float(np.min(J))
    if not worst > eps_j:
        node = np.unravel_index(int(np.argmin(J)), J.shape)
        raise SingularMap("determinant %.6g <= %.3g at node %r" % (worst, eps_j, node))
    A = np.stack([c23, c31, c12], axis=1) / J
    return ScalarField(F.grid, J), MatrixField(F.grid, A)


def piola_residual(eta):
    """
    max_i || d_j (J A_ij) ||.
    """
    J, A = jacobian_and_cofactor(deformation_gradient(eta))
    residual = eta.grid.divergence(J.values * A.values)
    return max(eta.grid.l2_norm(residual[i]) for i in range(3))


def directional(G0, f):
    """
    (G0^T . grad f)_{i...} = G0_ki d_k f_{...}; a new leading index i.

    Args:
        * G0: (InitialDeformation or MatrixField)
        * f: (Field or FlowMap)
    """
    G = _matrix_values(G0)
    if isinstance(f, FlowMap):
        grid = f.grid
        gradient = deformation_gradient(f).values
    else:
        grid = f.grid
        gradient = grid.gradient(f.values)
    lead = gradient.ndim - 4
    by_k = np.moveaxis(gradient, lead, 0)
    out = np.stack([sum(G[k, i] * by_k[k] for k in range(3)) for i in range(3)])
    return Field.wrap(grid, out)


def contract_directional(G0, X):
    """
    (G0^T . grad) applied to a field whose leading index is k and
    contracted with it: G0_mk d_m X_{k...}.
    """
    G = _matrix_values(G0)
    grid = X.grid
    out = 0.0
    for k in range(3):
        for m in range(3):
            out = out + G[m, k] * grid.derivative(X.values[k], m + 1)
    return Field.wrap(grid, out)


def elastic_force(G0, eta):
    """
    Conservative elastic forcing f_i = d_l ( d_m eta_i G0_mk G0_lk ).
    """
    G = _matrix_values(G0)
    F = deformation_gradient(eta).values
    GGt = np.einsum("mk...,lk...->ml...", G, G)
    stress = np.einsum("im...,ml...->il...", F, GGt)
    return VectorField(eta.grid, eta.grid.divergence(stress))


def deformation_from_flowmap(eta, G0):
    """
    F = (grad eta) G0 nodewise.
    """
    G = _matrix_values(G0)
    F = deformation_gradient(eta).values
    return MatrixField(eta.grid, np.einsum("ik...,kj...->ij...", F, G))


def deformation_rate(A, w, F):
    """
    dF/dt = grad_A(w) F for a flow moving with velocity w.
    """
    rate = a_gradient(A, w).values
    return MatrixField(F.grid, np.einsum("ik...,kj...->ij...", rate, F.values))


def a_gradient(A, f):
    """
    (grad_A f)_{...i} = A_ij d_j f_{...}; appends a component index.
    """
    grid = f.grid
    gradient = grid.gradient(f.values)
    lead = gradient.ndim - 4
    by_j = np.moveaxis(gradient, lead, 0)
    Av = A.values
    out = np.stack([sum(Av[i, j] * by_j[j] for j in range(3)) for i in range(3)], axis=lead)
    return Field.wrap(grid, out)


def a_divergence(A, f):
    """
    A_ij d_j f_{...i}, contracting the last component index.
    """
    g = a_gradient(A, f).values
    lead = g.ndim - 5
    out = sum(np.take(np.take(g, i, axis=lead + 1), i, axis=lead) for i in range(3))
    return Field.wrap(f.grid, out)


def a_curl(A, g):
    """
    (curl_A g)_i = eps_ijl A_jm d_m g_l on the last component index.
    """
    D = a_gradient(A, g).values  # D[..., l, j] = A_jm d_m g_l
    lead = D.ndim - 5

    def entry(l, j):
        return np.take(np.take(D, l, axis=lead), j, axis=lead)

    out = np.stack(
        [entry(2, 1) - entry(1, 2), entry(0, 2) - entry(2, 0), entry(1, 0) - entry(0, 1)],
        axis=lead,
    )
    return Field.wrap(g.grid, out)


def identity_matrix(grid):
    values = np.broadcast_to(IDENTITY[:, :, None, None, None], (3, 3) + grid.shape).copy()
    return MatrixField(grid, values)


def plain_gradient(f):
    return a_gradient(identity_matrix(f.grid), f)


def plain_divergence(f):
    return Field.wrap(f.grid, f.grid.divergence(f.values))


def plain_curl(g):
    return a_curl(identity_matrix(g.grid), g)


def matrix_curl(G):
    """
    (curl G)_{ijk} = d_i G_kj - d_j G_ki.
    """
    g = G.grid.gradient(G.values)  # g[k, j, i] = d_i G_kj
    return Field.wrap(G.grid, np.transpose(g, (2, 1, 0, 3, 4, 5)) - np.transpose(g, (1, 2, 0, 3, 4, 5)))
