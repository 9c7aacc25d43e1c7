# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

"""
Energies, constraint residuals and measured constants of the
estimates behind the kappa-uniform bounds.
"""

import math

import numpy as np

from .errors import DegenerateMinor
from .evolution import monitor_apriori, refresh_geometry
from .geometry import (
    a_curl,
    a_divergence,
    deformation_from_flowmap,
    deformation_gradient,
    directional,
    jacobian_and_cofactor,
    piola_residual,
    plain_curl,
    plain_divergence,
)
from .grid import FACES, NORMAL_SIGN, face_index
from .initial_data import noncollinearity_margin, rayleigh_taylor_margin

PARTS = ("v", "eta", "G0eta", "boundary")
RESIDUALS = ("div_v", "div_A_v", "div_G0T_eta", "curl_A_v", "curl_A_G0T_eta", "J_minus_1", "piola", "F_identity")
DRIFTED = ("J_minus_1", "div_A_v", "F_identity")
DRIFTS = tuple(name + "_drift" for name in DRIFTED)
MARGINS = ("rt_bottom", "rt_top", "nc_bottom", "nc_top")
CSV_COLUMNS = (
    ("step", "t", "E_kappa")
    + tuple("E_kappa_" + part for part in PARTS)
    + ("E_limit",)
    + tuple("E_limit_" + part for part in PARTS)
    + RESIDUALS
    + DRIFTS
    + MARGINS
    + ("jk_dev", "ak_dev", "apriori_rt", "apriori_ok")
)


class EnergyRecord:
    """
    Diagnostics of one snapshot.

    Args:
        * step: (int) step number
        * t: (float) time
        * E_limit, E_kappa: (float) the two energies
        * parts_limit, parts_kappa: (dict) their summands, keyed by PARTS
        * residuals: (dict) keyed by RESIDUALS
        * margins: (dict) keyed by MARGINS
        * apriori: (AprioriStatus)
        * M0: (float) E_kappa at t = 0
        * baseline: (dict) residuals at t = 0; drifts are measured from it
    """

    def __init__(
        self, step, t, E_limit, E_kappa, parts_limit, parts_kappa, residuals, margins, apriori, M0=None, baseline=None
    ):
        self.step = step
        self.t = t
        self.E_limit = E_limit
        self.E_kappa = E_kappa
        self.parts_limit = parts_limit
        self.parts_kappa = parts_kappa
        self.residuals = residuals
        self.margins = margins
        self.apriori = apriori
        self.M0 = M0 if M0 is not None else E_kappa
        self.baseline = baseline if baseline is not None else dict(residuals)

    def __repr__(self):
        return "<EnergyRecord step=%d t=%.6g E_kappa=%.8g E_limit=%.8g>" % (
            self.step,
            self.t,
            self.E_kappa,
            self.E_limit,
        )

    @property
    def drifts(self):
        return {name + "_drift": abs(self.residuals[name] - self.baseline[name]) for name in DRIFTED}

    def row(self):
        values = [self.step, self.t, self.E_kappa]
        values += [self.parts_kappa[part] for part in PARTS]
        values += [self.E_limit]
        values += [self.parts_limit[part] for part in PARTS]
        values += [self.residuals[name] for name in RESIDUALS]
        drifts = self.drifts
        values += [drifts[name] for name in DRIFTS]
        values += [self.margins[name] for name in MARGINS]
        values += [self.apriori.jk_dev, self.apriori.ak_dev, self.apriori.rt_margin, int(self.apriori.ok)]
        return values

    def to_json(self):
        return dict(zip(CSV_COLUMNS, self.row()))


def _tangential4(grid, values):
    """
    All d1^a1 d2^a2 with a1 + a2 = 4 of a face array.
    """
    return [grid.horizontal_derivative(values, a1, 4 - a1, surface=True) for a1 in range(5)]


def _interior_parts(state):
    grid = state.grid
    W = directional(state.G0, state.eta)
    return {
        "v": grid.sobolev_norm(state.v.values, 4) ** 2,
        "eta": state.eta.sobolev_norm(4) ** 2,
        "G0eta": grid.sobolev_norm(W.values, 4) ** 2,
    }


def energy_limit(state, partition=None):
    """
    ||v||_4^2 + ||eta||_4^2 + ||G0^T.grad eta||_4^2 + |d^4 eta . n|^2 on
    the Rayleigh-Taylor faces, n = A N / |A N| from the unsmoothed eta.

    Returns (total, parts).
    """
    partition = partition or state.partition
    grid = state.grid
    parts = _interior_parts(state)
    boundary = 0.0
    faces = partition.faces("RT")
    if faces:
        A = jacobian_and_cofactor(deformation_gradient(state.eta))[1].values
        for face in faces:
            index = face_index(grid, face)
            column = NORMAL_SIGN[face] * A[:, 2, ..., index]
            normal = column / np.sqrt(np.sum(column ** 2, axis=0))
            d = state.eta.displacement.values[..., index]
            for derivative in _tangential4(grid, d):
                boundary += grid.boundary_norm(np.sum(derivative * normal, axis=0), 0) ** 2
    parts["boundary"] = boundary
    return sum(parts[part] for part in PARTS), parts


def energy_kappa(state, partition=None):
    """
    As energy_limit, with boundary factor d^4 (Lambda eta)_i A^kappa_i3.

    Returns (total, parts).
    """
    partition = partition or state.partition
    grid = state.grid
    parts = _interior_parts(state)
    boundary = 0.0
    faces = partition.faces("RT")
    if faces:
        cache = refresh_geometry(state)
        A = cache["A_k"].values
        spectrum = state.kernel.spectrum
        for face in faces:
            index = face_index(grid, face)
            d = state.eta.displacement.values[..., index]
            smooth = np.fft.ifft2(np.fft.fft2(d, axes=(-2, -1)) * spectrum, axes=(-2, -1)).real
            column = A[:, 2, ..., index]
            for derivative in _tangential4(grid, smooth):
                boundary += grid.boundary_norm(np.sum(derivative * column, axis=0), 0) ** 2
    parts["boundary"] = boundary
    return sum(parts[part] for part in PARTS), parts


def _normal_trace(grid, values, s):
    """
    sqrt over faces and tangential directions of |d_a omega . N|_s^2.
    """
    total = 0.0
    for face in FACES:
        normal = NORMAL_SIGN[face] * values[2, ..., face_index(grid, face)]
        for a1, a2 in ((1, 0), (0, 1)):
            total += grid.boundary_norm(grid.horizontal_derivative(normal, a1, a2, surface=True), s) ** 2
    return math.sqrt(total)


class Measurement:
    """
    A measured inequality lhs <= C rhs, with ratio = lhs / rhs.
    """

    def __init__(self, lhs, rhs):
        self.lhs = float(lhs)
        self.rhs = float(rhs)
        self.ratio = self.lhs / self.rhs if self.rhs > 0 else (0.0 if self.lhs == 0 else math.inf)

    def __repr__(self):
        return "<Measurement lhs=%.6g rhs=%.6g ratio=%.6g>" % (self.lhs, self.rhs, self.ratio)


def hodge_check(omega, s):
    """
    ||w||_s against ||w||_0 + ||curl w||_{s-1} + ||div w||_{s-1} + |d w . N|_{s-3/2}.
    """
    if s not in (1, 2, 3, 4):
        raise ValueError("Invalid s: %r; should be in 1..4" % (s,))
    grid = omega.grid
    lhs = grid.sobolev_norm(omega.values, s)
    rhs = (
        grid.sobolev_norm(omega.values, 0)
        + grid.sobolev_norm(plain_curl(omega).values, s - 1)
        + grid.sobolev_norm(plain_divergence(omega).values, s - 1)
        + _normal_trace(grid, omega.values, s - 1.5)
    )
    return Measurement(lhs, rhs)


def normal_trace_check(omega):
    """
    |d w . N|_{-1/2} against ||d w||_0 + ||div w||_0, d tangential.
    """
    grid = omega.grid
    lhs = _normal_trace(grid, omega.values, -0.5)
    tangential = math.sqrt(
        grid.l2_norm(grid.derivative(omega.values, 1)) ** 2 + grid.l2_norm(grid.derivative(omega.values, 2)) ** 2
    )
    rhs = tangential + grid.l2_norm(plain_divergence(omega).values)
    return Measurement(lhs, rhs)


# pairs (l, m) of the equations G0_1l d1 eta + G0_2l d2 eta = f_l, in
# selection order; 0-based rows of f
MINOR_PAIRS = ((1, 2), (2, 0), (1, 0))


def tangential_system(G0, face, d1eta, d2eta):
    """
    f_l = G0_1l d1 eta + G0_2l d2 eta on a face, l = 1..3; shape (3, 3, n1, n2)
    with f[l] the vector equation l.
    """
    G = G0.values[..., face_index(G0.grid, face)]
    return np.stack([G[0, l] * d1eta + G[1, l] * d2eta for l in range(3)])


def reconstruct_tangential(G0, face, f, delta=0.1):
    """
    Recover (d1 eta, d2 eta) from the three equations f_l by Cramer's rule
    on the pair of equations with the largest 2x2 minor at each node;
    ties go to the first pair of MINOR_PAIRS.

    Raises DegenerateMinor where the largest minor squared is below delta^2/3.
    """
    G = G0.values[..., face_index(G0.grid, face)]
    f = getattr(f, "values", f)
    minors = np.stack([G[0, l] * G[1, m] - G[1, l] * G[0, m] for l, m in MINOR_PAIRS])
    choice = np.argmax(np.abs(minors), axis=0)
    P = np.take_along_axis(minors, choice[None], axis=0)[0]
    worst = float(np.min(P ** 2))
    if worst < delta ** 2 / 3.0:
        node = np.unravel_index(int(np.argmin(P ** 2)), P.shape)
        raise DegenerateMinor("largest minor %.3g below sqrt(delta^2/3) at node %r" % (math.sqrt(worst), node))
    d1 = np.zeros(f.shape[1:])
    d2 = np.zeros(f.shape[1:])
    for index, (l, m) in enumerate(MINOR_PAIRS):
        mask = choice == index
        if not np.any(mask):
            continue
        a = (G[1, m] * f[l] - G[1, l] * f[m]) / np.where(mask, P, 1.0)
        b = (G[0, l] * f[m] - G[0, m] * f[l]) / np.where(mask, P, 1.0)
        d1 = np.where(mask, a, d1)
        d2 = np.where(mask, b, d2)
    return d1, d2


def noncollinear_gain_check(state, face=None):
    """
    |d^4 eta|_{1/2} on the non-collinear face(s) against ||G0^T.grad eta||_4.
    """
    grid = state.grid
    faces = [face] if face is not None else (state.partition.faces("NC") or list(FACES))
    lhs = 0.0
    for name in faces:
        d = state.eta.displacement.values[..., face_index(grid, name)]
        for derivative in _tangential4(grid, d):
            lhs += grid.boundary_norm(derivative, 0.5) ** 2
    rhs = grid.sobolev_norm(directional(state.G0, state.eta).values, 4)
    return Measurement(math.sqrt(lhs), rhs)


def good_unknown_residual(state, f, i, axis=1):
    """
    L2 defect of the commutation identity for P = d^2 Lap_* (d along axis):

        P(d_i^A f) = d_i^A(P f - P eta . grad_A f) + C_i(f),

    with A = A^kappa, eta = eta^kappa and C_i(f) expanded term by term.
    """
    grid = state.grid
    cache = refresh_geometry(state)
    A = cache["A_k"].values
    d = cache["eta_k"].displacement.values
    i -= 1
    a1, a2 = (1, 0) if axis == 1 else (0, 1)

    def P(values):
        lap = grid.horizontal_derivative(values, 2, 0) + grid.horizontal_derivative(values, 0, 2)
        return grid.horizontal_derivative(lap, 2 * a1, 2 * a2)

    def Q(values):
        lap = grid.horizontal_derivative(values, 2, 0) + grid.horizontal_derivative(values, 0, 2)
        return grid.horizontal_derivative(lap, a1, a2)

    def bar(values):
        return grid.horizontal_derivative(values, a1, a2)

    fv = f.values
    Df = grid.gradient(fv)  # Df[j] = d_j f

    def a_derivative(row, values):
        return sum(A[row, j] * grid.derivative(values, j + 1) for j in range(3))

    grad_A_f = np.stack([sum(A[m, j] * Df[j] for j in range(3)) for m in range(3)])
    lhs = P(grad_A_f[i])
    Peta = P(d)
    good = P(fv) - np.sum(Peta * grad_A_f, axis=0)
    rhs = a_derivative(i, good)
    # symmetric commutator [P, A_ij, d_j f]
    for j in range(3):
        rhs = rhs + P(A[i, j] * Df[j]) - P(A[i, j]) * Df[j] - A[i, j] * P(Df[j])
    # P eta . grad_A (d_i^A f)
    di_f = grad_A_f[i]
    rhs = rhs + sum(Peta[m] * a_derivative(m, di_f) for m in range(3))
    # -[Q, A_il A_mj] d d_l eta_m d_j f
    for l in range(3):
        for m in range(3):
            shifted = bar(grid.derivative(d[m], l + 1))
            for j in range(3):
                g = A[i, l] * A[m, j]
                rhs = rhs - (Q(g * shifted) - g * Q(shifted)) * Df[j]
    return grid.l2_norm(lhs - rhs)


def constraint_report(state):
    """
    Constraint residuals of a state, keyed by RESIDUALS.
    """
    grid = state.grid
    cache = refresh_geometry(state)
    A_k = cache["A_k"]
    W = directional(state.G0, state.eta)
    report = {
        "div_v": grid.sobolev_norm(plain_divergence(state.v).values, 3),
        "div_A_v": grid.l2_norm(a_divergence(A_k, state.v).values),
        "div_G0T_eta": grid.sobolev_norm(grid.divergence(W.values), 3),
        "curl_A_v": grid.sobolev_norm(a_curl(A_k, state.v).values, 3),
        "curl_A_G0T_eta": grid.sobolev_norm(a_curl(A_k, W).values, 3),
        "J_minus_1": float(np.max(np.abs(cache["J_k"].values - 1.0))),
        "piola": piola_residual(cache["eta_k"]),
        "F_identity": 0.0,
    }
    if state.F is not None:
        reconstructed = deformation_from_flowmap(state.eta, state.G0)
        report["F_identity"] = grid.l2_norm(reconstructed.values - state.F.values)
    return report


def stability_margins(state):
    """
    Rayleigh-Taylor margins from the current pressure (nan when it has
    not been solved) and non-collinearity margins of G0, on both faces.
    """
    q = state.cache.get("q")
    margins = {}
    for face in FACES:
        margins["rt_" + face] = rayleigh_taylor_margin(q, face) if q is not None else math.nan
        margins["nc_" + face] = noncollinearity_margin(state.G0, face)
    return margins


def record_state(state, step=0, M0=None, baseline=None):
    """
    Build the EnergyRecord of a state, measuring its a priori status.
    Drifts are taken against the baseline residuals when given.
    """
    apriori = state.cache.get("status")
    if apriori is None:
        apriori = monitor_apriori(state)
    E_limit, parts_limit = energy_limit(state)
    E_kappa, parts_kappa = energy_kappa(state)
    return EnergyRecord(
        step,
        state.t,
        E_limit,
        E_kappa,
        parts_limit,
        parts_kappa,
        constraint_report(state),
        stability_margins(state),
        apriori,
        M0,
        baseline,
    )
