# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

"""
The kappa-regularized system

    d_t eta = v + psi,
    d_t v   = -grad_{A} q + d_l (d_m eta_i G0_mk G0_lk),

where A = A^kappa is the cofactor matrix of the boundary-smoothed flow
map eta^kappa and psi is the modification term. One right-side
evaluation rebuilds every elliptic subproblem.
"""

import math
import numbers

import numpy as np

from .elliptic import (
    laplace_solver,
    mean_zero_project,
    solve_laplace_dirichlet,
    solve_pressure,
    surface_inverse_laplacian,
)
from .errors import AprioriViolation, StepRejected
from .geometry import (
    FlowMap,
    a_gradient,
    contract_directional,
    deformation_from_flowmap,
    deformation_gradient,
    deformation_rate,
    directional,
    elastic_force,
    jacobian_and_cofactor,
)
from .grid import FACES, BoundaryField, MatrixField, ScalarField, VectorField, face_index
from .initial_data import BoundaryPartition, rayleigh_taylor_margin

APRIORI_THRESHOLD = 1.0 / 8.0


class AprioriStatus:
    """
    Measured a priori quantities of one state.

    Args:
        * jk_dev: (float) max |J^kappa - 1|
        * ak_dev: (float) max |A^kappa_ij - delta_ij|
        * rt_margin: (float) min of -grad q . N over the Rayleigh-Taylor
          faces (inf when there are none)
        * lam: (float) the Rayleigh-Taylor floor of the partition
    """

    def __init__(self, jk_dev, ak_dev, rt_margin=math.inf, lam=0.1):
        self.jk_dev = float(jk_dev)
        self.ak_dev = float(ak_dev)
        self.rt_margin = float(rt_margin)
        self.lam = float(lam)

    @property
    def ok(self):
        return (
            self.jk_dev <= APRIORI_THRESHOLD
            and self.ak_dev <= APRIORI_THRESHOLD
            and self.rt_margin >= self.lam / 2.0
        )

    def __repr__(self):
        return "<AprioriStatus ok=%s jk_dev=%.4g ak_dev=%.4g rt_margin=%.4g>" % (
            self.ok,
            self.jk_dev,
            self.ak_dev,
            self.rt_margin,
        )

    def to_json(self):
        return {
            "ok": self.ok,
            "jk_dev": self.jk_dev,
            "ak_dev": self.ak_dev,
            "rt_margin": self.rt_margin,
            "lambda": self.lam,
        }


class SimState:
    """
    A state (t, eta, v) of the kappa-system with its cache.

    Args:
        * t: (float) time
        * eta: (FlowMap)
        * v: (VectorField)
        * kernel: (MollifierKernel) fixes kappa
        * G0: (InitialDeformation)
        * partition: (BoundaryPartition)
        * F: (MatrixField) optional co-evolved deformation
    """

    def __init__(self, t, eta, v, kernel, G0, partition=None, F=None):
        self.t = float(t)
        self.eta = eta
        self.v = v
        self.kernel = kernel
        self.kappa = kernel.kappa
        self.G0 = G0
        self.partition = partition if partition is not None else BoundaryPartition()
        self.F = F
        self.grid = v.grid
        self.cache = {}

    def __repr__(self):
        return "<SimState t=%.6g kappa=%s>" % (self.t, self.kappa)

    def derive(self, t, eta, v, F=None):
        return SimState(t, eta, v, self.kernel, self.G0, self.partition, F)


def _smoother(values, kernel):
    """
    Solve -Lap u = -Lap w inside with u = Lambda^2 w on the faces.
    """
    grid = kernel.grid
    solver = laplace_solver(grid)
    rhs = VectorField(grid, solver.apply(values))
    multiplier = kernel.spectrum ** 2
    faces = []
    for face in FACES:
        trace = values[..., face_index(grid, face)]
        smooth = np.fft.ifft2(np.fft.fft2(trace, axes=(-2, -1)) * multiplier, axes=(-2, -1)).real
        faces.append(smooth)
    return solve_laplace_dirichlet(rhs, faces[0], faces[1]).field


def smooth_flowmap(eta, kernel):
    """
    The boundary smoother eta^kappa: -Lap eta^kappa = -Lap eta inside,
    eta^kappa = Lambda^2 eta on the faces.
    """
    return FlowMap(_smoother(eta.displacement.values, kernel))


def refresh_geometry(state):
    """
    Fill eta^kappa, its gradient, J^kappa and A^kappa into the cache.
    """
    cache = state.cache
    if "A_k" not in cache:
        eta_k = smooth_flowmap(state.eta, state.kernel)
        F_k = deformation_gradient(eta_k)
        J_k, A_k = jacobian_and_cofactor(F_k)
        cache.update(eta_k=eta_k, F_k=F_k, J_k=J_k, A_k=A_k)
    return cache


def modification_term(eta, v, eta_k, kernel, A_k=None):
    """
    psi^kappa: on each face the mean-free part of

        Lap_* eta_j A_ja d_a Lambda^2 v - Lap_* Lambda^2 eta_j A_ja d_a v

    (a = 1, 2) is inverted by Lap_*, then extended harmonically.
    """
    grid = eta.grid
    if A_k is None:
        A_k = jacobian_and_cofactor(deformation_gradient(eta_k))[1]
    multiplier = kernel.spectrum ** 2

    def smooth(values):
        return np.fft.ifft2(np.fft.fft2(values, axes=(-2, -1)) * multiplier, axes=(-2, -1)).real

    def lap(values):
        return grid.horizontal_derivative(values, 2, 0, surface=True) + grid.horizontal_derivative(
            values, 0, 2, surface=True
        )

    traces = []
    for face in FACES:
        index = face_index(grid, face)
        d = eta.displacement.values[..., index]
        vf = v.values[..., index]
        A = A_k.values[..., index]
        lap_d = lap(d)
        lap_dd = lap(smooth(d))
        vv = smooth(vf)
        f = np.zeros_like(vf)
        for alpha, (a1, a2) in enumerate(((1, 0), (0, 1))):
            c_plain = np.sum(lap_d * A[:, alpha], axis=0)
            c_smooth = np.sum(lap_dd * A[:, alpha], axis=0)
            f += c_plain * grid.horizontal_derivative(vv, a1, a2, surface=True)
            f -= c_smooth * grid.horizontal_derivative(vf, a1, a2, surface=True)
        boundary = BoundaryField.wrap(grid, face, f)
        traces.append(surface_inverse_laplacian(mean_zero_project(boundary)))
    rhs = VectorField.zeros(grid)
    return solve_laplace_dirichlet(rhs, traces[0], traces[1]).field


def smoothed_time_derivative(eta, v, psi, kernel):
    """
    d_t eta^kappa: the boundary smoother applied to v + psi.
    """
    return _smoother(v.values + psi.values, kernel)


def pressure_rhs(state):
    """
    Coefficients and right side of -div(E grad q) = G, with
    E = J A^T A and G = -(G1 + G0^T.grad G2).
    """
    cache = refresh_geometry(state)
    if "deta_k" not in cache:
        psi = modification_term(state.eta, state.v, cache["eta_k"], state.kernel, cache["A_k"])
        cache["psi"] = psi
        cache["deta_k"] = smoothed_time_derivative(state.eta, state.v, psi, state.kernel)
    grid = state.grid
    J = cache["J_k"].values
    A = cache["A_k"].values
    G0 = state.G0
    dF = grid.gradient(cache["deta_k"].values)  # dF[m, l] = d_l d_t eta^kappa_m
    dA = -np.einsum("il...,ml...,mj...->ij...", A, dF, A)
    gv = grid.gradient(state.v.values)
    W = directional(G0, state.eta)  # W[k, i] = G0_mk d_m eta_i
    nested = contract_directional(G0, W).values
    gW = grid.gradient(W.values)  # gW[k, i, j] = d_j W[k, i]
    G2 = VectorField(grid, J * np.einsum("ij...,kij...->k...", A, gW))
    outer = J * np.einsum("ij...,ij...->...", A, grid.gradient(nested))
    inner = contract_directional(G0, G2).values
    G1 = J * np.einsum("ij...,ij...->...", dA, gv) + (outer - inner)
    E = MatrixField(grid, J * np.einsum("ij...,ik...->jk...", A, A))
    G = ScalarField(grid, -(G1 + inner))
    cache.update(dA_k=MatrixField(grid, dA), G1=ScalarField(grid, G1), G2=G2, E=E, G=G)
    return E, G


def _status(state, rt_margin=math.inf):
    cache = state.cache
    J = cache["J_k"].values
    A = cache["A_k"].values
    jk_dev = float(np.max(np.abs(J - 1.0)))
    ak_dev = float(np.max(np.abs(A - np.eye(3)[:, :, None, None, None])))
    return AprioriStatus(jk_dev, ak_dev, rt_margin, state.partition.lam)


def _rt_margin(state, q):
    faces = state.partition.faces("RT")
    if not faces:
        return math.inf
    return min(rayleigh_taylor_margin(q, face) for face in faces)


def solve_state_pressure(state):
    """
    Fill psi, d_t eta^kappa, E, G and q into the cache.
    """
    cache = refresh_geometry(state)
    if "q" not in cache:
        E, G = pressure_rhs(state)
        cache["q"] = solve_pressure(E, G).field
    return cache["q"]


def right_side(state):
    """
    (d_t eta, d_t v) of the kappa-system.

    Raises AprioriViolation, carrying the measured AprioriStatus, when
    the state has left the regime J, A close to the identity and
    -grad q . N >= lambda/2 on the Rayleigh-Taylor faces.
    """
    cache = state.cache
    if "dv" in cache:
        return cache["deta"], cache["dv"]
    refresh_geometry(state)
    status = _status(state)
    if not status.ok:
        cache["status"] = status
        raise AprioriViolation(status)
    q = solve_state_pressure(state)
    status = _status(state, _rt_margin(state, q))
    cache["status"] = status
    if not status.ok:
        raise AprioriViolation(status)
    deta = state.v + cache["psi"]
    dv = elastic_force(state.G0, state.eta) - a_gradient(cache["A_k"], q)
    cache["deta"] = deta
    cache["dv"] = dv
    return deta, dv


def monitor_apriori(state, partition=None):
    """
    Measure the a priori quantities of a state without raising.
    """
    if partition is not None and partition is not state.partition:
        state = state.derive(state.t, state.eta, state.v, state.F)
        state.partition = partition
    refresh_geometry(state)
    status = _status(state)
    if not state.partition.faces("RT"):
        return status
    if "q" not in state.cache and not status.ok:
        return AprioriStatus(status.jk_dev, status.ak_dev, math.nan, status.lam)
    q = solve_state_pressure(state)
    return _status(state, _rt_margin(state, q))


def cfl_limit(state, cfl=0.3):
    """
    cfl * min(h) / (max|v| + max|G0|).
    """
    speed = state.v.max_abs() + state.G0.max_abs()
    if speed == 0.0:
        return math.inf
    return cfl * state.grid.h_min / speed


def _derivatives(state, track):
    deta, dv = right_side(state)
    dF = None
    if track and state.F is not None:
        A = jacobian_and_cofactor(deformation_gradient(state.eta))[1]
        dF = deformation_rate(A, deta, state.F)
    return deta, dv, dF


def _advance(state, dt, derivative, t=None):
    deta, dv, dF = derivative
    eta = FlowMap(state.eta.displacement + dt * deta)
    v = state.v + dt * dv
    F = None if state.F is None or dF is None else state.F + dt * dF
    return state.derive(state.t + dt if t is None else t, eta, v, F)


def step(state, dt, cfl=0.3):
    """
    One classical Runge-Kutta step of size dt (negative dt runs backward).

    Raises StepRejected if any stage leaves the a priori regime.
    """
    if not isinstance(dt, numbers.Real) or not math.isfinite(dt):
        raise ValueError("Invalid time_step: %r; should be a finite number" % (dt,))
    limit = cfl_limit(state, cfl)
    if abs(dt) > limit * (1.0 + 1e-12):
        raise ValueError("Invalid time_step: %r; exceeds the CFL limit %.6g" % (dt, limit))
    track = state.F is not None
    try:
        k1 = _derivatives(state, track)
        k2 = _derivatives(_advance(state, dt / 2.0, k1), track)
        k3 = _derivatives(_advance(state, dt / 2.0, k2), track)
        k4 = _derivatives(_advance(state, dt, k3), track)
    except AprioriViolation as exc:
        raise StepRejected(exc) from exc

    def combine(index):
        if k1[index] is None:
            return None
        return (k1[index] + 2.0 * k2[index] + 2.0 * k3[index] + k4[index]) * (1.0 / 6.0)

    return _advance(state, dt, (combine(0), combine(1), combine(2)))


def psi_smallness(state):
    """
    max over both faces of |grad_* psi^kappa| divided by sqrt(kappa).
    """
    solve_state_pressure(state)
    psi = state.cache["psi"].values
    grid = state.grid
    worst = 0.0
    for face in FACES:
        trace = psi[..., face_index(grid, face)]
        d1 = grid.horizontal_derivative(trace, 1, 0, surface=True)
        d2 = grid.horizontal_derivative(trace, 0, 1, surface=True)
        worst = max(worst, float(np.max(np.sqrt(np.sum(d1 ** 2 + d2 ** 2, axis=0)))))
    return worst / math.sqrt(state.kappa)


def smoother_ratio(eta, kernel, s=4):
    """
    ||eta^kappa||_s / ||eta||_s.
    """
    return smooth_flowmap(eta, kernel).sobolev_norm(s) / eta.sobolev_norm(s)


def initial_state(initial, kernel, track_deformation=True):
    """
    The state at t = 0 built from validated initial data.
    """
    F = deformation_from_flowmap(initial.eta0, initial.G0) if track_deformation else None
    return SimState(0.0, initial.eta0, initial.v0, kernel, initial.G0, initial.partition, F)
