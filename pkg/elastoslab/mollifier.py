# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

"""
Horizontal convolution by layers with a dilated bump kernel, and the
measured constants of its smoothing, loss and commutator estimates.
"""

import math

import numpy as np

from .errors import KernelUnresolved
from .geometry import FlowMap
from .grid import BoundaryField, Field


class MollifierKernel:
    """
    A dilated bump on the horizontal grid, normalized to unit discrete
    mass.

    Args:
        * kappa: (float) support radius
        * grid: (Grid) the grid it is sampled on
        * samples: (array) kernel values at minimal-image offsets, (n1, n2)
        * spectrum: (array) real discrete Fourier transform, (n1, n2)
    """

    def __init__(self, kappa, grid, samples, spectrum):
        self.kappa = kappa
        self.grid = grid
        self.samples = samples
        self.spectrum = spectrum
        self.support = [tuple(index) for index in np.argwhere(samples > 0)]

    def __repr__(self):
        return "<MollifierKernel kappa=%s on %r, %d support nodes>" % (
            self.kappa,
            self.grid,
            len(self.support),
        )

    def mass(self):
        return float(self.samples.sum() * self.grid.h1 * self.grid.h2)

    def spectral_max(self):
        return float(np.max(np.abs(self.spectrum)))


def make_kernel(kappa, grid):
    """
    Sample rho(x) = exp(-1/(1-|x|^2)) dilated by kappa on the periodic
    horizontal grid and renormalize its discrete mass to 1.
    """
    if not isinstance(kappa, (int, float, np.floating)) or not 0 < kappa < 0.25:
        raise ValueError("Invalid kappa: %r; should be in (0, 1/4)" % (kappa,))
    if kappa < 2 * max(grid.h1, grid.h2):
        raise KernelUnresolved(
            "kappa=%r is not resolved by %r; need kappa >= %r" % (kappa, grid, 2 * max(grid.h1, grid.h2))
        )
    offset1 = np.fft.fftfreq(grid.n1).reshape(-1, 1)
    offset2 = np.fft.fftfreq(grid.n2).reshape(1, -1)
    r2 = (offset1 ** 2 + offset2 ** 2) / kappa ** 2
    samples = np.zeros(grid.surface_shape)
    inside = r2 < 1.0
    samples[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    samples /= samples.sum() * grid.h1 * grid.h2
    spectrum = np.fft.fft2(samples).real * grid.h1 * grid.h2
    return MollifierKernel(kappa, grid, samples, spectrum)


def _apply_multiplier(values, multiplier, surface):
    axes = (-2, -1) if surface else (-3, -2)
    if not surface:
        multiplier = multiplier[:, :, None]
    return np.fft.ifft2(np.fft.fft2(values, axes=axes) * multiplier, axes=axes).real


def _direct(values, kernel, surface):
    axes = (-2, -1) if surface else (-3, -2)
    weight = kernel.grid.h1 * kernel.grid.h2
    out = np.zeros_like(values)
    for i, j in kernel.support:
        out += kernel.samples[i, j] * weight * np.roll(values, (i, j), axis=axes)
    return out


def mollify(f, kernel, method="spectral", times=1):
    """
    Lambda_kappa f: horizontal convolution on every layer (or on a face).

    Args:
        * f: (Field, BoundaryField or FlowMap)
        * kernel: (MollifierKernel)
        * method: (str) "spectral" or "direct" (quadrature, for checking)
        * times: (int) apply the operator this many times
    """
    if isinstance(f, FlowMap):
        return FlowMap(mollify(f.displacement, kernel, method, times))
    surface = isinstance(f, BoundaryField)
    if not surface and not isinstance(f, Field):
        raise ValueError("Invalid field: %r; should be a Field, BoundaryField or FlowMap" % (f,))
    values = f.values
    if method == "spectral":
        values = _apply_multiplier(values, kernel.spectrum ** times, surface)
    elif method == "direct":
        for _ in range(times):
            values = _direct(values, kernel, surface)
    else:
        raise ValueError("Invalid method: %r; should be 'spectral' or 'direct'" % (method,))
    return f.new(values)


def commutator(kernel, h, g, derivative=None):
    """
    [Lambda_kappa, h] g = Lambda_kappa(h g) - h Lambda_kappa(g); with a
    derivative axis, g is first differentiated along it.
    """
    surface = isinstance(g, BoundaryField)
    values = g.values
    if derivative is not None:
        values = g.grid.horizontal_derivative(
            values, 1 if derivative == 1 else 0, 1 if derivative == 2 else 0, surface=surface
        )
    hv = h.values if hasattr(h, "values") else h
    if not surface and np.ndim(hv) == 2:
        hv = hv[:, :, None]
    out = _apply_multiplier(hv * values, kernel.spectrum, surface) - hv * _apply_multiplier(
        values, kernel.spectrum, surface
    )
    return g.new(out)


# Measured constants ------------------------------------------------


def operator_norm(kernel, s=0):
    """
    sup |Lambda h|_s / |h|_s; Lambda is a Fourier multiplier, so this is
    max |rho_hat| for every s.
    """
    return kernel.spectral_max()


def loss_constant(kernel, s):
    """
    sup over modes of |d Lambda h|_0 / |h|_s: max |2 pi k| |rho_hat| / (1 + 4 pi^2 |k|^2)^(s/2).
    """
    k2 = kernel.grid.surface_k2()
    return float(np.max(np.sqrt(k2) * np.abs(kernel.spectrum) / (1.0 + k2) ** (s / 2.0)))


def loss_ratio(kernel, h, s):
    """
    |grad_* Lambda h|_0 / |h|_s for one boundary field h.
    """
    grid = kernel.grid
    smooth = mollify(h, kernel).values
    d1 = grid.horizontal_derivative(smooth, 1, 0, surface=True)
    d2 = grid.horizontal_derivative(smooth, 0, 1, surface=True)
    top = math.sqrt(grid.boundary_norm(d1, 0) ** 2 + grid.boundary_norm(d2, 0) ** 2)
    return top / grid.boundary_norm(h.values, s)


def w1_inf(grid, h):
    hv = np.asarray(h)
    d1 = grid.horizontal_derivative(hv, 1, 0, surface=True)
    d2 = grid.horizontal_derivative(hv, 0, 1, surface=True)
    return float(np.max(np.abs(hv)) + np.max(np.sqrt(d1 ** 2 + d2 ** 2)))


def commutator_norm(kernel, h, derivative=None, s=0.0, iterations=60, seed=0):
    """
    Operator norm on the face of g -> S [Lambda, h] d g, with S the
    H^s weight, measured by power iteration on T*T and normalized by
    |h|_inf (no derivative) or |h|_{W^{1,inf}}.

    Args:
        * kernel: (MollifierKernel)
        * h: (BoundaryScalarField or array (n1, n2)) the multiplier
        * derivative: (None, 1 or 2) horizontal derivative applied to g
        * s: (float) 0 or 1/2
    """
    grid = kernel.grid
    hv = h.values if hasattr(h, "values") else np.asarray(h)
    weight = (1.0 + grid.surface_k2()) ** (s / 2.0)
    spectrum = kernel.spectrum

    def smooth(u):
        return _apply_multiplier(u, spectrum, True)

    def weigh(u, power):
        return _apply_multiplier(u, weight ** power, True)

    def d(u):
        if derivative is None:
            return u
        return grid.horizontal_derivative(u, 1 if derivative == 1 else 0, 1 if derivative == 2 else 0, surface=True)

    def forward(u):
        u = d(weigh(u, -1))
        return weigh(smooth(hv * u) - hv * smooth(u), 1)

    def adjoint(u):
        u = weigh(u, 1)
        # [Lambda, h]* = -[Lambda, h] and d* = -d
        u = hv * smooth(u) - smooth(hv * u)
        if derivative is not None:
            u = -d(u)
        return weigh(u, -1)

    rng = np.random.default_rng(seed)
    u = rng.standard_normal(grid.surface_shape)
    u /= np.linalg.norm(u)
    for _ in range(iterations):
        u = adjoint(forward(u))
        size = np.linalg.norm(u)
        if size == 0.0:
            return 0.0
        u /= size
    value = float(np.linalg.norm(forward(u)))
    if derivative is None:
        scale = float(np.max(np.abs(hv)))
    else:
        scale = w1_inf(grid, hv)
    return value / scale if scale > 0 else 0.0


def kappa_slope(kappas, values):
    """
    Least-squares slope of log(values) against log(kappas).
    """
    return float(np.polyfit(np.log(np.asarray(kappas, dtype=float)), np.log(np.asarray(values, dtype=float)), 1)[0])
