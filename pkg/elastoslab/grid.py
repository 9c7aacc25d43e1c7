# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

"""
The discrete periodic slab T^2 x (0,1), sampled fields on it, their
derivatives and their Sobolev norms.

Horizontal directions are Fourier-spectral with period 1; the vertical
direction uses fourth-order finite differences on the nodes
x3 = 0, h3, ..., 1, so both faces are grid nodes.

Array layout: a field of rank r has values of shape
(3,) * r + (n1, n2, n3 + 1); boundary fields drop the last axis.
"""

import math
from functools import lru_cache

import numpy as np

FACES = ("bottom", "top")
NORMAL_SIGN = {"bottom": -1.0, "top": 1.0}


def _is_power_of_two(n):
    return n > 0 and (n & (n - 1)) == 0


def fd_weights(z, x, m):
    """
    Finite difference weights for the m-th derivative at z using
    the nodes x (Fornberg's recursion).
    """
    n = len(x)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 = c2 * c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


@lru_cache(maxsize=None)
def vertical_matrix(n3, order):
    """
    Dense (n3+1) x (n3+1) matrix of the fourth-order vertical derivative
    of the given order, in units where h3 = 1.

    Rows use the centered stencil where it fits and a shifted one-sided
    window of order + 4 nodes near the faces.
    """
    nodes = n3 + 1
    half = (order + 3) // 2
    width = order + 4
    if width > nodes:
        raise ValueError("Invalid n3: %r; too small for order %r" % (n3, order))
    matrix = np.zeros((nodes, nodes))
    for i in range(nodes):
        if i - half >= 0 and i + half <= n3:
            start, stop = i - half, i + half + 1
        else:
            start = min(max(i - width // 2, 0), nodes - width)
            stop = start + width
        window = np.arange(start, stop, dtype=float)
        matrix[i, start:stop] = fd_weights(float(i), window, order)
        # exact annihilation of constants
        matrix[i, i] -= matrix[i, start:stop].sum()
    matrix.flags.writeable = False
    return matrix


class Grid:
    """
    The sampled unit slab.

    Args:
        * n1: (int) horizontal samples along x1, a power of two >= 8
        * n2: (int) horizontal samples along x2, a power of two >= 8
        * n3: (int) vertical cells, >= 8
    """

    def __init__(self, n1=32, n2=32, n3=32):
        for name, value in (("n1", n1), ("n2", n2)):
            if not isinstance(value, (int, np.integer)) or value < 8 or not _is_power_of_two(int(value)):
                raise ValueError("Invalid %s: %r; should be a power of two >= 8" % (name, value))
        if not isinstance(n3, (int, np.integer)) or n3 < 8:
            raise ValueError("Invalid n3: %r; should be an integer >= 8" % (n3,))
        self.n1 = int(n1)
        self.n2 = int(n2)
        self.n3 = int(n3)
        self.h1 = 1.0 / self.n1
        self.h2 = 1.0 / self.n2
        self.h3 = 1.0 / self.n3
        self.shape = (self.n1, self.n2, self.n3 + 1)
        self.surface_shape = (self.n1, self.n2)

    def __repr__(self):
        return "<Grid n1=%s, n2=%s, n3=%s>" % (self.n1, self.n2, self.n3)

    def __eq__(self, other):
        return isinstance(other, Grid) and self.dims() == other.dims()

    def __hash__(self):
        return hash(self.dims())

    def dims(self):
        return (self.n1, self.n2, self.n3)

    def to_json(self):
        return {"n1": self.n1, "n2": self.n2, "n3": self.n3}

    @property
    def h_min(self):
        return min(self.h1, self.h2, self.h3)

    @property
    def x1(self):
        return (np.arange(self.n1) * self.h1).reshape(-1, 1, 1)

    @property
    def x2(self):
        return (np.arange(self.n2) * self.h2).reshape(1, -1, 1)

    @property
    def x3(self):
        return (np.arange(self.n3 + 1) * self.h3).reshape(1, 1, -1)

    def coordinates(self):
        """
        The identity map sampled on the grid, shape (3, n1, n2, n3+1).
        """
        return np.stack(np.broadcast_arrays(self.x1, self.x2, self.x3)).astype(float)

    def surface_coordinates(self):
        x1 = (np.arange(self.n1) * self.h1).reshape(-1, 1)
        x2 = (np.arange(self.n2) * self.h2).reshape(1, -1)
        return np.broadcast_to(x1, self.surface_shape), np.broadcast_to(x2, self.surface_shape)

    def wavenumbers(self, axis):
        """
        Angular wavenumbers 2 pi k along horizontal axis 1 or 2, as a
        flat array in FFT order.
        """
        n = self.n1 if axis == 1 else self.n2
        return 2 * np.pi * np.fft.fftfreq(n, d=1.0 / n)

    def surface_wavenumbers(self):
        """
        Pair (k1, k2) of angular wavenumbers broadcast to (n1, n2).
        """
        k1 = self.wavenumbers(1).reshape(-1, 1)
        k2 = self.wavenumbers(2).reshape(1, -1)
        return np.broadcast_to(k1, self.surface_shape), np.broadcast_to(k2, self.surface_shape)

    def surface_k2(self):
        """
        |2 pi k|^2 on the horizontal mode grid.
        """
        k1, k2 = self.surface_wavenumbers()
        return k1 ** 2 + k2 ** 2

    def derivative_symbol(self, a1, a2):
        """
        Fourier symbol of d1^a1 d2^a2 on the (n1, n2) mode grid, with the
        Nyquist mode of odd orders removed.
        """
        k1, k2 = self.surface_wavenumbers()
        symbol = np.ones(self.surface_shape, dtype=complex)
        if a1:
            kk = k1.copy()
            if a1 % 2 == 1:
                kk[self.n1 // 2, :] = 0.0
            symbol = symbol * (1j * kk) ** a1
        if a2:
            kk = k2.copy()
            if a2 % 2 == 1:
                kk[:, self.n2 // 2] = 0.0
            symbol = symbol * (1j * kk) ** a2
        return symbol

    def trapezoid_weights(self):
        w = np.full(self.n3 + 1, self.h3)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    # Array-level calculus ------------------------------------------

    def horizontal_derivative(self, values, a1, a2=0, surface=False):
        """
        Spectral d1^a1 d2^a2 of an array whose horizontal axes are
        (-3, -2), or (-2, -1) when surface is True.
        """
        if a1 == 0 and a2 == 0:
            return np.array(values, dtype=float)
        axes = (-2, -1) if surface else (-3, -2)
        symbol = self.derivative_symbol(a1, a2)
        if not surface:
            symbol = symbol[:, :, None]
        spectrum = np.fft.fft2(values, axes=axes)
        return np.fft.ifft2(spectrum * symbol, axes=axes).real

    def vertical(self, values, order):
        if order == 0:
            return np.array(values, dtype=float)
        matrix = vertical_matrix(self.n3, order) / self.h3 ** order
        return values @ matrix.T

    def derivative(self, values, axis, order=1):
        if axis == 1:
            return self.horizontal_derivative(values, order, 0)
        elif axis == 2:
            return self.horizontal_derivative(values, 0, order)
        elif axis == 3:
            return self.vertical(values, order)
        else:
            raise ValueError("Invalid axis: %r; should be 1, 2 or 3" % (axis,))

    def gradient(self, values):
        """
        Append a trailing component index holding d_j, j = 1..3.
        """
        lead = values.ndim - 3
        return np.stack([self.derivative(values, j) for j in (1, 2, 3)], axis=lead)

    def divergence(self, values):
        """
        Contract the last component index against d_j.
        """
        lead = values.ndim - 4
        return sum(self.derivative(np.take(values, j, axis=lead), j + 1) for j in range(3))

    def integrate(self, values):
        """
        Integral over the slab of every component: exact horizontal
        sums and the trapezoid rule in x3.
        """
        layers = values.sum(axis=(-3, -2)) * self.h1 * self.h2
        return layers @ self.trapezoid_weights()

    def surface_integrate(self, values):
        return values.sum(axis=(-2, -1)) * self.h1 * self.h2

    def l2_norm(self, values):
        return math.sqrt(max(float(np.sum(self.integrate(values ** 2))), 0.0))

    def sobolev_norm(self, values, s):
        """
        (sum over |a| <= s of ||D^a f||^2)^(1/2), summed over components.
        """
        if s not in range(0, 5):
            raise ValueError("Invalid s: %r; should be an integer in 0..4" % (s,))
        total = 0.0
        for a3 in range(s + 1):
            layer = self.vertical(values, a3)
            spectrum = np.fft.fft2(layer, axes=(-3, -2))
            for a1, a2 in multi_indices_2d(s - a3):
                if a1 == 0 and a2 == 0:
                    d = layer
                else:
                    symbol = self.derivative_symbol(a1, a2)[:, :, None]
                    d = np.fft.ifft2(spectrum * symbol, axes=(-3, -2)).real
                total += float(np.sum(self.integrate(d ** 2)))
        return math.sqrt(total)

    def boundary_norm(self, values, s):
        """
        |f|_s = || (1 + 4 pi^2 |k|^2)^(s/2) f_hat ||_l2 with f_hat the
        normalized discrete Fourier coefficients, summed over components.
        """
        coefficients = np.fft.fft2(values, axes=(-2, -1)) / (self.n1 * self.n2)
        weight = (1.0 + self.surface_k2()) ** (s / 2.0)
        return math.sqrt(float(np.sum((weight * np.abs(coefficients)) ** 2)))


def multi_indices_2d(order):
    """
    All (a1, a2) with a1 + a2 <= order.
    """
    return [(a1, a2) for a1 in range(order + 1) for a2 in range(order + 1 - a1)]


class Field:
    """
    A sampled function on the slab. Values are finite and immutable by
    convention: operations return new fields.
    """

    rank = None

    def __init__(self, grid, values):
        values = np.asarray(values, dtype=float)
        expected = (3,) * self.rank + grid.shape
        if values.shape != expected:
            raise ValueError(
                "Invalid values for %s: shape %r; should be %r"
                % (self.__class__.__name__, values.shape, expected)
            )
        self.grid = grid
        self.values = values

    def __repr__(self):
        return "<%s on %r>" % (self.__class__.__name__, self.grid)

    @staticmethod
    def wrap(grid, values):
        """
        Build the field class that matches the rank of values.
        """
        values = np.asarray(values, dtype=float)
        rank = values.ndim - 3
        return FIELD_CLASSES[rank](grid, values)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((3,) * cls.rank + grid.shape))

    def new(self, values):
        return Field.wrap(self.grid, values)

    def copy(self):
        return self.new(self.values.copy())

    def _operand(self, other):
        if isinstance(other, Field):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids: %r, %r" % (self.grid, other.grid))
            return other.values
        return other

    def __add__(self, other):
        return self.new(self.values + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.new(self.values - self._operand(other))

    def __rsub__(self, other):
        return self.new(self._operand(other) - self.values)

    def __neg__(self):
        return self.new(-self.values)

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            return self.new(self.values * other.values)
        if isinstance(other, Field):
            raise ValueError("can only multiply fields by scalars or scalar fields")
        return self.new(self.values * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScalarField):
            return self.new(self.values / other.values)
        return self.new(self.values / other)

    def __getitem__(self, index):
        return self.new(self.values[index])

    def max_abs(self):
        return float(np.max(np.abs(self.values)))

    def norm(self, s=0):
        return sobolev_norm(self, s)


class ScalarField(Field):
    rank = 0

    def __getitem__(self, index):
        raise TypeError("ScalarField has no components")


class VectorField(Field):
    rank = 1


class MatrixField(Field):
    rank = 2

    def transpose(self):
        return MatrixField(self.grid, np.swapaxes(self.values, 0, 1))


class TensorField(Field):
    rank = 3


FIELD_CLASSES = {0: ScalarField, 1: VectorField, 2: MatrixField, 3: TensorField}


class BoundaryField:
    """
    A sampled function on one face of the slab.
    """

    rank = None

    def __init__(self, grid, face, values):
        if face not in FACES:
            raise ValueError("Invalid face: %r; should be one of %r" % (face, FACES))
        values = np.asarray(values, dtype=float)
        expected = (3,) * self.rank + grid.surface_shape
        if values.shape != expected:
            raise ValueError(
                "Invalid values for %s: shape %r; should be %r"
                % (self.__class__.__name__, values.shape, expected)
            )
        self.grid = grid
        self.face = face
        self.values = values

    def __repr__(self):
        return "<%s on %s face of %r>" % (self.__class__.__name__, self.face, self.grid)

    @staticmethod
    def wrap(grid, face, values):
        values = np.asarray(values, dtype=float)
        return BOUNDARY_CLASSES[values.ndim - 2](grid, face, values)

    def new(self, values):
        return BoundaryField.wrap(self.grid, self.face, values)

    def __add__(self, other):
        other = other.values if isinstance(other, BoundaryField) else other
        return self.new(self.values + other)

    def __sub__(self, other):
        other = other.values if isinstance(other, BoundaryField) else other
        return self.new(self.values - other)

    def __neg__(self):
        return self.new(-self.values)

    def __mul__(self, other):
        other = other.values if isinstance(other, BoundaryScalarField) else other
        return self.new(self.values * other)

    __rmul__ = __mul__

    def __getitem__(self, index):
        return self.new(self.values[index])

    def max_abs(self):
        return float(np.max(np.abs(self.values)))

    def norm(self, s=0):
        return boundary_norm(self, s)


class BoundaryScalarField(BoundaryField):
    rank = 0


class BoundaryVectorField(BoundaryField):
    rank = 1


class BoundaryMatrixField(BoundaryField):
    rank = 2


BOUNDARY_CLASSES = {0: BoundaryScalarField, 1: BoundaryVectorField, 2: BoundaryMatrixField}


def face_index(grid, face):
    if face == "bottom":
        return 0
    elif face == "top":
        return grid.n3
    raise ValueError("Invalid face: %r; should be one of %r" % (face, FACES))


def from_function(grid, function, rank=0):
    """
    Sample function(x1, x2, x3) on the grid. The function returns an
    array (or a list of them for vector and matrix fields).
    """
    x1, x2, x3 = grid.coordinates()
    values = np.asarray(function(x1, x2, x3), dtype=float)
    values = np.broadcast_to(values, (3,) * rank + grid.shape).copy()
    return FIELD_CLASSES[rank](grid, values)


def surface_from_function(grid, face, function, rank=0):
    x1, x2 = grid.surface_coordinates()
    values = np.asarray(function(x1, x2), dtype=float)
    values = np.broadcast_to(values, (3,) * rank + grid.surface_shape).copy()
    return BOUNDARY_CLASSES[rank](grid, face, values)


def tangential_derivative(f, axis, order=1):
    """
    Spectral derivative d_axis^order of a field (or boundary field)
    along a horizontal axis.

    Args:
        * f: (Field or BoundaryField) the function to differentiate
        * axis: (int) 1 or 2
        * order: (int) >= 1
    """
    if axis not in (1, 2):
        raise ValueError("Invalid axis: %r; should be 1 or 2" % (axis,))
    if not isinstance(order, (int, np.integer)) or order < 1:
        raise ValueError("Invalid order: %r; should be an integer >= 1" % (order,))
    a1, a2 = (order, 0) if axis == 1 else (0, order)
    surface = isinstance(f, BoundaryField)
    return f.new(f.grid.horizontal_derivative(f.values, a1, a2, surface=surface))


def vertical_derivative(f, order=1):
    """
    Fourth-order finite difference d_3^order, one-sided at the faces.
    """
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= 4:
        raise ValueError("Invalid order: %r; should be an integer in 1..4" % (order,))
    return f.new(f.grid.vertical(f.values, order))


def derivative(f, axis, order=1):
    if axis == 3:
        return vertical_derivative(f, order)
    return tangential_derivative(f, axis, order)


def gradient(f):
    """
    Gradient with the derivative index last: (grad w)_{kj} = d_j w_k.
    """
    return f.new(f.grid.gradient(f.values))


def divergence(f):
    """
    Divergence over the last component index: d_j f_{...j}.
    """
    return f.new(f.grid.divergence(f.values))


def integrate(f):
    return f.grid.integrate(f.values)


def l2_norm(f):
    if isinstance(f, BoundaryField):
        return boundary_norm(f, 0)
    return f.grid.l2_norm(f.values)


def sobolev_norm(f, s):
    return f.grid.sobolev_norm(f.values, s)


def boundary_norm(f, s):
    """
    Spectral H^s norm of a boundary field; s may be fractional or negative.
    """
    if not -0.5 <= s <= 4:
        raise ValueError("Invalid s: %r; should be in [-1/2, 4]" % (s,))
    return f.grid.boundary_norm(f.values, s)


def trace(f, face):
    """
    Restriction of a field to x3 = 0 ("bottom") or x3 = 1 ("top").
    """
    index = face_index(f.grid, face)
    return BoundaryField.wrap(f.grid, face, f.values[..., index])


def extend_constant(boundary, grid=None):
    """
    A field constant in x3 equal to the given face values.
    """
    grid = grid or boundary.grid
    values = np.repeat(boundary.values[..., None], grid.n3 + 1, axis=-1)
    return Field.wrap(grid, values)
