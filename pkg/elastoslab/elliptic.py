# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

"""
Elliptic solvers on the slab:

* the constant-coefficient Dirichlet problem -Lap u = f, solved mode by
  mode in the horizontal Fourier variables;
* the pressure problem -div(E grad q) = G with q = 0 on both faces,
  solved by GMRES preconditioned with the constant-coefficient solver;
* the surface inverse Laplacian and the mean-zero projection.
"""

from functools import lru_cache

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from .config import get_tolerance
from .errors import NoConvergence, NotSPD
from .grid import BoundaryField, Field, ScalarField, vertical_matrix


class EllipticSolution:
    """
    Args:
        * field: (ScalarField or VectorField) the solution
        * residual_norm: (float) L2 norm of the discrete residual
        * iterations: (int) Krylov iterations (0 for direct solves)
    """

    def __init__(self, field, residual_norm, iterations=0):
        self.field = field
        self.residual_norm = residual_norm
        self.iterations = iterations

    def __repr__(self):
        return "<EllipticSolution residual=%.3g, iterations=%d>" % (self.residual_norm, self.iterations)


class LaplaceSolver:
    """
    Per-mode direct solver for (4 pi^2 |k|^2 - D2) u = f on the interior
    vertical nodes, with D2 the fourth-order second derivative.

    The interior block of D2 is diagonalized once; every horizontal mode
    then costs two small matrix products.
    """

    def __init__(self, grid):
        self.grid = grid
        D2 = vertical_matrix(grid.n3, 2) / grid.h3 ** 2
        self.D2 = D2
        self.block = D2[1:-1, 1:-1]
        self.bottom_column = D2[1:-1, 0]
        self.top_column = D2[1:-1, -1]
        eigenvalues, vectors = np.linalg.eig(self.block)
        self.eigenvalues = eigenvalues
        self.vectors = vectors
        self.inverse_vectors = np.linalg.inv(vectors)
        self.k2 = grid.surface_k2()

    def __repr__(self):
        return "<LaplaceSolver on %r>" % (self.grid,)

    def apply(self, values):
        """
        -Lap_h u at the interior nodes; face rows are zero.
        """
        grid = self.grid
        out = -(
            grid.horizontal_derivative(values, 2, 0)
            + grid.horizontal_derivative(values, 0, 2)
            + values @ self.D2.T
        )
        out[..., 0] = 0.0
        out[..., -1] = 0.0
        return out

    def _solve_modes(self, rhs_hat):
        denominator = self.k2[:, :, None] - self.eigenvalues
        z = (rhs_hat @ self.inverse_vectors.T) / denominator
        return z @ self.vectors.T

    def solve_values(self, rhs, bottom=None, top=None, refine=1):
        """
        Solve with arrays: rhs (..., n1, n2, n3+1), face data (..., n1, n2).
        Returns the solution array with the face values imposed.
        """
        rhs = np.asarray(rhs, dtype=float)
        lead = rhs.shape[:-3]
        bottom = np.zeros(lead + self.grid.surface_shape) if bottom is None else np.asarray(bottom, dtype=float)
        top = np.zeros(lead + self.grid.surface_shape) if top is None else np.asarray(top, dtype=float)
        interior = rhs[..., 1:-1] + bottom[..., None] * self.bottom_column + top[..., None] * self.top_column
        u = np.empty(rhs.shape)
        u[..., 0] = bottom
        u[..., -1] = top
        u[..., 1:-1] = self._invert(interior)
        for _ in range(refine):
            defect = rhs - self.apply(u)
            u[..., 1:-1] += self._invert(defect[..., 1:-1])
        return u

    def _invert(self, interior):
        spectrum = np.fft.fft2(interior, axes=(-3, -2))
        solved = self._solve_modes(spectrum)
        return np.fft.ifft2(solved, axes=(-3, -2)).real

    def precondition(self, interior):
        """
        Approximate inverse used inside the Krylov iteration.
        """
        return self._invert(interior)

    def residual(self, u, rhs):
        defect = self.apply(u) - rhs
        defect[..., 0] = 0.0
        defect[..., -1] = 0.0
        return defect


@lru_cache(maxsize=8)
def _laplace_solver(n1, n2, n3):
    from .grid import Grid

    return LaplaceSolver(Grid(n1, n2, n3))


def laplace_solver(grid):
    return _laplace_solver(grid.n1, grid.n2, grid.n3)


def _face_values(data, rank, grid):
    if data is None:
        return np.zeros((3,) * rank + grid.surface_shape)
    if isinstance(data, BoundaryField):
        return data.values
    return np.broadcast_to(np.asarray(data, dtype=float), (3,) * rank + grid.surface_shape)


def _check_residual(grid, residual, rhs_values, faces, tau, what):
    residual_norm = grid.l2_norm(residual)
    scale = grid.l2_norm(rhs_values) + sum(grid.boundary_norm(f, 0) for f in faces)
    bound = tau * (scale + get_tolerance("ell_floor"))
    if not residual_norm <= bound:
        raise NoConvergence(
            "%s residual %.3g exceeds %.3g" % (what, residual_norm, bound), residual_norm=residual_norm
        )
    return residual_norm


def solve_laplace_dirichlet(rhs, g_bottom=None, g_top=None, tau=None):
    """
    Solve -Lap u = rhs in the slab with u = g on the faces, componentwise.

    Args:
        * rhs: (ScalarField or VectorField)
        * g_bottom, g_top: (BoundaryField, array, number or None) face data

    Returns an EllipticSolution; raises NoConvergence if the discrete
    residual misses tau_ell.
    """
    tau = get_tolerance("tau_ell") if tau is None else tau
    grid = rhs.grid
    solver = laplace_solver(grid)
    bottom = _face_values(g_bottom, rhs.rank, grid)
    top = _face_values(g_top, rhs.rank, grid)
    u = solver.solve_values(rhs.values, bottom, top)
    residual = solver.residual(u, rhs.values)
    norm = _check_residual(grid, residual, rhs.values, (bottom, top), tau, "Laplace")
    return EllipticSolution(rhs.new(u), norm, 0)


def check_spd(E, floor=None):
    """
    Minimum eigenvalue of the symmetric part of E over all nodes.
    """
    floor = get_tolerance("spd_floor") if floor is None else floor
    values = np.moveaxis(E.values, (0, 1), (-2, -1))
    symmetric = 0.5 * (values + np.swapaxes(values, -1, -2))
    lowest = float(np.min(np.linalg.eigvalsh(symmetric)))
    if not lowest >= floor:
        raise NotSPD("minimum eigenvalue %.6g below floor %.3g" % (lowest, floor))
    return lowest


class PressureOperator:
    """
    q -> -E_jk d_j d_k q - (d_j E_jk) d_k q restricted to the interior
    nodes, with q = 0 on the faces.
    """

    def __init__(self, E):
        self.grid = E.grid
        self.E = E.values
        self.dE = self.grid.divergence(np.swapaxes(self.E, 0, 1))  # d_j E_jk
        self.D2 = vertical_matrix(self.grid.n3, 2) / self.grid.h3 ** 2
        n1, n2, n3 = self.grid.dims()
        self.interior_shape = (n1, n2, n3 - 1)
        self.size = n1 * n2 * (n3 - 1)

    def pad(self, x):
        q = np.zeros(self.grid.shape)
        q[..., 1:-1] = x.reshape(self.interior_shape)
        return q

    def apply_values(self, q):
        grid = self.grid
        first = [grid.derivative(q, j) for j in (1, 2, 3)]
        out = np.zeros(grid.shape)
        for j in range(3):
            for k in range(j, 3):
                if j == 2 and k == 2:
                    second = q @ self.D2.T
                elif k == 2:
                    second = grid.derivative(first[2], j + 1)
                else:
                    a = (1 if j == 0 else 0) + (1 if k == 0 else 0)
                    second = grid.horizontal_derivative(q, a, 2 - a)
                coefficient = self.E[j, k] if j == k else self.E[j, k] + self.E[k, j]
                out -= coefficient * second
        for k in range(3):
            out -= self.dE[k] * first[k]
        return out

    def matvec(self, x):
        return self.apply_values(self.pad(x))[..., 1:-1].ravel()


def solve_pressure(E, G, tau=None, max_iter=None, x0=None):
    """
    Solve -div(E grad q) = G with q = 0 on both faces.

    Restarted GMRES preconditioned by the constant-coefficient Laplace
    solve. The one-sided vertical closures make the discrete operator
    non-symmetric even for symmetric E, so conjugate gradients does not
    apply.

    Args:
        * E: (MatrixField) symmetric positive definite coefficients
        * G: (ScalarField) right side
        * tau: (float) relative residual target, default tau_ell
        * max_iter: (int) Krylov iteration cap, default max_iter
        * x0: (ScalarField) optional starting guess

    Raises NotSPD when E fails the eigenvalue floor and NoConvergence
    when the residual target is not met within max_iter iterations.
    """
    tau = get_tolerance("tau_ell") if tau is None else tau
    max_iter = int(get_tolerance("max_iter") if max_iter is None else max_iter)
    grid = G.grid
    check_spd(E)
    if not np.any(G.values[..., 1:-1]):
        return EllipticSolution(ScalarField(grid, np.zeros(grid.shape)), 0.0, 0)

    operator = PressureOperator(E)
    solver = laplace_solver(grid)
    size = operator.size
    A = LinearOperator((size, size), matvec=operator.matvec, dtype=float)
    M = LinearOperator(
        (size, size),
        matvec=lambda r: solver.precondition(r.reshape(operator.interior_shape)).ravel(),
        dtype=float,
    )
    b = G.values[..., 1:-1].ravel()
    x = None if x0 is None else x0.values[..., 1:-1].ravel()
    bound = tau * (grid.l2_norm(G.values) + get_tolerance("ell_floor"))
    counter = {"iterations": 0}

    def count(_):
        counter["iterations"] += 1

    restart = min(50, max_iter)
    residual_norm = np.inf
    while counter["iterations"] < max_iter:
        before = counter["iterations"]
        x, _ = gmres(
            A,
            b,
            x0=x,
            rtol=tau / 10.0,
            atol=0.0,
            restart=restart,
            maxiter=max(1, (max_iter - counter["iterations"]) // restart),
            M=M,
            callback=count,
            callback_type="pr_norm",
        )
        q = operator.pad(x)
        residual = operator.apply_values(q) - G.values
        residual[..., 0] = 0.0
        residual[..., -1] = 0.0
        residual_norm = grid.l2_norm(residual)
        if residual_norm <= bound:
            return EllipticSolution(ScalarField(grid, q), residual_norm, counter["iterations"])
        if counter["iterations"] == before:
            break
    raise NoConvergence(
        "pressure residual %.3g exceeds %.3g after %d iterations" % (residual_norm, bound, counter["iterations"]),
        residual_norm=residual_norm,
        iterations=counter["iterations"],
    )


def mean_zero_project(f):
    """
    P f = f - mean(f) on a face.
    """
    values = f.values
    mean = values.mean(axis=(-2, -1), keepdims=True)
    return f.new(values - mean)


def surface_inverse_laplacian(f):
    """
    Lap_*^{-1} P f: zero mean, Fourier coefficients divided by -4 pi^2 |k|^2.
    """
    grid = f.grid
    k2 = grid.surface_k2()
    spectrum = np.fft.fft2(f.values, axes=(-2, -1))
    safe = np.where(k2 == 0, 1.0, k2)
    spectrum = np.where(k2 == 0, 0.0, -spectrum / safe)
    return f.new(np.fft.ifft2(spectrum, axes=(-2, -1)).real)


def surface_laplacian(f):
    grid = f.grid
    return f.new(
        grid.horizontal_derivative(f.values, 2, 0, surface=True)
        + grid.horizontal_derivative(f.values, 0, 2, surface=True)
    )


def harmonic_extension(bottom, top):
    """
    The solution of -Lap u = 0 with the given face data.
    """
    grid = bottom.grid
    rank = bottom.rank
    rhs = Field.wrap(grid, np.zeros((3,) * rank + grid.shape))
    return solve_laplace_dirichlet(rhs, bottom, top)
