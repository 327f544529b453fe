"""Discrete L^2(B) projection onto polynomials and the estimates built on it.

The basis is the shifted-scaled monomials ((x - x_B)/r)^alpha, |alpha| <= k,
which keeps the normal equations well conditioned independently of where the
ball sits and how large it is.  The least-squares problem carries the
quadrature weights, so the residual is quadrature-orthogonal to the basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Ball, GridFunction, GridSpec, region_slices, region_weights
from .lipschitz import LipschitzOrder, lambda_gamma_norm

__all__ = [
    "PolyProjection",
    "poly_project",
    "projection_sup_ratio",
    "campanato_ratio",
    "multi_indices",
]


def multi_indices(dim: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent multi-indices with |alpha| <= degree, graded order."""
    if dim == 1:
        return [(a,) for a in range(degree + 1)]
    return [
        (a1, a2)
        for total in range(degree + 1)
        for a1 in range(total + 1)
        for a2 in [total - a1]
    ]


@dataclass(frozen=True)
class PolyProjection:
    """Polynomial in the shifted-scaled monomial basis on a ball."""

    ball: Ball
    degree: int
    coefficients: np.ndarray

    def evaluate(self, spec: GridSpec) -> np.ndarray:
        """Values of the polynomial at every grid node (defined everywhere)."""
        meshes = spec.meshes()
        scaled = [(x - c) / self.ball.radius for x, c in zip(meshes, self.ball.center)]
        out = np.zeros(spec.shape)
        for coeff, alpha in zip(
            self.coefficients, multi_indices(spec.dim, self.degree)
        ):
            term = np.ones(spec.shape)
            for u, a in zip(scaled, alpha):
                if a:
                    term = term * u**a
            out += coeff * term
        return out

    def as_gridfunction(self, spec: GridSpec) -> GridFunction:
        return GridFunction(spec, self.evaluate(spec))


def _design_matrix(spec: GridSpec, ball: Ball, degree: int, slices) -> np.ndarray:
    axes = [spec.axis()[s] for s in slices]
    if spec.dim == 1:
        coords = [axes[0]]
    else:
        coords = list(np.meshgrid(axes[0], axes[1], indexing="ij"))
    scaled = [(x - c) / ball.radius for x, c in zip(coords, ball.center)]
    cols = []
    for alpha in multi_indices(spec.dim, degree):
        term = np.ones(scaled[0].shape)
        for u, a in zip(scaled, alpha):
            if a:
                term = term * u**a
        cols.append(term.ravel())
    return np.column_stack(cols)


def poly_project(f: GridFunction, ball: Ball, degree: int) -> PolyProjection:
    """Weighted least-squares projection of f onto polynomials of degree <= k on B."""
    if degree < 0:
        raise ValueError("degree must be >= 0")
    spec = f.spec
    slices = region_slices(spec, ball)
    basis_size = len(multi_indices(spec.dim, degree))
    n_nodes = int(np.prod([s.stop - s.start for s in slices]))
    if n_nodes < 2 * basis_size:
        raise ValueError("under-resolved ball")
    A = _design_matrix(spec, ball, degree, slices)
    w = np.asarray(region_weights(spec, slices)).ravel()
    sw = np.sqrt(w)
    coeffs, _, rank, _ = np.linalg.lstsq(A * sw[:, None], f.values[slices].ravel() * sw, rcond=None)
    if rank < basis_size:
        raise ValueError("degenerate node set")
    return PolyProjection(ball=ball, degree=degree, coefficients=coeffs)


def projection_sup_ratio(f: GridFunction, ball: Ball, degree: int) -> float:
    """Sup norm of the projection on B over the sup norm of f on B."""
    slices = region_slices(f.spec, ball)
    f_sup = float(np.max(np.abs(f.values[slices])))
    if f_sup == 0:
        raise ValueError("f vanishes on the ball")
    proj = poly_project(f, ball, degree)
    p_sup = float(np.max(np.abs(proj.evaluate(f.spec)[slices])))
    return p_sup / f_sup


def campanato_ratio(
    f: GridFunction,
    ball: Ball,
    order: LipschitzOrder,
    degree: int | None = None,
    lambda_norm: float | None = None,
) -> float:
    """Mean projection residual on B against ||f||_Lambda * |B|^(gamma/n).

    `degree` defaults to ceil(gamma), the smallest integer >= gamma.  A
    precomputed Lipschitz norm may be passed to avoid the delta scan.
    """
    if degree is None:
        degree = int(math.ceil(order.gamma))
    if degree < order.gamma:
        raise ValueError("projection degree must be >= gamma")
    if lambda_norm is None:
        lambda_norm = lambda_gamma_norm(f, order)
    if lambda_norm <= 0:
        raise ValueError("degenerate Lipschitz norm")
    spec = f.spec
    slices = region_slices(spec, ball)
    proj = poly_project(f, ball, degree)
    resid = np.abs(f.values[slices] - proj.evaluate(spec)[slices])
    w = region_weights(spec, slices)
    mean_resid = float(np.sum(w * resid) / np.sum(w))
    scale = ball.measure ** (order.gamma / spec.dim)
    return mean_resid / (lambda_norm * scale)
