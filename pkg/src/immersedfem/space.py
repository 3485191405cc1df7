"""Continuous tensor-product Lagrange elements on uniform grids: shape
functions, nodal interpolation, and the interpolant that zeroes every degree
of freedom trapped inside the interface layer."""

from __future__ import annotations

import numpy as np

from .mesh import Mesh, CellClassification, _lattice, _ravel_index


def _lagrange_1d(degree: int, x: np.ndarray):
    """Values and derivatives of the 1D Lagrange basis on nodes k/degree."""
    x = np.asarray(x, dtype=float)
    nodes = np.arange(degree + 1) / degree if degree > 0 else np.zeros(1)
    n = degree + 1
    values = np.ones(x.shape + (n,))
    derivs = np.zeros(x.shape + (n,))
    for a in range(n):
        denom = np.prod([nodes[a] - nodes[b] for b in range(n) if b != a])
        num = np.ones_like(x)
        for b in range(n):
            if b != a:
                num = num * (x - nodes[b])
        values[..., a] = num / denom
        der = np.zeros_like(x)
        for b in range(n):
            if b == a:
                continue
            term = np.ones_like(x)
            for cc in range(n):
                if cc != a and cc != b:
                    term = term * (x - nodes[cc])
            der = der + term
        derivs[..., a] = der / denom
    return values, derivs


def shape_eval(degree: int, ref_points):
    """Shape function values and reference gradients at points in [0,1]^dim.

    The basis is the tensor product of 1D Lagrange polynomials on equispaced
    nodes, ordered lexicographically with the first axis fastest; values sum
    to one and gradients sum to zero at every point.
    """
    ref_points = np.atleast_2d(np.asarray(ref_points, dtype=float))
    dim = ref_points.shape[-1]
    vals1d, ders1d = zip(*(_lagrange_1d(degree, ref_points[..., k]) for k in range(dim)))
    n1 = degree + 1
    n_loc = n1 ** dim
    local = _lattice(n1, dim).astype(int)  # (n_loc, dim), first axis fastest
    values = np.ones(ref_points.shape[:-1] + (n_loc,))
    grads = np.zeros(ref_points.shape[:-1] + (n_loc, dim))
    for j in range(n_loc):
        for k in range(dim):
            values[..., j] = values[..., j] * vals1d[k][..., local[j, k]]
        for k in range(dim):
            g = ders1d[k][..., local[j, k]]
            for other in range(dim):
                if other != k:
                    g = g * vals1d[other][..., local[j, other]]
            grads[..., j, k] = g
    return values, grads


class FeSpace:
    """Continuous piecewise Q^degree space with nodal degrees of freedom.

    Dof coordinates form the lattice with spacing 1/(degree * n) and the
    cell-to-dof map lists (degree+1)^dim local dofs per cell in the same
    lexicographic order used by ``shape_eval``.
    """

    def __init__(self, mesh: Mesh, degree: int = 1):
        if degree < 1:
            raise ValueError(f"degree must be >= 1, got {degree}")
        self.mesh = mesh
        self.degree = degree
        n_axis = degree * mesh.cells_per_axis + 1
        self.n_axis_dofs = n_axis
        self.n_dofs = n_axis ** mesh.dim
        lattice = _lattice(n_axis, mesh.dim)
        self.dof_coords = lattice / (degree * mesh.cells_per_axis)
        on_face = (lattice == 0) | (lattice == n_axis - 1)
        self.boundary_dofs = np.nonzero(on_face.any(axis=1))[0]
        cell_idx = _lattice(mesh.cells_per_axis, mesh.dim).astype(int)
        local = _lattice(degree + 1, mesh.dim).astype(int)
        idx = degree * cell_idx[:, None, :] + local[None, :, :]
        self.cell_dofs = _ravel_index(idx, n_axis)

    def interior_dofs(self) -> np.ndarray:
        mask = np.ones(self.n_dofs, dtype=bool)
        mask[self.boundary_dofs] = False
        return np.nonzero(mask)[0]

    def tabulate(self, ref_points):
        """Shape values/gradients of this space at reference points."""
        return shape_eval(self.degree, ref_points)

    def evaluate(self, coeffs, points) -> np.ndarray:
        """FE function values at arbitrary points of the unit box."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        cells = self.mesh.locate(points)
        ref = (points - self.mesh.cell_lows[cells]) / self.mesh.edge
        values, _ = self.tabulate(ref)
        return np.einsum("pj,pj->p", values, np.asarray(coeffs)[self.cell_dofs[cells]])

    def evaluate_gradient(self, coeffs, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        cells = self.mesh.locate(points)
        ref = (points - self.mesh.cell_lows[cells]) / self.mesh.edge
        _, grads = self.tabulate(ref)
        local = np.asarray(coeffs)[self.cell_dofs[cells]]
        return np.einsum("pj,pjk->pk", local, grads) / self.mesh.edge


def interpolate(space: FeSpace, g) -> np.ndarray:
    """Nodal interpolation: coefficient i equals g at dof coordinate i."""
    return np.array([g(x) for x in space.dof_coords], dtype=float)


def interpolate_outside_layer(space: FeSpace, classification: CellClassification,
                              g) -> np.ndarray:
    """Nodal interpolation with the interface-layer dofs set to zero.

    A dof survives iff it is a node of at least one cell outside the layer;
    dofs all of whose adjacent cells sit in the layer are zeroed.
    """
    keep = np.zeros(space.n_dofs, dtype=bool)
    keep[space.cell_dofs[classification.out_cells].ravel()] = True
    coeffs = np.zeros(space.n_dofs)
    kept = np.nonzero(keep)[0]
    coeffs[kept] = [g(x) for x in space.dof_coords[kept]]
    return coeffs
